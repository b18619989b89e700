// test_ingest.cpp
// CSV loading, coverage filter, returns, Parkinson variance, targets and
// liquidity.

#include "doctest.h"

#include "vplab/core.hpp"
#include "vplab/ingest.hpp"
#include "vplab/numeric.hpp"
#include "vplab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <map>
#include <set>
#include <sstream>

#include <unistd.h>

using namespace vplab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("vplab_ingest_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name, const std::string& content) const {
        const auto p = (path / name).string();
        std::ofstream(p) << content;
        return p;
    }
};

const char* kMarket =
    "date,series,value\n"
    "2024-01-02,VIX,13\n2024-01-02,MOVE,110\n";
const char* kPriceHeader = "date,ticker,open,high,low,close,volume\n";

// Builds a panel by hand for tests that do not need files.
MarketPanel tiny_panel(const std::vector<std::vector<double>>& closes) {
    MarketPanel p;
    const std::size_t n = closes.front().size();
    p.dates = business_days(Date::parse("2024-01-02"), n);
    const auto rows = static_cast<Eigen::Index>(n), cols = static_cast<Eigen::Index>(closes.size());
    p.close.resize(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        p.stocks.push_back("S" + std::to_string(j));
        p.sectors[p.stocks.back()] = "Energy";
        for (Eigen::Index t = 0; t < rows; ++t) p.close(t, j) = closes[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)];
    }
    p.open = p.close;
    p.high = p.close;
    p.low = p.close;
    p.volume = Grid::Constant(rows, cols, 1e6);
    return p;
}

}  // namespace

TEST_CASE("coverage filter retains stocks by a line-scan count") {
    TempDir dir;
    std::ostringstream prices;
    prices << kPriceHeader;
    const auto dates = business_days(Date::parse("2024-01-02"), 10);
    for (std::size_t t = 0; t < dates.size(); ++t) {
        prices << dates[t].iso() << ",AAA,10,11,9,10,100\n";
        prices << dates[t].iso() << ",BBB,20,21,19,20,100\n";
        if (t % 2 == 0) prices << dates[t].iso() << ",CCC,5,6,4,5,100\n";  // 50% coverage
    }
    const auto pp = dir.file("prices.csv", prices.str());
    const auto mp = dir.file("market.csv", kMarket);
    const auto sp = dir.file("sectors.csv", "ticker,sector\nAAA,Energy\nBBB,Utilities\nCCC,Materials\n");

    // oracle: count rows per ticker with a non-empty close by scanning lines
    std::map<std::string, int> covered;
    std::set<std::string> all_dates;
    {
        std::ifstream in(pp);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            std::vector<std::string> f;
            std::stringstream ss(line);
            for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
            all_dates.insert(f[0]);
            if (!f[5].empty()) ++covered[f[1]];
        }
    }
    std::vector<std::string> expected;
    for (const auto& [tk, n] : covered) {
        if (static_cast<double>(n) / static_cast<double>(all_dates.size()) >= 0.7) expected.push_back(tk);
    }

    const auto panel = load_market_panel(pp, mp, sp, 0.7);
    CHECK(panel.stocks == expected);
    CHECK(panel.stocks.size() == 2);
    CHECK(panel.sectors.size() == 2);
    CHECK(panel.n_dates() == 10);
    // VIX observed once on day 0: carried for 5 days, then missing
    const auto& vix = panel.series("VIX");
    for (std::size_t t = 0; t <= 5; ++t) CHECK(vix[t] == 13.0);
    for (std::size_t t = 6; t < 10; ++t) CHECK(is_missing(vix[t]));
}

TEST_CASE("single stock at full coverage round-trips through CSV bit-identically") {
    TempDir dir;
    MarketPanel p;
    p.dates = business_days(Date::parse("2023-06-01"), 30);
    p.stocks = {"ONE", "TWO"};
    p.sectors = {{"ONE", "Energy"}, {"TWO", "Financials"}};
    Philox rng(4);
    const Eigen::Index n = 30, m = 2;
    p.open.resize(n, m);
    p.high.resize(n, m);
    p.low.resize(n, m);
    p.close.resize(n, m);
    p.volume.resize(n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        double c = 50.0 + j;
        for (Eigen::Index t = 0; t < n; ++t) {
            c *= std::exp(0.01 * rng.normal());
            const double o = c * std::exp(0.003 * rng.normal());
            p.open(t, j) = o;
            p.close(t, j) = c;
            p.high(t, j) = std::max(o, c) * (1 + 0.01 * rng.uniform());
            p.low(t, j) = std::min(o, c) * (1 - 0.01 * rng.uniform());
            p.volume(t, j) = std::floor(1e6 * (1 + rng.uniform()));
        }
    }
    p.close(3, 1) = kMissing;  // one gap in the second stock
    p.open(3, 1) = kMissing;
    std::vector<double> vix(30), move(30);
    for (std::size_t t = 0; t < 30; ++t) {
        vix[t] = 15 + rng.uniform();
        move[t] = t >= 20 ? kMissing : 100 + rng.uniform();
    }
    p.market = {{"VIX", vix}, {"MOVE", move}};

    const auto a = (dir.path / "p.csv").string(), b = (dir.path / "m.csv").string(), c = (dir.path / "s.csv").string();
    write_market_panel(p, a, b, c);
    const auto q = load_market_panel(a, b, c, 0.5);
    CHECK(q.dates == p.dates);
    CHECK(q.stocks == p.stocks);
    CHECK(q.sectors == p.sectors);
    auto same = [](const Grid& x, const Grid& y) {
        if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double u = x.data()[i], v = y.data()[i];
            if (!(u == v || (std::isnan(u) && std::isnan(v)))) return false;
        }
        return true;
    };
    CHECK(same(q.open, p.open));
    CHECK(same(q.high, p.high));
    CHECK(same(q.low, p.low));
    CHECK(same(q.close, p.close));
    CHECK(same(q.volume, p.volume));
    for (const auto& [name, s] : p.market) {
        const auto& r = q.series(name);
        for (std::size_t t = 0; t < s.size(); ++t) {
            CHECK((r[t] == s[t] || (std::isnan(r[t]) && std::isnan(s[t]))));
        }
    }
}

TEST_CASE("loader errors") {
    TempDir dir;
    const auto mp = dir.file("market.csv", kMarket);
    const auto sp = dir.file("sectors.csv", "ticker,sector\nAAA,Energy\n");

    SUBCASE("malformed row names its line") {
        const auto pp = dir.file("prices.csv", std::string(kPriceHeader) +
                                                   "2024-01-02,AAA,10,11,9,10,100\n"
                                                   "2024-01-03,AAA,10,abc,9,10,100\n");
        try {
            load_market_panel(pp, mp, sp, 0.5);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
    }
    SUBCASE("high below low") {
        const auto pp = dir.file("prices.csv", std::string(kPriceHeader) + "2024-01-02,AAA,10,9,11,10,100\n");
        CHECK_THROWS_AS(load_market_panel(pp, mp, sp, 0.5), ParseError);
    }
    SUBCASE("duplicate date and ticker") {
        const auto pp = dir.file("prices.csv", std::string(kPriceHeader) +
                                                   "2024-01-02,AAA,10,11,9,10,100\n"
                                                   "2024-01-02,AAA,10,11,9,10,100\n");
        CHECK_THROWS_AS(load_market_panel(pp, mp, sp, 0.5), DataError);
    }
    SUBCASE("empty universe after filtering") {
        const auto pp = dir.file("prices.csv", std::string(kPriceHeader) +
                                                   "2024-01-02,AAA,10,11,9,10,100\n"
                                                   "2024-01-03,BBB,10,11,9,10,100\n");
        CHECK_THROWS_AS(load_market_panel(pp, mp, sp, 1.0), ConfigError);
    }
    SUBCASE("missing sector") {
        const auto pp = dir.file("prices.csv", std::string(kPriceHeader) + "2024-01-02,ZZZ,10,11,9,10,100\n");
        CHECK_THROWS_AS(load_market_panel(pp, mp, sp, 0.5), DataError);
    }
    SUBCASE("missing required market series") {
        const auto pp = dir.file("prices.csv", std::string(kPriceHeader) + "2024-01-02,AAA,10,11,9,10,100\n");
        const auto bad = dir.file("m2.csv", "date,series,value\n2024-01-02,VIX,13\n");
        CHECK_THROWS_AS(load_market_panel(pp, bad, sp, 0.5), DataError);
    }
}

TEST_CASE("log returns") {
    SUBCASE("two-point definition") {
        const auto r = to_log_returns(tiny_panel({{100, 110}}), 0.0, 1.0);
        REQUIRE(r.r.rows() == 1);
        CHECK(r.r(0, 0) == doctest::Approx(std::log(1.1)).epsilon(1e-15));
        CHECK(r.dates.size() == 1);
    }
    SUBCASE("constant price") {
        const auto r = to_log_returns(tiny_panel({std::vector<double>(20, 42.0)}), 0.001, 0.999);
        for (Eigen::Index t = 0; t < r.r.rows(); ++t) CHECK(r.r(t, 0) == 0.0);
        CHECK(r.winsor_bounds[0].first == 0.0);
        CHECK(r.winsor_bounds[0].second == 0.0);
    }
    SUBCASE("gaps break the return") {
        const auto r = to_log_returns(tiny_panel({{100, kMissing, 110, 121}}), 0.0, 1.0);
        CHECK(is_missing(r.r(0, 0)));
        CHECK(is_missing(r.r(1, 0)));
        CHECK(r.r(2, 0) == doctest::Approx(std::log(1.1)));
    }
    SUBCASE("non-positive close is a data error naming the cell") {
        auto p = tiny_panel({{100, 101, 102}});
        p.close(1, 0) = 0.0;
        try {
            to_log_returns(p, 0.0, 1.0);
            FAIL("expected a data error");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("S0") != std::string::npos);
        }
    }
}

TEST_CASE("winsorization matches a sort-based percentile oracle") {
    Philox rng(12);
    std::vector<double> x(1000);
    for (double& v : x) v = rng.normal();
    auto sorted = x;
    std::sort(sorted.begin(), sorted.end());
    auto oracle = [&](double p) {
        const double pos = p * 999.0;
        const auto lo = static_cast<std::size_t>(pos);
        return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
    };
    auto y = x;
    const auto [lo, hi] = winsorize(y, 0.01, 0.99);
    CHECK(lo == doctest::Approx(oracle(0.01)).epsilon(1e-14));
    CHECK(hi == doctest::Approx(oracle(0.99)).epsilon(1e-14));
    CHECK(*std::min_element(y.begin(), y.end()) == lo);
    CHECK(*std::max_element(y.begin(), y.end()) == hi);

    // clamping again with the recorded bounds is the identity
    auto z = y;
    for (double& v : z) v = std::clamp(v, lo, hi);
    CHECK(z == y);
}

TEST_CASE("returns lie within the recorded winsor bounds and have one fewer row") {
    Philox rng(8);
    std::vector<std::vector<double>> closes(3, std::vector<double>(400));
    for (auto& c : closes) {
        double p = 100;
        for (double& v : c) v = p *= std::exp(0.02 * rng.normal());
    }
    const auto panel = tiny_panel(closes);
    const auto r = to_log_returns(panel, 0.001, 0.999);
    CHECK(r.r.rows() == static_cast<Eigen::Index>(panel.n_dates()) - 1);
    for (Eigen::Index j = 0; j < 3; ++j) {
        const auto [lo, hi] = r.winsor_bounds[static_cast<std::size_t>(j)];
        for (Eigen::Index t = 0; t < r.r.rows(); ++t) {
            CHECK(r.r(t, j) >= lo);
            CHECK(r.r(t, j) <= hi);
        }
    }
}

TEST_CASE("parkinson variance") {
    auto p = tiny_panel({{100, 100, 100}});
    p.high(1, 0) = std::numbers::e * 50;
    p.low(1, 0) = 50;
    p.high(2, 0) = kMissing;
    const auto v = parkinson_rv(p);
    CHECK(v.rv(0, 0) == 0.0);
    CHECK(v.rv(1, 0) == doctest::Approx(1.0 / (4.0 * std::numbers::ln2)).epsilon(1e-14));
    CHECK(is_missing(v.rv(2, 0)));
    p.high(0, 0) = 90;
    CHECK_THROWS_AS(parkinson_rv(p), DataError);
}

TEST_CASE("parkinson variance is scale invariant") {
    Philox rng(21);
    auto p = tiny_panel({std::vector<double>(50, 10.0)});
    for (Eigen::Index t = 0; t < 50; ++t) {
        p.high(t, 0) = 10.0 * std::exp(0.02 * rng.uniform());
        p.low(t, 0) = 10.0 * std::exp(-0.02 * rng.uniform());
    }
    const auto base = parkinson_rv(p);
    for (double k : {0.01, 3.7, 1e4}) {
        auto q = p;
        q.high *= k;
        q.low *= k;
        const auto scaled = parkinson_rv(q);
        for (Eigen::Index t = 0; t < 50; ++t) CHECK(scaled.rv(t, 0) == doctest::Approx(base.rv(t, 0)).epsilon(1e-12));
    }
}

TEST_CASE("parkinson recovers GBM variance from a fine intraday grid") {
    const double sigma = 0.02;
    const int steps = 390;
    const int days = 10000;
    const double step_sd = sigma / std::sqrt(static_cast<double>(steps));
    Philox rng(2024);
    double total = 0;
    for (int d = 0; d < days; ++d) {
        double x = 0, hi = 0, lo = 0;
        for (int s = 0; s < steps; ++s) {
            x += step_sd * rng.normal();
            hi = std::max(hi, x);
            lo = std::min(lo, x);
        }
        total += (hi - lo) * (hi - lo) / (4.0 * std::numbers::ln2);
    }
    const double ratio = total / days / (sigma * sigma);
    INFO("ratio " << ratio);
    CHECK(ratio >= 0.85);
    CHECK(ratio <= 1.00);
}

TEST_CASE("forecast targets") {
    VolPanel v;
    v.dates = business_days(Date::parse("2024-01-02"), 30);
    v.stocks = {"A"};
    v.rv = Grid::Constant(30, 1, 1e-4);
    v.rv(1, 0) = std::exp(-8.0);
    for (int k = 0; k < 5; ++k) v.rv(10 + k, 0) = (k + 1) * 1e-4;

    const auto t1 = forecast_target(v, 1, ProxyKind::parkinson);
    CHECK(t1.y(0, 0) == -8.0);
    for (Eigen::Index t = 0; t + 1 < 30; ++t) CHECK(t1.y(t, 0) == std::log(v.rv(t + 1, 0)));
    CHECK(is_missing(t1.y(29, 0)));

    const auto t5 = forecast_target(v, 5, ProxyKind::parkinson);
    CHECK(t5.y(9, 0) == doctest::Approx(std::log(3e-4)).epsilon(1e-14));
    CHECK(t5.y(9, 0) == doctest::Approx(-8.1117).epsilon(1e-4));

    const auto t22 = forecast_target(v, 22, ProxyKind::parkinson);
    for (Eigen::Index t = 8; t < 30; ++t) CHECK(is_missing(t22.y(t, 0)));
    CHECK(present(t22.y(7, 0)));

    v.rv(20, 0) = kMissing;
    const auto gap = forecast_target(v, 5, ProxyKind::parkinson);
    for (Eigen::Index t = 15; t < 20; ++t) CHECK(is_missing(gap.y(t, 0)));
    CHECK(present(gap.y(14, 0)));

    v.rv.col(0).segment(25, 5).setZero();
    const auto zero = forecast_target(v, 1, ProxyKind::parkinson);
    CHECK(zero.zero_mean_count == 5);
    CHECK_THROWS_AS(forecast_target(v, 1, ProxyKind::squared_return), ConfigError);
    CHECK_THROWS_AS(forecast_target(v, 0, ProxyKind::parkinson), ConfigError);
}

TEST_CASE("squared-return proxy") {
    const auto p = tiny_panel({{100, 110, 99}});
    const auto r = to_log_returns(p, 0.0, 1.0);
    const auto v = squared_return_rv(p, r);
    CHECK(is_missing(v.rv(0, 0)));
    CHECK(v.rv(1, 0) == doctest::Approx(std::pow(std::log(1.1), 2)));
    CHECK(v.proxy == ProxyKind::squared_return);
}

TEST_CASE("liquidity measure and median halves") {
    auto p = tiny_panel({std::vector<double>(10, 100.0), std::vector<double>(10, 1.0)});
    const auto m = liquidity_measure(p);
    CHECK(m[0] == doctest::Approx(1e-8));
    CHECK(m[1] == doctest::Approx(1e-6));
    const auto halves = liquidity_halves(m);
    CHECK(halves[0] != halves[1]);

    p.volume.col(1).setZero();
    CHECK(is_missing(liquidity_measure(p)[1]));

    Philox rng(5);
    std::vector<double> ten(10);
    for (double& v : ten) v = std::exp(rng.normal());
    auto sorted = ten;
    std::sort(sorted.begin(), sorted.end());
    const double median = 0.5 * (sorted[4] + sorted[5]);
    const auto h = liquidity_halves(ten);
    for (std::size_t i = 0; i < 10; ++i) CHECK(h[i] == (ten[i] > median ? 1 : 0));
    CHECK(std::count(h.begin(), h.end(), 1) == 5);
}

TEST_CASE("expanding liquidity uses only past data") {
    auto p = tiny_panel({std::vector<double>(10, 100.0)});
    for (Eigen::Index t = 0; t < 10; ++t) p.volume(t, 0) = 1e6 * (t + 1);
    const auto e = expanding_liquidity(p);
    auto q = p;
    q.volume(9, 0) = 1.0;
    const auto f = expanding_liquidity(q);
    for (Eigen::Index t = 0; t < 9; ++t) CHECK(e(t, 0) == f(t, 0));
    CHECK(e(9, 0) != f(9, 0));
    CHECK(e(0, 0) == doctest::Approx(1e-8));
}
