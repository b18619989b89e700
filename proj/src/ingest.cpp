// ingest.cpp

#include "vplab/ingest.hpp"

#include "vplab/csv.hpp"
#include "vplab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <unordered_map>

namespace vplab {

const std::vector<double>& MarketPanel::series(const std::string& name) const {
    auto it = market.find(name);
    if (it == market.end()) throw DataError("market series '" + name + "' not loaded");
    return it->second;
}

namespace {

void check_ohlc(double o, double h, double l, double c, const auto& where) {
    if (present(l) && !(l > 0.0)) where("low must be > 0");
    if (present(h) && present(l) && h < l) where("high < low");
    if (present(h)) {
        if (present(o) && h < o) where("high < open");
        if (present(c) && h < c) where("high < close");
    }
    if (present(l)) {
        if (present(o) && l > o) where("low > open");
        if (present(c) && l > c) where("low > close");
    }
}

}  // namespace

void MarketPanel::validate() const {
    for (std::size_t t = 1; t < dates.size(); ++t) {
        if (!(dates[t - 1] < dates[t])) throw DataError("dates not strictly increasing at " + dates[t].iso());
    }
    const auto n = static_cast<Eigen::Index>(dates.size());
    const auto m = static_cast<Eigen::Index>(stocks.size());
    for (const Grid* g : {&open, &high, &low, &close, &volume}) {
        if (g->rows() != n || g->cols() != m) throw DataError("panel matrix shape mismatch");
    }
    for (Eigen::Index j = 0; j < m; ++j) {
        const auto& tk = stocks[static_cast<std::size_t>(j)];
        if (!sectors.contains(tk)) throw DataError("ticker " + tk + " has no sector entry");
        for (Eigen::Index t = 0; t < n; ++t) {
            check_ohlc(open(t, j), high(t, j), low(t, j), close(t, j), [&](const char* what) {
                throw DataError(std::string(what) + " at " + dates[static_cast<std::size_t>(t)].iso() +
                                " " + tk);
            });
        }
    }
    for (const auto& [name, s] : market) {
        if (s.size() != dates.size()) throw DataError("market series " + name + " misaligned");
    }
}

// ----------------------------------------------------------------------------

MarketPanel load_market_panel(const std::string& prices_path, const std::string& market_path,
                              const std::string& sectors_path, double min_coverage) {
    if (!(min_coverage > 0.0 && min_coverage <= 1.0)) {
        throw ConfigError("min_coverage must lie in (0, 1]");
    }

    struct Row {
        Date date;
        std::size_t ticker;
        double o, h, l, c, v;
    };
    std::vector<Row> rows;
    std::vector<std::string> tickers;
    std::unordered_map<std::string, std::size_t> ticker_ix;
    std::set<Date> date_set;
    {
        csv::Reader in(prices_path, {"date", "ticker", "open", "high", "low", "close", "volume"});
        std::vector<std::string_view> f;
        while (in.next(f)) {
            Row r{};
            try {
                r.date = Date::parse(f[0]);
            } catch (const DataError& e) {
                in.fail(e.what());
            }
            if (f[1].empty()) in.fail("empty ticker");
            const std::string tk(f[1]);
            auto [it, inserted] = ticker_ix.emplace(tk, tickers.size());
            if (inserted) tickers.push_back(tk);
            r.ticker = it->second;
            r.o = in.number(f[2]);
            r.h = in.number(f[3]);
            r.l = in.number(f[4]);
            r.c = in.number(f[5]);
            r.v = in.number(f[6]);
            check_ohlc(r.o, r.h, r.l, r.c, [&](const char* what) { in.fail(std::string(what) + " for " + tk); });
            if (present(r.c) && !(r.c > 0.0)) in.fail("non-positive close for " + tk);
            if (present(r.v) && r.v < 0.0) in.fail("negative volume for " + tk);
            date_set.insert(r.date);
            rows.push_back(r);
        }
    }
    if (tickers.empty()) throw ConfigError("prices file '" + prices_path + "' holds no rows");

    const std::vector<Date> dates(date_set.begin(), date_set.end());
    auto date_index = [&](Date d) {
        return static_cast<Eigen::Index>(std::lower_bound(dates.begin(), dates.end(), d) - dates.begin());
    };
    const auto n = static_cast<Eigen::Index>(dates.size());
    const auto m_all = static_cast<Eigen::Index>(tickers.size());
    Grid o = Grid::Constant(n, m_all, kMissing), h = o, l = o, c = o, v = o;
    std::vector<char> seen(static_cast<std::size_t>(n * m_all), 0);
    for (const auto& r : rows) {
        const auto t = date_index(r.date);
        const auto j = static_cast<Eigen::Index>(r.ticker);
        char& s = seen[static_cast<std::size_t>(j * n + t)];
        if (s) throw DataError("duplicate (date, ticker) " + r.date.iso() + ", " + tickers[r.ticker]);
        s = 1;
        o(t, j) = r.o;
        h(t, j) = r.h;
        l(t, j) = r.l;
        c(t, j) = r.c;
        v(t, j) = r.v;
    }

    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < m_all; ++j) {
        const auto covered = static_cast<double>(c.col(j).unaryExpr([](double x) { return present(x) ? 1.0 : 0.0; }).sum());
        if (covered / static_cast<double>(n) >= min_coverage) keep.push_back(j);
    }
    if (keep.empty()) {
        throw ConfigError("no stock meets the coverage requirement of " + std::to_string(min_coverage));
    }

    MarketPanel panel;
    panel.dates = dates;
    const auto m = static_cast<Eigen::Index>(keep.size());
    panel.open.resize(n, m);
    panel.high.resize(n, m);
    panel.low.resize(n, m);
    panel.close.resize(n, m);
    panel.volume.resize(n, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const auto j = keep[static_cast<std::size_t>(k)];
        panel.stocks.push_back(tickers[static_cast<std::size_t>(j)]);
        panel.open.col(k) = o.col(j);
        panel.high.col(k) = h.col(j);
        panel.low.col(k) = l.col(j);
        panel.close.col(k) = c.col(j);
        panel.volume.col(k) = v.col(j);
    }

    // market series: per-series sorted observations, then bounded forward fill
    std::map<std::string, std::map<Date, double>> obs;
    {
        csv::Reader in(market_path, {"date", "series", "value"});
        std::vector<std::string_view> f;
        while (in.next(f)) {
            Date d;
            try {
                d = Date::parse(f[0]);
            } catch (const DataError& e) {
                in.fail(e.what());
            }
            if (f[1].empty()) in.fail("empty series name");
            // an explicit empty value is kept: it stops the forward fill
            const double val = in.number(f[2]);
            auto [it, inserted] = obs[std::string(f[1])].emplace(d, val);
            if (!inserted) in.fail("duplicate (date, series) " + d.iso() + ", " + std::string(f[1]));
        }
    }
    for (const char* required : {"VIX", "MOVE"}) {
        if (!obs.contains(required)) throw DataError(std::string("market file lacks required series ") + required);
    }
    for (const auto& [name, points] : obs) {
        std::vector<double> aligned(dates.size(), kMissing);
        auto it = points.begin();
        const std::pair<const Date, double>* last = nullptr;
        for (std::size_t t = 0; t < dates.size(); ++t) {
            while (it != points.end() && it->first <= dates[t]) last = &*it++;
            if (last == nullptr || is_missing(last->second)) continue;
            const auto first_on_or_after =
                static_cast<std::size_t>(std::lower_bound(dates.begin(), dates.end(), last->first) - dates.begin());
            if (t - first_on_or_after <= static_cast<std::size_t>(kMarketFillDays)) aligned[t] = last->second;
        }
        panel.market.emplace(name, std::move(aligned));
    }

    {
        csv::Reader in(sectors_path, {"ticker", "sector"});
        std::vector<std::string_view> f;
        while (in.next(f)) {
            if (f[0].empty() || f[1].empty()) in.fail("empty ticker or sector");
            if (!panel.sectors.emplace(std::string(f[0]), std::string(f[1])).second) {
                in.fail("duplicate ticker " + std::string(f[0]));
            }
        }
    }
    // keep only sectors of retained tickers so a round trip is exact
    std::map<std::string, std::string> retained;
    for (const auto& tk : panel.stocks) {
        auto it = panel.sectors.find(tk);
        if (it == panel.sectors.end()) throw DataError("ticker " + tk + " has no sector entry");
        retained.emplace(tk, it->second);
    }
    panel.sectors = std::move(retained);
    panel.validate();
    return panel;
}

void write_market_panel(const MarketPanel& panel, const std::string& prices_path,
                        const std::string& market_path, const std::string& sectors_path) {
    {
        csv::Writer out(prices_path, {"date", "ticker", "open", "high", "low", "close", "volume"});
        for (std::size_t t = 0; t < panel.n_dates(); ++t) {
            const auto ti = static_cast<Eigen::Index>(t);
            const std::string d = panel.dates[t].iso();
            for (std::size_t j = 0; j < panel.n_stocks(); ++j) {
                const auto ji = static_cast<Eigen::Index>(j);
                out << d << panel.stocks[j] << panel.open(ti, ji) << panel.high(ti, ji) << panel.low(ti, ji)
                    << panel.close(ti, ji) << panel.volume(ti, ji);
                out.end_row();
            }
        }
    }
    {
        csv::Writer out(market_path, {"date", "series", "value"});
        for (std::size_t t = 0; t < panel.n_dates(); ++t) {
            for (const auto& [name, s] : panel.market) {
                out << panel.dates[t].iso() << name << s[t];
                out.end_row();
            }
        }
    }
    csv::Writer out(sectors_path, {"ticker", "sector"});
    for (const auto& [tk, sec] : panel.sectors) {
        out << tk << sec;
        out.end_row();
    }
}

// ----------------------------------------------------------------------------

std::pair<double, double> winsorize(std::span<double> values, double lo_pct, double hi_pct) {
    if (!(lo_pct >= 0.0 && lo_pct < hi_pct && hi_pct <= 1.0)) {
        throw ConfigError("winsorization requires 0 <= lo < hi <= 1");
    }
    std::vector<double> sorted;
    for (double v : values) {
        if (present(v)) sorted.push_back(v);
    }
    if (sorted.empty()) return {kMissing, kMissing};
    std::sort(sorted.begin(), sorted.end());
    const double lo = percentile_sorted(sorted, lo_pct);
    const double hi = percentile_sorted(sorted, hi_pct);
    for (double& v : values) {
        if (present(v)) v = std::clamp(v, lo, hi);
    }
    return {lo, hi};
}

ReturnPanel to_log_returns(const MarketPanel& panel, double lo_pct, double hi_pct) {
    if (!(lo_pct >= 0.0 && lo_pct < hi_pct && hi_pct <= 1.0)) {
        throw ConfigError("winsorization requires 0 <= lo < hi <= 1");
    }
    const auto n = static_cast<Eigen::Index>(panel.n_dates());
    const auto m = static_cast<Eigen::Index>(panel.n_stocks());
    if (n < 2) throw DataError("need at least two dates for returns");
    ReturnPanel out;
    out.dates.assign(panel.dates.begin() + 1, panel.dates.end());
    out.stocks = panel.stocks;
    out.r = Grid::Constant(n - 1, m, kMissing);
    out.winsor_bounds.resize(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
        std::size_t usable = 0;
        for (Eigen::Index t = 0; t < n; ++t) {
            const double c = panel.close(t, j);
            if (is_missing(c)) continue;
            if (!(c > 0.0)) {
                throw DataError("non-positive close at " + panel.dates[static_cast<std::size_t>(t)].iso() + " " +
                                panel.stocks[static_cast<std::size_t>(j)]);
            }
            ++usable;
            if (t > 0 && present(panel.close(t - 1, j))) out.r(t - 1, j) = std::log(c / panel.close(t - 1, j));
        }
        if (usable < 2) throw DataError("stock " + panel.stocks[static_cast<std::size_t>(j)] + " has fewer than 2 closes");
        std::span<double> col(out.r.col(j).data(), static_cast<std::size_t>(n - 1));
        out.winsor_bounds[static_cast<std::size_t>(j)] = winsorize(col, lo_pct, hi_pct);
    }
    return out;
}

std::string to_string(ProxyKind k) { return k == ProxyKind::parkinson ? "parkinson" : "squared_return"; }

ProxyKind proxy_from_string(const std::string& s) {
    if (s == "parkinson") return ProxyKind::parkinson;
    if (s == "squared_return") return ProxyKind::squared_return;
    throw ConfigError("unknown volatility proxy '" + s + "'");
}

VolPanel parkinson_rv(const MarketPanel& panel) {
    VolPanel out;
    out.dates = panel.dates;
    out.stocks = panel.stocks;
    out.proxy = ProxyKind::parkinson;
    const double denom = 4.0 * std::numbers::ln2;
    out.rv = Grid::Constant(panel.high.rows(), panel.high.cols(), kMissing);
    for (Eigen::Index j = 0; j < out.rv.cols(); ++j) {
        for (Eigen::Index t = 0; t < out.rv.rows(); ++t) {
            const double h = panel.high(t, j), l = panel.low(t, j);
            if (is_missing(h) || is_missing(l)) continue;
            if (h < l) {
                throw DataError("high < low at " + panel.dates[static_cast<std::size_t>(t)].iso() + " " +
                                panel.stocks[static_cast<std::size_t>(j)]);
            }
            const double range = std::log(h) - std::log(l);
            out.rv(t, j) = range * range / denom;
        }
    }
    return out;
}

VolPanel squared_return_rv(const MarketPanel& panel, const ReturnPanel& returns) {
    VolPanel out;
    out.dates = panel.dates;
    out.stocks = panel.stocks;
    out.proxy = ProxyKind::squared_return;
    out.rv = Grid::Constant(static_cast<Eigen::Index>(panel.n_dates()), static_cast<Eigen::Index>(panel.n_stocks()),
                            kMissing);
    out.rv.bottomRows(returns.r.rows()) = returns.r.array().square().matrix();
    return out;
}

TargetPanel forecast_target(const VolPanel& vol, int h, ProxyKind proxy) {
    if (h < 1) throw ConfigError("forecast horizon must be >= 1");
    if (vol.proxy != proxy) {
        throw ConfigError("target proxy " + to_string(proxy) + " requested from a " + to_string(vol.proxy) +
                          " volatility panel");
    }
    TargetPanel out;
    out.horizon = h;
    out.proxy = proxy;
    out.dates = vol.dates;
    out.stocks = vol.stocks;
    const auto n = vol.rv.rows();
    out.y = Grid::Constant(n, vol.rv.cols(), kMissing);
    for (Eigen::Index j = 0; j < vol.rv.cols(); ++j) {
        for (Eigen::Index t = 0; t + h < n; ++t) {
            double sum = 0.0;
            bool complete = true;
            for (int k = 1; k <= h; ++k) {
                const double v = vol.rv(t + k, j);
                if (is_missing(v)) {
                    complete = false;
                    break;
                }
                sum += v;
            }
            if (!complete) continue;
            const double m = sum / h;
            if (m > 0.0) {
                out.y(t, j) = std::log(m);
            } else {
                ++out.zero_mean_count;
            }
        }
    }
    return out;
}

std::vector<double> liquidity_measure(const MarketPanel& panel) {
    std::vector<double> out(panel.n_stocks(), kMissing);
    for (Eigen::Index j = 0; j < panel.close.cols(); ++j) {
        double sum = 0.0;
        std::size_t count = 0;
        for (Eigen::Index t = 0; t < panel.close.rows(); ++t) {
            const double c = panel.close(t, j), v = panel.volume(t, j);
            if (is_missing(c) || is_missing(v) || v <= 0.0) continue;
            sum += 1.0 / (c * v);
            ++count;
        }
        if (count > 0) out[static_cast<std::size_t>(j)] = sum / static_cast<double>(count);
    }
    return out;
}

Grid expanding_liquidity(const MarketPanel& panel) {
    Grid out = Grid::Constant(panel.close.rows(), panel.close.cols(), kMissing);
    for (Eigen::Index j = 0; j < panel.close.cols(); ++j) {
        double sum = 0.0;
        std::size_t count = 0;
        for (Eigen::Index t = 0; t < panel.close.rows(); ++t) {
            const double c = panel.close(t, j), v = panel.volume(t, j);
            if (present(c) && present(v) && v > 0.0) {
                sum += 1.0 / (c * v);
                ++count;
            }
            if (count > 0) out(t, j) = sum / static_cast<double>(count);
        }
    }
    return out;
}

std::vector<int> liquidity_halves(std::span<const double> measure) {
    std::vector<double> avail;
    for (double v : measure) {
        if (present(v)) avail.push_back(v);
    }
    std::vector<int> out(measure.size(), -1);
    if (avail.empty()) return out;
    const double med = percentile(avail, 0.5);
    for (std::size_t i = 0; i < measure.size(); ++i) {
        if (present(measure[i])) out[i] = measure[i] <= med ? 0 : 1;
    }
    return out;
}

}  // namespace vplab
