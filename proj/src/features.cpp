// features.cpp

#include "vplab/features.hpp"

#include "vplab/csv.hpp"
#include "vplab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>

namespace vplab {

std::string target_column(int horizon) { return "y_h" + std::to_string(horizon); }

Eigen::Index FeaturePanel::column_index(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw ConfigError("feature panel has no column '" + name + "'");
    return static_cast<Eigen::Index>(it - names.begin());
}

bool FeaturePanel::has_column(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

// ----------------------------------------------------------------------------

Dynamics stock_dynamics(const Grid& d, const Grid& h, std::size_t K) {
    if (K < 2) throw ConfigError("dynamics window K must be >= 2");
    const auto S = d.rows(), N = d.cols();
    Dynamics out;
    out.delta_d = Grid::Constant(S, N, kMissing);
    out.vol_d = out.delta_d;
    out.trend_d = out.delta_d;
    out.delta_h = out.delta_d;
    const auto k = static_cast<Eigen::Index>(K);

    // stride index relative to the window start: 0..K-1, centred
    const double xbar = 0.5 * static_cast<double>(K - 1);
    double sxx = 0.0;
    for (std::size_t i = 0; i < K; ++i) sxx += (static_cast<double>(i) - xbar) * (static_cast<double>(i) - xbar);

    for (Eigen::Index j = 0; j < N; ++j) {
        for (Eigen::Index s = 1; s < S; ++s) {
            if (present(d(s, j)) && present(d(s - 1, j))) out.delta_d(s, j) = d(s, j) - d(s - 1, j);
            if (present(h(s, j)) && present(h(s - 1, j))) out.delta_h(s, j) = h(s, j) - h(s - 1, j);
        }
        for (Eigen::Index s = k - 1; s < S; ++s) {
            const auto window = d.col(j).segment(s - k + 1, k);
            if (!window.allFinite()) continue;
            const double m = window.mean();
            double ss = 0.0, sxy = 0.0;
            for (Eigen::Index i = 0; i < k; ++i) {
                ss += (window(i) - m) * (window(i) - m);
                sxy += (static_cast<double>(i) - xbar) * (window(i) - m);
            }
            out.vol_d(s, j) = std::sqrt(ss / static_cast<double>(K - 1));
            out.trend_d(s, j) = sxy / sxx;
        }
    }
    return out;
}

CrossSection cross_sectional_and_sector(const Grid& d, const std::vector<std::string>& stock_sector, double tau) {
    const auto S = d.rows(), N = d.cols();
    if (stock_sector.size() != static_cast<std::size_t>(N)) throw ConfigError("sector list does not match stocks");
    CrossSection out;
    for (auto* v : {&out.mean, &out.sd, &out.skew, &out.kurt, &out.share_gt_tau, &out.range}) {
        v->assign(static_cast<std::size_t>(S), kMissing);
    }
    out.sector_mean = Grid::Constant(S, N, kMissing);

    std::vector<std::string> sector_names(stock_sector);
    std::sort(sector_names.begin(), sector_names.end());
    sector_names.erase(std::unique(sector_names.begin(), sector_names.end()), sector_names.end());
    std::vector<std::size_t> sector_of(static_cast<std::size_t>(N));
    for (Eigen::Index j = 0; j < N; ++j) {
        const auto& name = stock_sector[static_cast<std::size_t>(j)];
        sector_of[static_cast<std::size_t>(j)] =
            static_cast<std::size_t>(std::lower_bound(sector_names.begin(), sector_names.end(), name) - sector_names.begin());
    }

    std::vector<double> avail;
    std::vector<double> sec_sum(sector_names.size()), sec_n(sector_names.size());
    for (Eigen::Index s = 0; s < S; ++s) {
        avail.clear();
        std::fill(sec_sum.begin(), sec_sum.end(), 0.0);
        std::fill(sec_n.begin(), sec_n.end(), 0.0);
        for (Eigen::Index j = 0; j < N; ++j) {
            const double v = d(s, j);
            if (is_missing(v)) continue;
            avail.push_back(v);
            sec_sum[sector_of[static_cast<std::size_t>(j)]] += v;
            sec_n[sector_of[static_cast<std::size_t>(j)]] += 1.0;
        }
        const auto si = static_cast<std::size_t>(s);
        if (!avail.empty()) {
            out.mean[si] = mean(avail);
            const auto [lo, hi] = std::minmax_element(avail.begin(), avail.end());
            out.range[si] = *hi - *lo;
            out.share_gt_tau[si] =
                static_cast<double>(std::count_if(avail.begin(), avail.end(), [&](double v) { return v > tau; })) /
                static_cast<double>(avail.size());
            out.sd[si] = sample_sd(avail);
            out.skew[si] = skewness(avail);
            out.kurt[si] = excess_kurtosis(avail);
        }
        for (Eigen::Index j = 0; j < N; ++j) {
            const auto g = sector_of[static_cast<std::size_t>(j)];
            if (sec_n[g] > 0.0) out.sector_mean(s, j) = sec_sum[g] / sec_n[g];
        }
    }
    return out;
}

HarLogs har_logs(std::span<const double> rv, std::size_t t) {
    HarLogs out{kMissing, kMissing, kMissing};
    // a zero anywhere in the monthly window voids all three components
    const std::size_t first = t >= 21 ? t - 21 : 0;
    for (std::size_t k = first; k <= t; ++k) {
        if (present(rv[k]) && rv[k] <= 0.0) return out;
    }
    auto log_mean = [&](std::size_t len) {
        if (t + 1 < len) return kMissing;
        double s = 0.0;
        for (std::size_t k = t + 1 - len; k <= t; ++k) {
            if (is_missing(rv[k])) return kMissing;
            s += rv[k];
        }
        return std::log(s / static_cast<double>(len));
    };
    out.d = log_mean(1);
    out.w = log_mean(5);
    out.m = log_mean(22);
    return out;
}

// ----------------------------------------------------------------------------

FeaturePanel assemble_features(const MarketPanel& market, const VolPanel& vol, const ReturnPanel& returns,
                               const MemoryPanel& memory, const std::vector<TargetPanel>& targets,
                               const FeatureConfig& cfg) {
    if (vol.dates != market.dates || vol.stocks != market.stocks) {
        throw ConfigError("volatility panel is not aligned with the market panel");
    }
    if (memory.stocks != market.stocks) throw ConfigError("memory panel is not aligned with the market panel");
    if (returns.dates.size() + 1 != market.dates.size()) throw ConfigError("return panel is not aligned");
    for (const auto& tp : targets) {
        if (tp.dates != vol.dates || tp.stocks != vol.stocks) throw ConfigError("target panel is not aligned");
    }

    FeaturePanel f;
    f.dates = memory.dates;
    f.day_index = memory.day_index;
    f.stocks = market.stocks;
    for (const auto& tk : f.stocks) f.stock_sector.push_back(market.sectors.at(tk));
    f.names = kPredictorColumns;
    f.names.insert(f.names.end(), kAuxiliaryColumns.begin(), kAuxiliaryColumns.end());
    for (const auto& tp : targets) f.names.push_back(target_column(tp.horizon));

    const std::size_t S = f.dates.size(), N = f.stocks.size();
    f.values = Grid::Constant(static_cast<Eigen::Index>(S * N), static_cast<Eigen::Index>(f.names.size()), kMissing);
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t s = 0; s < S; ++s) {
            f.row_stock.push_back(i);
            f.row_date.push_back(s);
        }
    }

    const Grid& d = memory.d(cfg.estimator);
    const auto dyn = stock_dynamics(d, memory.hurst, cfg.dynamics_window);
    const auto cs = cross_sectional_and_sector(d, f.stock_sector, cfg.tau);
    const auto liq = expanding_liquidity(market);
    const auto& vix = market.series("VIX");
    const auto& move = market.series("MOVE");

    std::vector<Eigen::Index> tcols;
    for (const auto& tp : targets) tcols.push_back(f.column_index(target_column(tp.horizon)));
    auto C = [&](const char* name) { return f.column_index(name); };
    const auto c_hd = C("har_d_log"), c_hw = C("har_w_log"), c_hm = C("har_m_log"), c_r = C("ret_lag1"),
               c_ra = C("ret_lag1_abs"), c_d = C("d_gph"), c_dd = C("delta_d_gph"), c_vd = C("vol_d_gph"),
               c_td = C("trend_d_gph"), c_h = C("h"), c_dh = C("delta_h"), c_csm = C("cs_mean_d"),
               c_css = C("cs_std_d"), c_sec = C("sector_mean_d"), c_vix = C("vix"), c_move = C("move"),
               c_dv = C("d_x_vix"), c_dm = C("d_x_move"), c_sk = C("cs_skew_d"), c_ku = C("cs_kurt_d"),
               c_sh = C("cs_share_d_gt_030"), c_rg = C("cs_range_d"), c_dl = C("d_over_liq");

    parallel_for(N, [&](std::size_t i) {
        const auto ji = static_cast<Eigen::Index>(i);
        std::span<const double> rv(vol.rv.col(ji).data(), vol.dates.size());
        for (std::size_t s = 0; s < S; ++s) {
            const auto r = static_cast<Eigen::Index>(f.row(i, s));
            const auto si = static_cast<Eigen::Index>(s);
            const std::size_t t = f.day_index[s];
            auto put = [&](Eigen::Index c, double v) { f.values(r, c) = v; };

            const auto har = har_logs(rv, t);
            put(c_hd, har.d);
            put(c_hw, har.w);
            put(c_hm, har.m);

            // return r(k) covers price dates k -> k+1; search back from the stride date
            for (std::size_t back = 0; back < cfg.ret_lookback && back < t; ++back) {
                const double v = returns.r(static_cast<Eigen::Index>(t - back - 1), ji);
                if (present(v)) {
                    put(c_r, v);
                    put(c_ra, std::abs(v));
                    break;
                }
            }

            const double dv = d(si, ji);
            put(c_d, dv);
            put(c_dd, dyn.delta_d(si, ji));
            put(c_vd, dyn.vol_d(si, ji));
            put(c_td, dyn.trend_d(si, ji));
            put(c_h, memory.hurst(si, ji));
            put(c_dh, dyn.delta_h(si, ji));
            put(c_csm, cs.mean[s]);
            put(c_css, cs.sd[s]);
            put(c_sec, cs.sector_mean(si, ji));
            put(c_vix, vix[t]);
            put(c_move, move[t]);
            put(c_dv, dv * vix[t]);
            put(c_dm, dv * move[t]);
            put(c_sk, cs.skew[s]);
            put(c_ku, cs.kurt[s]);
            put(c_sh, cs.share_gt_tau[s]);
            put(c_rg, cs.range[s]);
            put(c_dl, dv / liq(static_cast<Eigen::Index>(t), ji));
            for (std::size_t k = 0; k < targets.size(); ++k) put(tcols[k], targets[k].y(static_cast<Eigen::Index>(t), ji));
        }
    });
    return f;
}

// ----------------------------------------------------------------------------

void write_feature_panel(const FeaturePanel& f, const std::string& path) {
    std::vector<std::string> header{"date", "ticker", "sector", "day_index"};
    header.insert(header.end(), f.names.begin(), f.names.end());
    csv::Writer out(path, header);
    for (std::size_t r = 0; r < f.n_rows(); ++r) {
        const auto s = f.row_date[r];
        out << f.dates[s].iso() << f.stocks[f.row_stock[r]] << f.stock_sector[f.row_stock[r]]
            << static_cast<long long>(f.day_index[s]);
        for (Eigen::Index c = 0; c < f.values.cols(); ++c) out << f.values(static_cast<Eigen::Index>(r), c);
        out.end_row();
    }
}

FeaturePanel read_feature_panel(const std::string& path) {
    std::vector<std::string> names;
    {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open feature panel '" + path + "'");
        std::string header;
        std::getline(in, header);
        for (auto field : csv::split(header)) names.emplace_back(field);
    }
    if (names.size() < 4 || names[0] != "date" || names[1] != "ticker" || names[2] != "sector" ||
        names[3] != "day_index") {
        throw ParseError(path, 1, "feature panel header must start with date,ticker,sector,day_index");
    }
    csv::Reader in(path, names);
    FeaturePanel f;
    f.names.assign(names.begin() + 4, names.end());

    struct Row {
        std::size_t stock, date;
        std::vector<double> v;
    };
    std::vector<Row> rows;
    std::unordered_map<std::string, std::size_t> stock_ix;
    std::map<Date, std::size_t> day_of_date;
    std::vector<std::string_view> fields;
    std::vector<Date> row_dates;
    while (in.next(fields)) {
        Date d;
        try {
            d = Date::parse(fields[0]);
        } catch (const DataError& e) {
            in.fail(e.what());
        }
        const std::string tk(fields[1]);
        auto [it, inserted] = stock_ix.emplace(tk, f.stocks.size());
        if (inserted) {
            f.stocks.push_back(tk);
            f.stock_sector.emplace_back(fields[2]);
        }
        const double day = in.number(fields[3]);
        if (!(day >= 0.0) || day != std::floor(day)) in.fail("bad day_index");
        auto [dit, fresh] = day_of_date.emplace(d, static_cast<std::size_t>(day));
        if (!fresh && dit->second != static_cast<std::size_t>(day)) in.fail("inconsistent day_index for " + d.iso());
        Row r{it->second, 0, {}};
        r.v.reserve(f.names.size());
        for (std::size_t c = 4; c < fields.size(); ++c) r.v.push_back(in.number(fields[c]));
        rows.push_back(std::move(r));
        row_dates.push_back(d);
    }
    for (const auto& [d, day] : day_of_date) {
        f.dates.push_back(d);
        f.day_index.push_back(day);
    }
    const std::size_t S = f.dates.size(), N = f.stocks.size();
    f.values = Grid::Constant(static_cast<Eigen::Index>(S * N), static_cast<Eigen::Index>(f.names.size()), kMissing);
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t s = 0; s < S; ++s) {
            f.row_stock.push_back(i);
            f.row_date.push_back(s);
        }
    }
    std::vector<char> seen(S * N, 0);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto s = static_cast<std::size_t>(std::distance(day_of_date.begin(), day_of_date.find(row_dates[k])));
        const auto r = f.row(rows[k].stock, s);
        if (seen[r]) throw DataError("duplicate feature row " + row_dates[k].iso() + ", " + f.stocks[rows[k].stock]);
        seen[r] = 1;
        for (std::size_t c = 0; c < rows[k].v.size(); ++c) {
            f.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[k].v[c];
        }
    }
    return f;
}

}  // namespace vplab
