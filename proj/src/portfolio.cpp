// portfolio.cpp

#include "vplab/portfolio.hpp"

#include "vplab/eval.hpp"
#include "vplab/numeric.hpp"

#include <cmath>

namespace vplab {

Grid forward_period_returns(const ReturnPanel& returns, const std::vector<std::size_t>& day_index, int days) {
    if (days < 1) throw ConfigError("period length must be >= 1 day");
    const auto D = static_cast<std::size_t>(days);
    const auto T = static_cast<std::size_t>(returns.r.rows());
    Grid out = Grid::Constant(static_cast<Eigen::Index>(day_index.size()), returns.r.cols(), kMissing);
    for (std::size_t e = 0; e < day_index.size(); ++e) {
        const std::size_t t = day_index[e];
        if (t + D > T) continue;  // return row k covers day k -> k+1
        for (Eigen::Index j = 0; j < returns.r.cols(); ++j) {
            double s = 0.0;
            bool ok = true;
            for (std::size_t k = t; k < t + D && ok; ++k) {
                const double v = returns.r(static_cast<Eigen::Index>(k), j);
                ok = present(v);
                s += v;
            }
            if (ok) out(static_cast<Eigen::Index>(e), j) = std::expm1(s);
        }
    }
    return out;
}

std::vector<double> unmanaged_path(const ReturnPanel& returns, const std::vector<std::size_t>& day_index) {
    return equal_weight(forward_period_returns(returns, day_index, 5));
}

ManagedPanel managed_returns(const ForecastSet& f, const ReturnPanel& returns, ScalingWindow window) {
    if (f.horizon != 5) throw ConfigError("managed portfolios use the 5-day forecasts");
    if (returns.stocks != f.stocks) throw ConfigError("return panel is not aligned with the forecasts");
    ManagedPanel out;
    out.model = f.model;
    out.dates = f.dates;
    out.stocks = f.stocks;
    const Grid fwd = forward_period_returns(returns, f.day_index, 5);
    const auto E = fwd.rows(), N = fwd.cols();
    out.raw = Grid::Constant(E, N, kMissing);
    out.managed = out.raw;
    out.c.assign(static_cast<std::size_t>(N), kMissing);

    for (Eigen::Index j = 0; j < N; ++j) {
        std::vector<Eigen::Index> rows;
        std::vector<double> r, u;  // raw return and return / forecast variance
        for (Eigen::Index e = 0; e < E; ++e) {
            const double p = f.y_pred(e, j), v = fwd(e, j);
            if (is_missing(p) || is_missing(v)) continue;
            rows.push_back(e);
            r.push_back(v);
            u.push_back(v / std::exp(p));
        }
        const std::string& tk = f.stocks[static_cast<std::size_t>(j)];
        if (r.size() < 2) {
            out.notes.push_back(tk + ": fewer than two managed periods");
            continue;
        }
        if (window == ScalingWindow::full) {
            const double su = sample_sd(u);
            if (!(su > 0.0)) {
                out.notes.push_back(tk + ": managed leg has zero variance");
                continue;
            }
            const double c = sample_sd(r) / su;
            out.c[static_cast<std::size_t>(j)] = c;
            for (std::size_t k = 0; k < rows.size(); ++k) {
                out.raw(rows[k], j) = r[k];
                out.managed(rows[k], j) = c * u[k];
            }
        } else {
            // c from strictly earlier periods; the first 8 periods only seed it
            constexpr std::size_t kSeed = 8;
            for (std::size_t k = kSeed; k < rows.size(); ++k) {
                const std::span<const double> rp(r.data(), k), up(u.data(), k);
                const double su = sample_sd(up);
                if (!(su > 0.0)) continue;
                const double c = sample_sd(rp) / su;
                out.raw(rows[k], j) = r[k];
                out.managed(rows[k], j) = c * u[k];
                out.c[static_cast<std::size_t>(j)] = c;
            }
        }
    }
    return out;
}

PortfolioMetrics portfolio_metrics(std::span<const double> x, double gamma) {
    PortfolioMetrics m;
    m.periods = x.size();
    if (x.empty()) return m;
    const double mu = mean(x);
    m.ann_return = mu * kPeriodsPerYear;
    double wealth = 1.0, peak = 1.0, dd = 0.0;
    for (double v : x) {
        wealth *= 1.0 + v;
        peak = std::max(peak, wealth);
        dd = std::min(dd, wealth / peak - 1.0);
    }
    m.final_wealth = wealth;
    m.max_drawdown = std::max(dd, -1.0);
    if (x.size() < 2) return m;
    double var = sample_variance(x);
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    if (std::sqrt(var) <= 1e-13 * scale) var = 0.0;  // constant path up to rounding
    m.ann_vol = std::sqrt(var * kPeriodsPerYear);
    if (m.ann_vol > 0.0) m.sharpe = m.ann_return / m.ann_vol;
    m.cer = m.ann_return - 0.5 * gamma * var * kPeriodsPerYear;
    return m;
}

std::vector<double> equal_weight(const Grid& cells) {
    std::vector<double> out(static_cast<std::size_t>(cells.rows()), kMissing);
    for (Eigen::Index e = 0; e < cells.rows(); ++e) {
        double s = 0.0;
        std::size_t n = 0;
        for (Eigen::Index j = 0; j < cells.cols(); ++j) {
            if (present(cells(e, j))) {
                s += cells(e, j);
                ++n;
            }
        }
        if (n > 0) out[static_cast<std::size_t>(e)] = s / static_cast<double>(n);
    }
    return out;
}

std::vector<PortfolioRow> regime_table(const std::string& portfolio, const std::vector<Date>& dates,
                                       std::span<const double> path, std::span<const double> vix,
                                       double gamma, std::size_t min_periods) {
    if (dates.size() != path.size() || vix.size() != path.size()) throw ConfigError("portfolio path is not aligned");
    const auto q = vix_quartile_grouping(vix);
    const auto crisis = crisis_grouping(dates);
    auto pick = [&](auto keep) {
        std::vector<double> sel;
        for (std::size_t e = 0; e < path.size(); ++e) {
            if (present(path[e]) && keep(e)) sel.push_back(path[e]);
        }
        return sel;
    };
    const std::vector<std::pair<std::string, std::vector<double>>> regimes{
        {"Full sample", pick([](std::size_t) { return true; })},
        {"Low VIX (Q1)", pick([&](std::size_t e) { return q.date_group[e] == 0; })},
        {"High VIX (Q4)", pick([&](std::size_t e) { return q.date_group[e] == 3; })},
        {"COVID 2020", pick([&](std::size_t e) { return crisis.date_group[e] == 1; })},
    };
    std::vector<PortfolioRow> rows;
    for (const auto& [name, sel] : regimes) {
        if (sel.size() < min_periods) continue;
        rows.push_back({name, portfolio, portfolio_metrics(sel, gamma)});
    }
    return rows;
}

}  // namespace vplab
