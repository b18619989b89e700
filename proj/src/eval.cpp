// eval.cpp

#include "vplab/eval.hpp"

#include "vplab/numeric.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace vplab {

std::string to_string(LossKind k) { return k == LossKind::mse_log ? "mse_log" : "qlike"; }

double mse_log_loss(double y, double yhat) { return (y - yhat) * (y - yhat); }

double qlike_loss(double y, double yhat) { return yhat + std::exp(y - yhat); }

std::size_t LossPanel::cell_count() const {
    std::size_t n = 0;
    for (Eigen::Index k = 0; k < cells.size(); ++k) n += present(cells.data()[k]);
    return n;
}

double LossPanel::pooled_mean() const {
    double s = 0.0;
    std::size_t n = 0;
    for (Eigen::Index e = 0; e < cells.rows(); ++e) {
        for (Eigen::Index i = 0; i < cells.cols(); ++i) {
            if (present(cells(e, i))) {
                s += cells(e, i);
                ++n;
            }
        }
    }
    return n > 0 ? s / static_cast<double>(n) : kMissing;
}

LossPanel compute_losses(const ForecastSet& f, LossKind kind) {
    LossPanel out;
    out.model = f.model;
    out.horizon = f.horizon;
    out.kind = kind;
    out.dates = f.dates;
    out.stocks = f.stocks;
    out.cells = Grid::Constant(f.y_pred.rows(), f.y_pred.cols(), kMissing);
    out.date_mean.assign(f.dates.size(), kMissing);
    for (Eigen::Index e = 0; e < f.y_pred.rows(); ++e) {
        double s = 0.0;
        std::size_t n = 0;
        for (Eigen::Index i = 0; i < f.y_pred.cols(); ++i) {
            const double y = f.y_true(e, i), p = f.y_pred(e, i);
            if (is_missing(y) && is_missing(p)) continue;
            if (!std::isfinite(y) || !std::isfinite(p)) {
                ++out.excluded;
                continue;
            }
            const double l = kind == LossKind::mse_log ? mse_log_loss(y, p) : qlike_loss(y, p);
            out.cells(e, i) = l;
            s += l;
            ++n;
        }
        if (n > 0) out.date_mean[static_cast<std::size_t>(e)] = s / static_cast<double>(n);
    }
    return out;
}

NeweyWest newey_west_variance(std::span<const double> x, std::size_t B) {
    const std::size_t T = x.size();
    if (T <= B || T < 2) throw ConfigError("Newey-West needs more observations than the bandwidth");
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(T);
    auto gamma = [&](std::size_t l) {
        double s = 0.0;
        for (std::size_t t = l; t < T; ++t) s += (x[t] - m) * (x[t - l] - m);
        return s / static_cast<double>(T);
    };
    NeweyWest out;
    const double g0 = gamma(0);
    out.omega = g0;
    for (std::size_t l = 1; l <= B; ++l) {
        out.omega += 2.0 * (1.0 - static_cast<double>(l) / static_cast<double>(B + 1)) * gamma(l);
    }
    if (!(out.omega > 0.0)) {
        out.omega = g0;
        out.fallback = true;
    }
    out.variance_of_mean = out.omega / static_cast<double>(T);
    return out;
}

double hln_factor(std::size_t T, std::size_t k) {
    const auto t = static_cast<double>(T), kk = static_cast<double>(k);
    return std::sqrt((t + 1.0 - 2.0 * kk + kk * (kk - 1.0) / t) / t);
}

namespace {

void check_aligned(const LossPanel& a, const LossPanel& b) {
    if (a.dates != b.dates || a.stocks != b.stocks || a.cells.rows() != b.cells.rows() ||
        a.cells.cols() != b.cells.cols()) {
        throw DataError("loss panels " + a.model + " and " + b.model + " are not on the same index");
    }
    for (Eigen::Index k = 0; k < a.cells.size(); ++k) {
        if (present(a.cells.data()[k]) != present(b.cells.data()[k])) {
            throw DataError("loss panels " + a.model + " and " + b.model + " cover different (date, ticker) cells");
        }
    }
}

/// Per-date mean differential over dates that have cells.
std::pair<std::vector<Date>, std::vector<double>> date_differentials(const LossPanel& a, const LossPanel& b) {
    check_aligned(a, b);
    std::vector<Date> dates;
    std::vector<double> d;
    for (Eigen::Index e = 0; e < a.cells.rows(); ++e) {
        double s = 0.0;
        std::size_t n = 0;
        for (Eigen::Index i = 0; i < a.cells.cols(); ++i) {
            if (is_missing(a.cells(e, i))) continue;
            s += a.cells(e, i) - b.cells(e, i);
            ++n;
        }
        if (n == 0) continue;
        dates.push_back(a.dates[static_cast<std::size_t>(e)]);
        d.push_back(s / static_cast<double>(n));
    }
    return {dates, d};
}

double two_sided_t(double stat, double dof) {
    if (!std::isfinite(stat)) return 0.0;
    const boost::math::students_t dist(dof);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(stat)));
}

}  // namespace

namespace {

double ratio_or_zero(double num, double den) {
    if (den > 0.0) return num / den;
    return num == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), num);
}

}  // namespace

DMResult dm_hln(const LossPanel& A, const LossPanel& B, int horizon, std::size_t min_dates) {
    if (horizon < 1) throw ConfigError("forecast horizon must be >= 1");
    const auto [dates, d] = date_differentials(A, B);
    DMResult out;
    out.T = d.size();
    if (out.T < std::max<std::size_t>(min_dates, 2)) {
        throw DataError("Diebold-Mariano needs at least " + std::to_string(min_dates) + " evaluation dates");
    }
    out.k = static_cast<std::size_t>((horizon + 4) / 5);
    out.bandwidth = out.k - 1;
    double m = 0.0;
    for (double v : d) m += v;
    m /= static_cast<double>(out.T);
    out.mean_differential = m;
    const auto nw = newey_west_variance(d, out.bandwidth);
    out.nw_fallback = nw.fallback;
    out.plain = ratio_or_zero(m, std::sqrt(nw.variance_of_mean));
    out.statistic = out.plain * hln_factor(out.T, out.k);
    out.p_value = two_sided_t(out.statistic, static_cast<double>(out.T - 1));

    // pooled cells treated as independent draws
    std::vector<double> cells;
    for (Eigen::Index k = 0; k < A.cells.size(); ++k) {
        if (present(A.cells.data()[k])) cells.push_back(A.cells.data()[k] - B.cells.data()[k]);
    }
    const double sd = sample_sd(cells);
    out.pooled_cell_statistic = ratio_or_zero(mean(cells), sd / std::sqrt(static_cast<double>(cells.size())));
    return out;
}

CumulativeDifferential cumulative_loss_differential(const LossPanel& A, const LossPanel& B) {
    CumulativeDifferential out;
    std::tie(out.dates, out.differential) = date_differentials(A, B);
    double run = 0.0;
    for (double v : out.differential) {
        run += v;
        out.cumulative.push_back(run);
    }
    return out;
}

// ---------------------------------------------------------------------------

int CellGrouping::group(std::size_t date, std::size_t stock) const {
    return date_group.empty() ? stock_group[stock] : date_group[date];
}

CellGrouping vix_quartile_grouping(std::span<const double> vix) {
    CellGrouping g;
    g.name = "vix_quartile";
    g.labels = {"Q1", "Q2", "Q3", "Q4"};
    std::vector<double> avail;
    for (double v : vix) {
        if (present(v)) avail.push_back(v);
    }
    if (avail.empty()) throw DataError("no VIX values on the evaluation dates");
    const double b1 = percentile(avail, 0.25), b2 = percentile(avail, 0.5), b3 = percentile(avail, 0.75);
    for (double v : vix) {
        if (is_missing(v)) {
            g.date_group.push_back(-1);
            continue;
        }
        g.date_group.push_back((v > b1) + (v > b2) + (v > b3));
    }
    return g;
}

CellGrouping crisis_grouping(const std::vector<Date>& dates) {
    CellGrouping g;
    g.name = "crisis_window";
    g.labels = {"GFC", "COVID", "Other"};
    const Date gfc0 = Date::from_ymd(2008, 7, 1), gfc1 = Date::from_ymd(2009, 12, 31);
    const Date cov0 = Date::from_ymd(2020, 3, 1), cov1 = Date::from_ymd(2020, 12, 31);
    for (const auto& d : dates) {
        if (gfc0 <= d && d <= gfc1) g.date_group.push_back(0);
        else if (cov0 <= d && d <= cov1) g.date_group.push_back(1);
        else g.date_group.push_back(2);
    }
    return g;
}

CellGrouping sector_grouping(const std::vector<std::string>& stock_sector) {
    CellGrouping g;
    g.name = "sector";
    g.labels = stock_sector;
    std::sort(g.labels.begin(), g.labels.end());
    g.labels.erase(std::unique(g.labels.begin(), g.labels.end()), g.labels.end());
    for (const auto& s : stock_sector) {
        g.stock_group.push_back(static_cast<int>(std::lower_bound(g.labels.begin(), g.labels.end(), s) - g.labels.begin()));
    }
    return g;
}

CellGrouping liquidity_grouping(const std::vector<int>& halves) {
    CellGrouping g;
    g.name = "liquidity_half";
    g.labels = {"Liquid", "Illiquid"};
    g.stock_group = halves;
    return g;
}

CellGrouping date_grouping(const std::vector<Date>& dates) {
    CellGrouping g;
    g.name = "date";
    for (std::size_t e = 0; e < dates.size(); ++e) {
        g.labels.push_back(dates[e].iso());
        g.date_group.push_back(static_cast<int>(e));
    }
    return g;
}

std::vector<SplitRow> split_report(const LossPanel& A, const LossPanel& M, const CellGrouping& g,
                                   std::vector<std::string>* omitted) {
    check_aligned(A, M);
    if (!g.date_group.empty() && g.date_group.size() != A.dates.size()) {
        throw ConfigError("grouping '" + g.name + "' does not cover the evaluation dates");
    }
    if (g.date_group.empty() && g.stock_group.size() != A.stocks.size()) {
        throw ConfigError("grouping '" + g.name + "' does not cover the tickers");
    }
    const std::size_t G = g.labels.size();
    std::vector<double> sa(G, 0.0), sm(G, 0.0);
    std::vector<std::size_t> n(G, 0);
    for (Eigen::Index e = 0; e < A.cells.rows(); ++e) {
        for (Eigen::Index i = 0; i < A.cells.cols(); ++i) {
            if (is_missing(A.cells(e, i))) continue;
            const int k = g.group(static_cast<std::size_t>(e), static_cast<std::size_t>(i));
            if (k < 0) continue;
            sa[static_cast<std::size_t>(k)] += A.cells(e, i);
            sm[static_cast<std::size_t>(k)] += M.cells(e, i);
            ++n[static_cast<std::size_t>(k)];
        }
    }
    std::vector<SplitRow> rows;
    for (std::size_t k = 0; k < G; ++k) {
        if (n[k] == 0) {
            if (omitted != nullptr) omitted->push_back(g.name + "/" + g.labels[k] + ": no cells");
            continue;
        }
        SplitRow r;
        r.grouping = g.name;
        r.group = g.labels[k];
        r.model = M.model;
        r.horizon = M.horizon;
        r.cells = n[k];
        r.loss_benchmark = sa[k] / static_cast<double>(n[k]);
        r.loss_model = sm[k] / static_cast<double>(n[k]);
        r.improvement_pct = 100.0 * (r.loss_benchmark - r.loss_model) / r.loss_benchmark;
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------------------

ImportanceResult pooled_importance(const FeaturePanel& f, int horizon, std::size_t first_date,
                                   const std::vector<std::string>& columns, CvOptions cv) {
    const auto ycol = f.column_index(target_column(horizon));
    std::vector<Eigen::Index> cols;
    for (const auto& c : columns) cols.push_back(f.column_index(c));
    std::vector<std::size_t> rows;
    for (std::size_t s = first_date; s < f.dates.size(); ++s) {
        for (std::size_t i = 0; i < f.stocks.size(); ++i) {
            const auto r = f.row(i, s);
            bool ok = present(f.values(static_cast<Eigen::Index>(r), ycol));
            for (auto c : cols) ok = ok && present(f.values(static_cast<Eigen::Index>(r), c));
            if (ok) rows.push_back(r);
        }
    }
    if (rows.size() < columns.size() + 2) throw EstimationError("too few complete rows for pooled importance");
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    std::vector<double> y(rows.size()), t(rows.size()), end(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto r = static_cast<Eigen::Index>(rows[k]);
        for (std::size_t j = 0; j < cols.size(); ++j) X(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = f.values(r, cols[j]);
        y[k] = f.values(r, ycol);
        t[k] = static_cast<double>(f.day_index[f.row_date[rows[k]]]);
        end[k] = t[k] + horizon;
    }
    const auto sel = cross_validate_lambda(X, y, t, end, EstimatorKind::lasso, 1.0, cv);
    const auto fit = fit_shrinkage(X, y, EstimatorKind::lasso, sel.lambda, 1.0, cv.solver);
    ImportanceResult out;
    out.columns = columns;
    out.coefficients.assign(fit.beta.data(), fit.beta.data() + fit.beta.size());
    out.lambda = sel.lambda;
    out.n_rows = rows.size();
    return out;
}

}  // namespace vplab
