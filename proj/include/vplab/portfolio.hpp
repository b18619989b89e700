// portfolio.hpp
// Volatility-managed portfolios: each stock's five-day forward return scaled by
// c / forecast variance, equal-weighted across stocks, with annualized metrics.

#pragma once

#include "vplab/ingest.hpp"
#include "vplab/ladder.hpp"

#include <string>
#include <vector>

namespace vplab {

inline constexpr double kPeriodsPerYear = 252.0 / 5.0;

/// How c_i is fixed: over the whole evaluation window (matches the variance
/// identity exactly, with mild look-ahead) or from strictly earlier periods.
enum class ScalingWindow { full, expanding };

/// Five-day forward simple returns exp(r_t + ... + r_{t+4}) - 1 from stride
/// date day t, for each date of `dates` (day indices) x stock.
Grid forward_period_returns(const ReturnPanel& returns, const std::vector<std::size_t>& day_index, int days = 5);

/// Equal-weight forward returns over every evaluation date; depends only on
/// the return panel and the dates, never on a forecast.
std::vector<double> unmanaged_path(const ReturnPanel& returns, const std::vector<std::size_t>& day_index);

struct ManagedPanel {
    std::string model;
    std::vector<Date> dates;
    std::vector<std::string> stocks;
    Grid raw;      // forward returns on cells with a forecast
    Grid managed;  // c_i / exp(yhat) * raw
    std::vector<double> c;            // per stock, missing when excluded
    std::vector<std::string> notes;   // exclusions
};

/// Requires a 5-day forecast set. Cells without a forecast or a complete
/// forward return are missing in both legs.
ManagedPanel managed_returns(const ForecastSet& f, const ReturnPanel& returns,
                             ScalingWindow window = ScalingWindow::full);

struct PortfolioMetrics {
    std::size_t periods = 0;
    double ann_return = kMissing;
    double ann_vol = kMissing;
    double sharpe = kMissing;   // missing when the volatility is zero
    double max_drawdown = kMissing;
    double cer = kMissing;
    double final_wealth = kMissing;
};

/// Metrics of a per-period return path; gamma is the CER risk aversion.
PortfolioMetrics portfolio_metrics(std::span<const double> period_returns, double gamma = 5.0);

/// Equal-weight average across available stocks per period; missing when no
/// stock is available.
std::vector<double> equal_weight(const Grid& cells);

struct PortfolioRow {
    std::string regime, portfolio;
    PortfolioMetrics metrics;
};

/// Full window, VIX Q1, VIX Q4 and COVID rows for one path. Regimes with fewer
/// than `min_periods` periods are left out.
std::vector<PortfolioRow> regime_table(const std::string& portfolio, const std::vector<Date>& dates,
                                       std::span<const double> path, std::span<const double> vix_on_dates,
                                       double gamma = 5.0, std::size_t min_periods = 8);

}  // namespace vplab
