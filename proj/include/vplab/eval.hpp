// eval.hpp
// Forecast losses, panel-aware Diebold-Mariano inference with the HLN
// correction, conditional (regime / sector / liquidity) splits, cumulative
// loss differentials and pooled lasso importance.

#pragma once

#include "vplab/features.hpp"
#include "vplab/ladder.hpp"
#include "vplab/models.hpp"

#include <span>
#include <string>
#include <vector>

namespace vplab {

enum class LossKind { mse_log, qlike };

std::string to_string(LossKind k);

double mse_log_loss(double y, double yhat);
/// Log-forecast QLIKE: yhat + exp(y - yhat), with y and yhat log variances.
double qlike_loss(double y, double yhat);

struct LossPanel {
    std::string model;
    int horizon = 1;
    LossKind kind = LossKind::mse_log;
    std::vector<Date> dates;
    std::vector<std::string> stocks;
    Grid cells;                      // dates x stocks, missing where no forecast
    std::vector<double> date_mean;   // cross-sectional mean per date
    std::size_t excluded = 0;        // non-finite forecasts dropped

    std::size_t cell_count() const;
    double pooled_mean() const;
};

LossPanel compute_losses(const ForecastSet& f, LossKind kind);

struct NeweyWest {
    double omega = 0.0;             // long-run variance
    double variance_of_mean = 0.0;  // omega / T
    bool fallback = false;          // omega <= 0, replaced by gamma_0
};

/// Bartlett-weighted long-run variance with biased (1/T) autocovariances.
NeweyWest newey_west_variance(std::span<const double> series, std::size_t bandwidth);

/// sqrt((T + 1 - 2k + k(k-1)/T) / T).
double hln_factor(std::size_t T, std::size_t k);

struct DMResult {
    double statistic = 0.0;  // HLN-corrected, positive = challenger better
    double plain = 0.0;      // uncorrected panel statistic
    double p_value = 1.0;    // two-sided, Student-t(T - 1)
    double pooled_cell_statistic = 0.0;  // i.i.d. over cells; illustrative only
    double mean_differential = 0.0;
    std::size_t T = 0;
    std::size_t bandwidth = 0;
    std::size_t k = 0;
    bool nw_fallback = false;
};

/// Benchmark A versus challenger B: d_t = cross-sectional mean of (L_A - L_B).
/// `min_dates` guards against tiny samples (10 by default).
DMResult dm_hln(const LossPanel& benchmark, const LossPanel& challenger, int horizon, std::size_t min_dates = 10);

/// Per-date cross-sectional mean differential (L_A - L_B) and its running sum.
struct CumulativeDifferential {
    std::vector<Date> dates;
    std::vector<double> differential, cumulative;
};
CumulativeDifferential cumulative_loss_differential(const LossPanel& benchmark, const LossPanel& challenger);

// ---------------------------------------------------------------------------
// Conditional splits

/// Group label per (date, stock) cell of a loss panel; -1 leaves the cell out.
struct CellGrouping {
    std::string name;
    std::vector<std::string> labels;
    std::vector<int> date_group;   // used when non-empty
    std::vector<int> stock_group;  // used when date_group is empty

    int group(std::size_t date, std::size_t stock) const;
};

/// Quartiles of the series over the given dates; ties at a breakpoint go to
/// the lower quartile. Labels Q1..Q4.
CellGrouping vix_quartile_grouping(std::span<const double> vix_on_dates);
/// GFC (2008-07-01 .. 2009-12-31), COVID (2020-03-01 .. 2020-12-31), Other.
CellGrouping crisis_grouping(const std::vector<Date>& dates);
CellGrouping sector_grouping(const std::vector<std::string>& stock_sector);
/// From liquidity_halves codes: 0 -> "Liquid", 1 -> "Illiquid".
CellGrouping liquidity_grouping(const std::vector<int>& halves);
/// Every date its own group.
CellGrouping date_grouping(const std::vector<Date>& dates);

struct SplitRow {
    std::string grouping, group, model;
    int horizon = 0;
    std::size_t cells = 0;
    double loss_benchmark = 0.0, loss_model = 0.0;
    double improvement_pct = 0.0;  // 100 (L_A - L_m) / L_A
};

/// One row per non-empty group; empty groups are reported in `omitted`.
std::vector<SplitRow> split_report(const LossPanel& benchmark, const LossPanel& model, const CellGrouping& grouping,
                                   std::vector<std::string>* omitted = nullptr);

// ---------------------------------------------------------------------------

struct ImportanceResult {
    std::vector<std::string> columns;
    std::vector<double> coefficients;  // standardized; exact zeros kept
    double lambda = 0.0;
    std::size_t n_rows = 0;
};

/// Lasso on standardized predictors pooled over every stock and every stride
/// date from `first_date` on, lambda by forward-chaining CV (one-SE rule by
/// default).
ImportanceResult pooled_importance(const FeaturePanel& f, int horizon, std::size_t first_date,
                                   const std::vector<std::string>& columns = kPredictorColumns,
                                   CvOptions cv = {.rule = CvRule::one_se});

}  // namespace vplab
