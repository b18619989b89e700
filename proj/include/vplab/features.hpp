// features.hpp
// The persistence feature vector and HAR block on the weekly stride grid:
// stock-level memory dynamics, cross-sectional and sector aggregates, market
// state, interactions and forecast targets.

#pragma once

#include "vplab/core.hpp"
#include "vplab/ingest.hpp"
#include "vplab/memest.hpp"

#include <map>
#include <string>
#include <vector>

namespace vplab {

/// Predictor columns in the fixed order used by every downstream table.
inline const std::vector<std::string> kPredictorColumns{
    "har_d_log", "har_w_log", "har_m_log", "ret_lag1",      "ret_lag1_abs", "d_gph",
    "delta_d_gph", "vol_d_gph", "trend_d_gph", "h",          "delta_h",      "cs_mean_d",
    "cs_std_d",  "sector_mean_d", "vix",     "move",         "d_x_vix",      "d_x_move"};

inline const std::vector<std::string> kAuxiliaryColumns{"cs_skew_d", "cs_kurt_d", "cs_share_d_gt_030",
                                                        "cs_range_d", "d_over_liq"};

inline const std::vector<int> kHorizons{1, 5, 22};

std::string target_column(int horizon);  // "y_h1", "y_h5", "y_h22"

struct FeatureConfig {
    std::size_t dynamics_window = 12;  // K stride points for vol/trend
    double tau = 0.30;                 // threshold for the share column
    MemoryEstimator estimator = MemoryEstimator::gph;  // source of the d_gph column
    std::size_t ret_lookback = 5;      // days searched back for ret_lag1
};

/// Long-format panel. Rows are ordered by ticker, then stride date.
struct FeaturePanel {
    std::vector<Date> dates;             // stride dates
    std::vector<std::size_t> day_index;  // daily row of each stride date
    std::vector<std::string> stocks;
    std::vector<std::string> stock_sector;
    std::vector<std::size_t> row_stock;  // index into stocks
    std::vector<std::size_t> row_date;   // index into dates
    std::vector<std::string> names;
    Grid values;  // rows x names

    std::size_t n_rows() const { return row_stock.size(); }
    Eigen::Index column_index(const std::string& name) const;  // ConfigError if absent
    bool has_column(const std::string& name) const;
    auto col(const std::string& name) { return values.col(column_index(name)); }
    auto col(const std::string& name) const { return values.col(column_index(name)); }
    std::size_t row(std::size_t stock, std::size_t date) const { return stock * dates.size() + date; }
};

/// Stride-level dynamics of one stock's estimate sequence.
struct Dynamics {
    Grid delta_d, vol_d, trend_d, delta_h;  // stride dates x stocks
};

/// delta = x_s - x_{s-1}; vol = sample sd of the last K values; trend = OLS
/// slope on the stride index over the last K values. Missing unless every
/// value involved is present.
Dynamics stock_dynamics(const Grid& d, const Grid& h, std::size_t K);

struct CrossSection {
    std::vector<double> mean, sd, skew, kurt, share_gt_tau, range;  // per stride date
    Grid sector_mean;  // stride dates x stocks (value of the stock's own sector)
};

CrossSection cross_sectional_and_sector(const Grid& d, const std::vector<std::string>& stock_sector, double tau);

/// HAR logs at daily row t: log RV_t, log mean RV_{t-4..t}, log mean RV_{t-21..t}.
struct HarLogs {
    double d, w, m;
};
HarLogs har_logs(std::span<const double> rv_column, std::size_t t);

FeaturePanel assemble_features(const MarketPanel& market, const VolPanel& vol, const ReturnPanel& returns,
                               const MemoryPanel& memory, const std::vector<TargetPanel>& targets,
                               const FeatureConfig& cfg = {});

/// Writes `date,ticker,<columns...>` in row order.
void write_feature_panel(const FeaturePanel& f, const std::string& path);
FeaturePanel read_feature_panel(const std::string& path);

}  // namespace vplab
