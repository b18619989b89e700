// ladder.hpp
// Model ladder definitions and the expanding-window walk-forward engine.

#pragma once

#include "vplab/features.hpp"
#include "vplab/ingest.hpp"
#include "vplab/models.hpp"

#include <string>
#include <vector>

namespace vplab {

/// A, A1..A5, C, then the D family, in reporting order.
inline const std::vector<std::string> kModelIds{"A",  "A1", "A2", "A3", "A4", "A5",
                                                "C",  "D_lasso", "D_ridge", "D_en", "D_rf", "D_gbm"};

struct LadderConfig {
    double warmup_frac = 0.4;
    std::size_t d_refit_stride = 20;
    double en_alpha = 0.5;
    CvOptions cv;  // min-MSE rule for the D models
    TreeOptions trees;
    std::uint64_t seed = 1;

    void validate() const;
};

struct ModelSpec {
    std::string id;
    std::vector<std::string> columns;
    EstimatorKind kind = EstimatorKind::ols;
    double alpha = 0.5;
    std::size_t refit_stride = 1;
};

ModelSpec model_spec(const std::string& id, const LadderConfig& cfg = {});
bool is_linear_ladder_model(const std::string& id);

/// Forecasts and realized targets on the evaluation window, eval dates x stocks.
/// Cells are present in y_pred exactly where they are present in y_true.
struct ForecastSet {
    std::string model;
    int horizon = 1;
    std::vector<Date> dates;
    std::vector<std::size_t> day_index;
    std::vector<std::string> stocks;
    Grid y_pred, y_true;
    // diagnostics, one entry per evaluation date
    std::vector<std::size_t> fit_date;  // stride index of the fit in use
    std::vector<std::size_t> n_train;
    std::vector<double> lambda;
    std::size_t excluded_rows = 0;  // eligible training rows with a missing predictor

    std::size_t cell_count() const;
};

/// Index of the first evaluation stride date: floor(warmup_frac * S).
std::size_t warmup_dates(std::size_t n_dates, double warmup_frac);

/// Last stride index whose h-day target is fully observed at stride date s,
/// or -1 if none: max s' with day_index[s'] + h <= day_index[s].
long last_trainable(const std::vector<std::size_t>& day_index, std::size_t s, int h);

ForecastSet walk_forward(const FeaturePanel& f, const ModelSpec& model, int horizon, const LadderConfig& cfg = {});

/// Per-stock expanding-window GARCH(1,1) benchmark on daily returns, refit
/// every `refit_stride` evaluation dates: y_pred = log of the mean forecast
/// variance over the horizon. One set per horizon, indexed like the panel.
std::vector<ForecastSet> garch_benchmark(const FeaturePanel& f, const ReturnPanel& returns,
                                         const std::vector<int>& horizons, const LadderConfig& cfg = {});

void write_forecast_set(const ForecastSet& fs, const std::string& path);
/// Reads `date,ticker,y_true,y_pred` back onto the given panel index.
ForecastSet read_forecast_set(const std::string& path, const std::string& model, int horizon,
                              const FeaturePanel& index);

}  // namespace vplab
