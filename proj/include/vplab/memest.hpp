// memest.hpp
// Semiparametric long-memory estimation (GPH log-periodogram regression and
// local Whittle), Hurst estimation by moment scaling of increments, and the
// rolling engine producing weekly-stride memory panels.

#pragma once

#include "vplab/core.hpp"
#include "vplab/ingest.hpp"

#include <span>
#include <string>
#include <vector>

namespace vplab {

/// Ordinates at the Fourier frequencies lambda_j = 2 pi j / T, j = 1..floor(T/2).
struct Periodogram {
    std::vector<double> freq;
    std::vector<double> ordinate;
    std::size_t T = 0;
};

/// I(lambda_j) = |sum_t (x_t - xbar) exp(-i lambda_j t)|^2 / (2 pi T).
Periodogram periodogram(std::span<const double> series);

enum class MemoryEstimator { gph, local_whittle };

std::string to_string(MemoryEstimator e);
MemoryEstimator memory_estimator_from_string(const std::string& s);

struct MemoryEstimate {
    double d_hat = 0.0;
    double se = 0.0;
    MemoryEstimator estimator = MemoryEstimator::gph;
    std::size_t bandwidth = 0;
    std::size_t T = 0;
    std::size_t excluded = 0;   // zero ordinates dropped (GPH)
    bool at_boundary = false;   // optimum on the search-interval edge (LW)
};

/// floor(T^exponent), clamped to [2, floor(T/2)].
std::size_t default_bandwidth(std::size_t T, double exponent = 0.65);

/// GPH slope estimate: OLS of log I on log[4 sin^2(lambda/2)] over j = 1..m,
/// d = -slope, se = max(OLS slope se, pi / sqrt(24 m)).
MemoryEstimate estimate_gph(std::span<const double> series, std::size_t m);
MemoryEstimate estimate_gph(const Periodogram& pg, std::size_t m);

/// Local Whittle objective
/// R(d) = log(mean_j lambda_j^{2d} I_j) - 2d mean_j log lambda_j.
double local_whittle_objective(const Periodogram& pg, std::size_t m, double d);

inline constexpr double kLwLower = -0.49;
inline constexpr double kLwUpper = 0.99;

/// argmin of R over [-0.49, 0.99] by Brent's method; se = 1 / (2 sqrt m).
MemoryEstimate estimate_local_whittle(std::span<const double> series, std::size_t m);
MemoryEstimate estimate_local_whittle(const Periodogram& pg, std::size_t m);

/// Two-sided 5% test of d = 0 using the reported se.
bool is_significant(const MemoryEstimate& e);

struct HurstEstimate {
    double H_hat = 0.0;
    double q = 2.0;
    std::vector<std::size_t> lags;
    double r2 = 0.0;
};

inline const std::vector<std::size_t> kDefaultHurstLags{1, 2, 3, 5, 8, 13, 21};

/// m(q, D) = mean_t |x_{t+D} - x_t|^q; H = slope(log m on log D) / q.
HurstEstimate estimate_hurst(std::span<const double> x, const std::vector<std::size_t>& lags = kDefaultHurstLags,
                             double q = 2.0);

// ----------------------------------------------------------------------------

struct RollingConfig {
    std::size_t window = 750;
    std::size_t stride = 5;
    double bandwidth_exponent = 0.65;
    std::vector<std::size_t> hurst_lags = kDefaultHurstLags;
    double hurst_q = 2.0;
};

/// Weekly-stride panel of rolling estimates. Matrices are stride dates x stocks.
struct MemoryPanel {
    std::vector<Date> dates;          // stride dates
    std::vector<std::size_t> day_index;  // row of each stride date in the daily grid
    std::vector<std::string> stocks;
    Grid d_gph, se_gph, d_lw, se_lw, hurst;
    RollingConfig config;
    std::size_t bandwidth = 0;
    std::size_t gap_count = 0;  // (stock, date) cells skipped for missing data

    const Grid& d(MemoryEstimator e) const { return e == MemoryEstimator::gph ? d_gph : d_lw; }
};

/// Stride rows t = W-1, W-1+stride, ... (0-based) of the daily grid.
std::vector<std::size_t> stride_rows(std::size_t n_dates, std::size_t window, std::size_t stride);

/// At each stride date t, d_gph and d_lw on rv[t-W+1..t] and H on log rv over
/// the same window. Cells whose window contains a missing value are skipped.
MemoryPanel rolling_memory(const VolPanel& vol, const RollingConfig& cfg = {});

}  // namespace vplab
