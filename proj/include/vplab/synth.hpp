// synth.hpp
// Synthetic processes with known parameters: exact Gaussian long-memory draws
// by circulant embedding (ARFIMA(0,d,0), fractional Gaussian noise, fBm, rough
// log-volatility) and GARCH(1,1) / FIGARCH(1,d,1) conditional-variance paths.
// These are the ground truth for every estimator test in the repository.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace vplab {

enum class SynthKind { arfima0d0, fgn, fbm_path, rough_logvol, garch11, figarch1d1 };

std::string to_string(SynthKind k);
SynthKind synth_kind_from_string(const std::string& s);

struct SynthSpec {
    SynthKind kind = SynthKind::arfima0d0;
    double d = 0.0;       // memory parameter (arfima, figarch)
    double H = 0.5;       // Hurst exponent (fgn, fbm, rough)
    double mu = 0.0;      // rough log-variance location
    double nu = 1.0;      // rough log-variance scale
    double omega = 0.1;
    double alpha = 0.0;
    double beta = 0.0;
    double phi = 0.0;
    std::size_t T = 1000;
    std::uint64_t seed = 0;
    double innovation_sd = 1.0;
    /// Circulant embedding covers this many multiples of T lags.
    std::size_t embedding_padding = 1;

    /// Throws ConfigError when parameters fall outside the model's domain.
    void validate() const;
};

/// ARFIMA(0,d,0) autocovariances gamma(0..max_lag) for innovation variance sigma2.
std::vector<double> arfima_autocovariance(double d, double sigma2, std::size_t max_lag);
/// Fractional Gaussian noise autocovariances gamma(0..max_lag).
std::vector<double> fgn_autocovariance(double H, double sigma2, std::size_t max_lag);

/// Exact stationary Gaussian sample of length T with the autocovariance
/// produced by `acov(max_lag)`. Throws InternalError when the circulant
/// embedding has a materially negative eigenvalue.
using AutocovFn = std::function<std::vector<double>(std::size_t max_lag)>;
std::vector<double> circulant_embedding_sample(const AutocovFn& acov, std::size_t T,
                                               std::size_t padding, std::uint64_t seed);

/// Gaussian long-memory and rough series for kinds arfima0d0, fgn, fbm_path
/// and rough_logvol (the last is a variance series exp(mu + nu * fBm)).
std::vector<double> simulate_long_memory(const SynthSpec& spec);

/// Truncated FIGARCH(1,d,1) ARCH(inf) weights lambda_0..lambda_{lags} of
/// 1 - (1 - phi L)(1 - L)^d / (1 - beta L); lambda_0 is always 0.
std::vector<double> figarch_lambda(double d, double phi, double beta, std::size_t lags = 1000);

inline constexpr std::size_t kFigarchLags = 1000;
inline constexpr std::size_t kCondVolBurnIn = 2000;

struct CondVolPath {
    std::vector<double> returns;
    std::vector<double> variance;  // true conditional variance h_t
};

/// GARCH(1,1) or FIGARCH(1,d,1) with standard-normal innovations.
CondVolPath simulate_conditional_vol(const SynthSpec& spec);

}  // namespace vplab
