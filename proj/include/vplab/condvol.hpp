// condvol.hpp
// Quasi-maximum-likelihood FIGARCH(1,d,1) with an AR(1) mean and
// constant-mean GARCH(1,1), plus the GARCH multi-step variance forecast.

#pragma once

#include "vplab/core.hpp"

#include <span>
#include <vector>

namespace vplab {

struct FigarchParams {
    double omega = 0.1;
    double d = 0.3;
    double phi = 0.2;
    double beta = 0.4;
};

struct FigarchFit {
    double mu = 0.0;   // AR(1) intercept
    double ar1 = 0.0;  // AR(1) slope
    double omega = 0.0, d = 0.0, phi = 0.0, beta = 0.0;
    double loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    int n_params = 6;
    std::size_t n_obs = 0;  // residuals entering the likelihood
    bool converged = false;
    double grad_norm = 0.0;
    std::vector<double> h_path;
    /// Log-likelihood at each feasible starting point, in start order.
    std::vector<double> start_logliks;
};

struct FitOptions {
    std::size_t lags = 1000;        // FIGARCH truncation
    std::size_t nm_max_evals = 1500;
    double grad_tol = 1e-6;         // on the per-observation negative log-likelihood
};

/// Conditional variances h_t = omega/(1-beta) + sum_{k=1..L} lambda_k eps^2_{t-k},
/// with eps^2 before the sample set to `presample`.
std::vector<double> figarch_filter(std::span<const double> eps, const FigarchParams& p, double presample,
                                   std::size_t lags = 1000);

/// Gaussian log-likelihood sum_t -0.5 (log 2 pi + log h_t + eps_t^2 / h_t);
/// -inf when any h_t is not strictly positive.
double gaussian_loglik(std::span<const double> eps, std::span<const double> h);

/// Two-step fit: AR(1) mean by OLS, then variance QMLE over (omega, d, phi, beta)
/// with 5 deterministic starts. Needs >= 1000 observations.
FigarchFit fit_figarch(std::span<const double> returns, const FitOptions& opt = {});

struct GarchFit {
    double mu = 0.0;
    double omega = 0.0, alpha = 0.0, beta = 0.0;
    double loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    int n_params = 4;
    bool converged = false;
    bool at_boundary = false;
    double grad_norm = 0.0;
    std::vector<double> h_path;
    double next_variance = 0.0;  // h_{T+1} given the whole sample
    std::vector<double> start_logliks;

    double persistence() const { return alpha + beta; }
};

/// h_0 = h0, h_t = omega + alpha eps^2_{t-1} + beta h_{t-1}.
std::vector<double> garch_filter(std::span<const double> eps, double omega, double alpha, double beta, double h0);

/// Constant-mean GARCH(1,1) QMLE with h_0 = sample variance. Needs >= 250
/// observations.
GarchFit fit_garch11(std::span<const double> returns, const FitOptions& opt = {});

/// (1/h) sum_{j=1..h} E[h_{t+j}] with E[h_{t+j}] = s2 + (alpha+beta)^{j-1}(h_{t+1} - s2),
/// s2 = omega / (1 - alpha - beta).
double garch_mean_forecast(double omega, double alpha, double beta, double h_next, int horizon);

}  // namespace vplab
