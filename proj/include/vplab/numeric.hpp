// numeric.hpp
// Small numerical toolbox shared by the estimators: FFTW wrappers, order
// statistics, moments, a simple-regression helper and Nelder-Mead.

#pragma once

#include <complex>
#include <cstddef>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace vplab {

// ----------------------------------------------------------------------------
// FFT (FFTW3 backed; plans cached per size, execution is thread-safe)
// ----------------------------------------------------------------------------

using cplx = std::complex<double>;

/// Forward real-to-complex DFT, X_k = sum_t x_t exp(-2 pi i k t / n), k = 0..n/2.
std::vector<cplx> rfft(std::span<const double> x);
/// Inverse of rfft for a length-n signal, including the 1/n factor.
std::vector<double> irfft(std::span<const cplx> spectrum, std::size_t n);
/// Forward complex DFT (unnormalised).
std::vector<cplx> fft(std::span<const cplx> x);
/// Linear convolution of a and b (length a.size() + b.size() - 1).
std::vector<double> fft_convolve(std::span<const double> a, std::span<const double> b);
/// Smallest n' >= n whose only prime factors are 2, 3, 5 and 7.
std::size_t fast_fft_size(std::size_t n);

// ----------------------------------------------------------------------------
// Descriptive statistics (inputs assumed free of missing values)
// ----------------------------------------------------------------------------

double mean(std::span<const double> x);
/// Unbiased (n-1) sample variance; NaN when n < 2.
double sample_variance(std::span<const double> x);
double sample_sd(std::span<const double> x);
/// Moment skewness m3 / m2^1.5; NaN when n < 3 or m2 == 0.
double skewness(std::span<const double> x);
/// Moment excess kurtosis m4 / m2^2 - 3; NaN when n < 4 or m2 == 0.
double excess_kurtosis(std::span<const double> x);

/// Percentile with linear interpolation between order statistics
/// (position h = (n-1) p on the sorted sample). `sorted` must be ascending.
double percentile_sorted(std::span<const double> sorted, double p);
double percentile(std::span<const double> x, double p);

struct SimpleFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;  // classical OLS standard error; NaN when n < 3
    double r2 = 0.0;
};

/// OLS of y on (1, x).
SimpleFit simple_regression(std::span<const double> x, std::span<const double> y);

// ----------------------------------------------------------------------------
// Nelder-Mead
// ----------------------------------------------------------------------------

struct NelderMeadOptions {
    double initial_step = 0.25;
    double f_tol = 1e-10;     // stop when simplex f-spread falls below this
    double x_tol = 1e-7;      // ... and the simplex diameter below this
    std::size_t max_evals = 4000;
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    std::size_t evals = 0;
    bool converged = false;
};

/// Minimises f from x0. Non-finite objective values are treated as +inf.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opt = {});

// ----------------------------------------------------------------------------
// Quasi-Newton (BFGS with central-difference gradients)
// ----------------------------------------------------------------------------

struct QuasiNewtonOptions {
    double grad_tol = 1e-6;   // stop when max |df/dx_i| falls below this
    double fd_step = 1e-5;    // relative central-difference step
    std::size_t max_iter = 200;
};

struct QuasiNewtonResult {
    std::vector<double> x;
    double fx = 0.0;
    double grad_norm = 0.0;  // max-norm of the final gradient
    std::size_t iterations = 0;
    bool converged = false;
};

std::vector<double> numerical_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> x, double step = 1e-5);

/// BFGS with an Armijo backtracking line search. Used to polish a Nelder-Mead
/// optimum down to a gradient tolerance.
QuasiNewtonResult quasi_newton(const std::function<double(std::span<const double>)>& f, std::vector<double> x0,
                               const QuasiNewtonOptions& opt = {});

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace vplab
