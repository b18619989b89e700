// condvol.cpp

#include "vplab/condvol.hpp"

#include "vplab/numeric.hpp"
#include "vplab/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace vplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093453;  // log(2 pi)
constexpr double kPhiBound = 0.99;

bool admissible(const std::vector<double>& lambda) {
    double sum = 0.0;
    for (std::size_t k = 1; k < lambda.size(); ++k) {
        if (lambda[k] < -1e-12) return false;
        sum += lambda[k];
    }
    return sum < 1.0;
}

// Convolution of the lambda weights with a fixed squared-residual series.
// The transform of the padded eps^2 is computed once; each likelihood
// evaluation then costs one forward and one inverse real FFT.
class LambdaConvolver {
public:
    LambdaConvolver(std::span<const double> eps, double presample, std::size_t lags)
        : T_(eps.size()), L_(lags), n_(fast_fft_size(lags + eps.size())) {
        std::vector<double> ext(n_, 0.0);
        std::fill(ext.begin(), ext.begin() + static_cast<long>(L_), presample);
        for (std::size_t t = 0; t < T_; ++t) ext[L_ + t] = eps[t] * eps[t];
        spectrum_ = rfft(ext);
    }

    /// sum_{k=1..L} lambda_k eps^2_{t-k} for t = 0..T-1.
    std::vector<double> apply(const std::vector<double>& lambda) const {
        std::vector<double> padded(n_, 0.0);
        std::copy(lambda.begin(), lambda.end(), padded.begin());
        auto spec = rfft(padded);
        for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= spectrum_[k];
        auto full = irfft(spec, n_);
        // indices >= L are free of circular wrap because n >= L + T
        return {full.begin() + static_cast<long>(L_), full.begin() + static_cast<long>(L_ + T_)};
    }

private:
    std::size_t T_, L_, n_;
    std::vector<cplx> spectrum_;
};

FigarchParams figarch_from_theta(std::span<const double> th) {
    return {std::exp(th[0]), logistic(th[1]), kPhiBound * (2.0 * logistic(th[2]) - 1.0), logistic(th[3])};
}

std::vector<double> figarch_to_theta(const FigarchParams& p) {
    return {std::log(p.omega), logit(p.d), logit(0.5 * (p.phi / kPhiBound + 1.0)), logit(p.beta)};
}

struct Optimum {
    std::vector<double> theta;
    double f = kInf;
    bool converged = false;
    double grad_norm = kInf;
    std::vector<double> start_f;
};

// Nelder-Mead from every start, BFGS polish of the best.
Optimum multi_start(const std::function<double(std::span<const double>)>& objective,
                    const std::vector<std::vector<double>>& starts, const FitOptions& opt) {
    Optimum best;
    NelderMeadOptions nm;
    nm.max_evals = opt.nm_max_evals;
    nm.initial_step = 0.3;
    nm.f_tol = 1e-12;
    nm.x_tol = 1e-6;
    for (const auto& s : starts) {
        const double f0 = objective(s);
        if (!std::isfinite(f0)) continue;
        best.start_f.push_back(f0);
        const auto res = nelder_mead(objective, s, nm);
        if (res.fx < best.f) {
            best.f = res.fx;
            best.theta = res.x;
        }
    }
    if (best.theta.empty()) return best;
    QuasiNewtonOptions qn;
    qn.grad_tol = opt.grad_tol;
    qn.max_iter = 300;
    const auto polished = quasi_newton(objective, best.theta, qn);
    if (polished.fx <= best.f) {
        best.theta = polished.x;
        best.f = polished.fx;
    }
    best.grad_norm = polished.grad_norm;
    best.converged = polished.converged;
    return best;
}

void require_finite(std::span<const double> x, const char* who) {
    for (double v : x) {
        if (!std::isfinite(v)) throw DataError(std::string(who) + ": returns contain a non-finite value");
    }
}

}  // namespace

std::vector<double> figarch_filter(std::span<const double> eps, const FigarchParams& p, double presample,
                                   std::size_t lags) {
    const auto lambda = figarch_lambda(p.d, p.phi, p.beta, lags);
    LambdaConvolver conv(eps, presample, lags);
    auto h = conv.apply(lambda);
    const double base = p.omega / (1.0 - p.beta);
    for (double& v : h) v += base;
    return h;
}

double gaussian_loglik(std::span<const double> eps, std::span<const double> h) {
    double ll = 0.0;
    for (std::size_t t = 0; t < eps.size(); ++t) {
        if (!(h[t] > 0.0) || !std::isfinite(h[t])) return -kInf;
        ll -= 0.5 * (kLog2Pi + std::log(h[t]) + eps[t] * eps[t] / h[t]);
    }
    return ll;
}

FigarchFit fit_figarch(std::span<const double> returns, const FitOptions& opt) {
    if (returns.size() < 1000) throw DataError("FIGARCH fit needs at least 1000 observations");
    require_finite(returns, "FIGARCH fit");

    FigarchFit fit;
    {
        const auto ar = simple_regression(returns.first(returns.size() - 1), returns.subspan(1));
        fit.mu = ar.intercept;
        fit.ar1 = ar.slope;
    }
    std::vector<double> eps(returns.size() - 1);
    for (std::size_t t = 1; t < returns.size(); ++t) eps[t - 1] = returns[t] - fit.mu - fit.ar1 * returns[t - 1];
    const double presample = std::inner_product(eps.begin(), eps.end(), eps.begin(), 0.0) / eps.size();
    const auto T = static_cast<double>(eps.size());

    LambdaConvolver conv(eps, presample, opt.lags);
    auto objective = [&](std::span<const double> th) {
        const auto p = figarch_from_theta(th);
        const auto lambda = figarch_lambda(p.d, p.phi, p.beta, opt.lags);
        if (!admissible(lambda)) return kInf;
        auto h = conv.apply(lambda);
        const double base = p.omega / (1.0 - p.beta);
        for (double& v : h) v += base;
        return -gaussian_loglik(eps, h) / T;
    };

    static constexpr std::array<std::array<double, 3>, 5> kStarts{{
        {0.30, 0.20, 0.40},
        {0.45, 0.25, 0.60},
        {0.20, 0.10, 0.25},
        {0.60, 0.30, 0.70},
        {0.35, 0.05, 0.30},
    }};
    std::vector<std::vector<double>> starts;
    for (const auto& [d, phi, beta] : kStarts) {
        const auto lambda = figarch_lambda(d, phi, beta, opt.lags);
        const double wsum = std::accumulate(lambda.begin(), lambda.end(), 0.0);
        FigarchParams p{presample * (1.0 - beta) * std::max(1.0 - wsum, 1e-3), d, phi, beta};
        starts.push_back(figarch_to_theta(p));
    }
    const auto best = multi_start(objective, starts, opt);
    if (best.theta.empty()) throw EstimationError("FIGARCH fit: no starting point satisfies weight non-negativity");

    const auto p = figarch_from_theta(best.theta);
    fit.omega = p.omega;
    fit.d = p.d;
    fit.phi = p.phi;
    fit.beta = p.beta;
    fit.n_obs = eps.size();
    fit.loglik = -best.f * T;
    fit.aic = 2.0 * fit.n_params - 2.0 * fit.loglik;
    fit.bic = fit.n_params * std::log(T) - 2.0 * fit.loglik;
    fit.converged = best.converged;
    fit.grad_norm = best.grad_norm;
    for (double f : best.start_f) fit.start_logliks.push_back(-f * T);
    fit.h_path = conv.apply(figarch_lambda(p.d, p.phi, p.beta, opt.lags));
    for (double& v : fit.h_path) v += p.omega / (1.0 - p.beta);
    return fit;
}

// ----------------------------------------------------------------------------

std::vector<double> garch_filter(std::span<const double> eps, double omega, double alpha, double beta, double h0) {
    std::vector<double> h(eps.size());
    double prev = h0;
    for (std::size_t t = 0; t < eps.size(); ++t) {
        if (t > 0) prev = omega + alpha * eps[t - 1] * eps[t - 1] + beta * prev;
        h[t] = prev;
    }
    return h;
}

namespace {

constexpr double kPersistenceCap = 0.9999;

struct GarchParams {
    double omega, alpha, beta;
};

GarchParams garch_from_theta(std::span<const double> th) {
    const double pers = kPersistenceCap * logistic(th[1]);
    const double share = logistic(th[2]);
    return {std::exp(th[0]), pers * share, pers * (1.0 - share)};
}

}  // namespace

GarchFit fit_garch11(std::span<const double> returns, const FitOptions& opt) {
    if (returns.size() < 250) throw DataError("GARCH fit needs at least 250 observations");
    require_finite(returns, "GARCH fit");

    GarchFit fit;
    fit.mu = mean(returns);
    std::vector<double> eps(returns.size());
    for (std::size_t t = 0; t < eps.size(); ++t) eps[t] = returns[t] - fit.mu;
    const double s2 = sample_variance(returns);
    if (!(s2 > 0.0)) throw EstimationError("GARCH fit: returns have zero variance");
    const auto T = static_cast<double>(eps.size());

    auto objective = [&](std::span<const double> th) {
        const auto p = garch_from_theta(th);
        const auto h = garch_filter(eps, p.omega, p.alpha, p.beta, s2);
        return -gaussian_loglik(eps, h) / T;
    };
    static constexpr std::array<std::array<double, 2>, 5> kStarts{{
        {0.05, 0.90},
        {0.10, 0.80},
        {0.02, 0.97},
        {0.20, 0.50},
        {0.01, 0.10},
    }};
    std::vector<std::vector<double>> starts;
    for (const auto& [a, b] : kStarts) {
        const double pers = a + b;
        starts.push_back({std::log(s2 * (1.0 - pers)), logit(pers / kPersistenceCap), logit(a / pers)});
    }
    const auto best = multi_start(objective, starts, opt);
    if (best.theta.empty()) throw EstimationError("GARCH fit: no finite starting likelihood");

    const auto p = garch_from_theta(best.theta);
    fit.omega = p.omega;
    fit.alpha = p.alpha;
    fit.beta = p.beta;
    fit.loglik = -best.f * T;
    fit.aic = 2.0 * fit.n_params - 2.0 * fit.loglik;
    fit.bic = fit.n_params * std::log(T) - 2.0 * fit.loglik;
    fit.converged = best.converged;
    fit.grad_norm = best.grad_norm;
    fit.at_boundary = p.alpha < 1e-6 || p.beta < 1e-6 || p.alpha + p.beta > kPersistenceCap - 1e-6;
    for (double f : best.start_f) fit.start_logliks.push_back(-f * T);
    fit.h_path = garch_filter(eps, p.omega, p.alpha, p.beta, s2);
    fit.next_variance = p.omega + p.alpha * eps.back() * eps.back() + p.beta * fit.h_path.back();
    return fit;
}

double garch_mean_forecast(double omega, double alpha, double beta, double h_next, int horizon) {
    if (horizon < 1) throw ConfigError("forecast horizon must be >= 1");
    const double pers = alpha + beta;
    if (!(pers < 1.0)) throw ConfigError("GARCH forecast requires alpha + beta < 1");
    const double s2 = omega / (1.0 - pers);
    double sum = 0.0, decay = 1.0;
    for (int j = 1; j <= horizon; ++j) {
        sum += s2 + decay * (h_next - s2);
        decay *= pers;
    }
    return sum / horizon;
}

}  // namespace vplab
