// synth.cpp

#include "vplab/synth.hpp"

#include "vplab/core.hpp"
#include "vplab/numeric.hpp"
#include "vplab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vplab {

std::string to_string(SynthKind k) {
    switch (k) {
        case SynthKind::arfima0d0: return "arfima0d0";
        case SynthKind::fgn: return "fgn";
        case SynthKind::fbm_path: return "fbm_path";
        case SynthKind::rough_logvol: return "rough_logvol";
        case SynthKind::garch11: return "garch11";
        case SynthKind::figarch1d1: return "figarch1d1";
    }
    return "?";
}

SynthKind synth_kind_from_string(const std::string& s) {
    for (auto k : {SynthKind::arfima0d0, SynthKind::fgn, SynthKind::fbm_path, SynthKind::rough_logvol,
                   SynthKind::garch11, SynthKind::figarch1d1}) {
        if (to_string(k) == s) return k;
    }
    throw ConfigError("unknown synthetic process kind '" + s + "'");
}

void SynthSpec::validate() const {
    if (T < 2) throw ConfigError("synthetic series length T must be >= 2");
    if (!(innovation_sd > 0.0)) throw ConfigError("innovation_sd must be > 0");
    if (embedding_padding < 1) throw ConfigError("embedding_padding must be >= 1");
    switch (kind) {
        case SynthKind::arfima0d0:
            if (!(d > -0.5 && d < 0.5)) throw ConfigError("ARFIMA(0,d,0) requires d in (-0.5, 0.5)");
            break;
        case SynthKind::fgn:
        case SynthKind::fbm_path:
        case SynthKind::rough_logvol:
            if (!(H > 0.0 && H < 1.0)) throw ConfigError("fGn/fBm require H in (0, 1)");
            break;
        case SynthKind::garch11:
            if (!(omega > 0.0) || alpha < 0.0 || beta < 0.0 || !(alpha + beta < 1.0)) {
                throw ConfigError("GARCH(1,1) requires omega > 0, alpha, beta >= 0, alpha + beta < 1");
            }
            break;
        case SynthKind::figarch1d1: {
            if (!(d > 0.0 && d < 1.0)) throw ConfigError("FIGARCH requires d in (0, 1)");
            if (!(omega > 0.0)) throw ConfigError("FIGARCH requires omega > 0");
            if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("FIGARCH requires beta in [0, 1)");
            const auto lambda = figarch_lambda(d, phi, beta, kFigarchLags);
            for (std::size_t k = 1; k < lambda.size(); ++k) {
                if (lambda[k] < -1e-12) {
                    throw ConfigError("FIGARCH weights negative at lag " + std::to_string(k) +
                                      " (non-negativity violated)");
                }
            }
            break;
        }
    }
}

std::vector<double> arfima_autocovariance(double d, double sigma2, std::size_t max_lag) {
    std::vector<double> g(max_lag + 1);
    g[0] = sigma2 * std::exp(std::lgamma(1.0 - 2.0 * d) - 2.0 * std::lgamma(1.0 - d));
    for (std::size_t k = 1; k <= max_lag; ++k) {
        const auto kd = static_cast<double>(k);
        g[k] = g[k - 1] * (kd - 1.0 + d) / (kd - d);
    }
    return g;
}

std::vector<double> fgn_autocovariance(double H, double sigma2, std::size_t max_lag) {
    std::vector<double> g(max_lag + 1);
    const double two_h = 2.0 * H;
    for (std::size_t k = 0; k <= max_lag; ++k) {
        const auto kd = static_cast<double>(k);
        g[k] = 0.5 * sigma2 *
               (std::pow(kd + 1.0, two_h) - 2.0 * std::pow(kd, two_h) + std::pow(std::abs(kd - 1.0), two_h));
    }
    return g;
}

std::vector<double> circulant_embedding_sample(const AutocovFn& acov, std::size_t T, std::size_t padding,
                                               std::uint64_t seed) {
    if (T < 2) throw ConfigError("circulant embedding needs T >= 2");
    std::size_t m = fast_fft_size(2 * (T - 1) * padding);
    while (m % 2 != 0) m = fast_fft_size(m + 1);
    const std::size_t half = m / 2;

    const auto g = acov(half);
    std::vector<double> row(m);
    for (std::size_t k = 0; k <= half; ++k) row[k] = g[k];
    for (std::size_t k = half + 1; k < m; ++k) row[k] = g[m - k];

    const auto spec = rfft(row);
    std::vector<double> eig(m);
    double max_eig = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        eig[k] = (k <= half ? spec[k] : spec[m - k]).real();
        max_eig = std::max(max_eig, eig[k]);
    }
    for (double& e : eig) {
        if (e < -1e-8 * max_eig) {
            throw InternalError("circulant embedding is not positive semi-definite; increase embedding_padding");
        }
        e = std::max(e, 0.0);
    }

    Philox rng(seed);
    std::vector<cplx> z(m);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double a = rng.normal();
        const double b = rng.normal();
        z[k] = std::sqrt(eig[k] * inv_m) * cplx(a, b);
    }
    const auto y = fft(z);
    std::vector<double> out(T);
    for (std::size_t t = 0; t < T; ++t) out[t] = y[t].real();
    return out;
}

std::vector<double> simulate_long_memory(const SynthSpec& spec) {
    spec.validate();
    const double sigma2 = spec.innovation_sd * spec.innovation_sd;
    switch (spec.kind) {
        case SynthKind::arfima0d0:
            return circulant_embedding_sample(
                [&](std::size_t lag) { return arfima_autocovariance(spec.d, sigma2, lag); }, spec.T,
                spec.embedding_padding, spec.seed);
        case SynthKind::fgn:
        case SynthKind::fbm_path:
        case SynthKind::rough_logvol: {
            auto x = circulant_embedding_sample([&](std::size_t lag) { return fgn_autocovariance(spec.H, sigma2, lag); },
                                                spec.T, spec.embedding_padding, spec.seed);
            if (spec.kind == SynthKind::fgn) return x;
            std::partial_sum(x.begin(), x.end(), x.begin());
            if (spec.kind == SynthKind::fbm_path) return x;
            for (double& v : x) v = std::exp(spec.mu + spec.nu * v);
            return x;
        }
        default:
            throw ConfigError("simulate_long_memory does not handle kind " + to_string(spec.kind));
    }
}

std::vector<double> figarch_lambda(double d, double phi, double beta, std::size_t lags) {
    // (1 - L)^d = sum delta_k L^k ; (1 - phi L)(1 - L)^d = sum c_k L^k ;
    // psi = c / (1 - beta L) ; lambda = 1 - psi.
    std::vector<double> lambda(lags + 1, 0.0);
    double delta_prev = 1.0;
    double psi_prev = 1.0;
    for (std::size_t k = 1; k <= lags; ++k) {
        const auto kd = static_cast<double>(k);
        const double delta = delta_prev * (kd - 1.0 - d) / kd;
        const double c = delta - phi * delta_prev;
        const double psi = c + beta * psi_prev;
        lambda[k] = -psi;
        delta_prev = delta;
        psi_prev = psi;
    }
    return lambda;
}

CondVolPath simulate_conditional_vol(const SynthSpec& spec) {
    spec.validate();
    Philox rng(spec.seed);
    const std::size_t total = spec.T + kCondVolBurnIn;
    CondVolPath path;
    path.returns.reserve(spec.T);
    path.variance.reserve(spec.T);

    if (spec.kind == SynthKind::garch11) {
        double h = spec.omega / (1.0 - spec.alpha - spec.beta);
        for (std::size_t t = 0; t < total; ++t) {
            const double eps = std::sqrt(h) * rng.normal();
            if (t >= kCondVolBurnIn) {
                path.returns.push_back(eps);
                path.variance.push_back(h);
            }
            h = spec.omega + spec.alpha * eps * eps + spec.beta * h;
        }
        return path;
    }
    if (spec.kind != SynthKind::figarch1d1) {
        throw ConfigError("simulate_conditional_vol does not handle kind " + to_string(spec.kind));
    }

    const auto lambda = figarch_lambda(spec.d, spec.phi, spec.beta, kFigarchLags);
    const double weight_sum = std::accumulate(lambda.begin(), lambda.end(), 0.0);
    const double base = spec.omega / (1.0 - spec.beta);
    const double presample = base / (1.0 - weight_sum);

    // ring buffer of the last kFigarchLags squared shocks; hist[(t - k) mod L]
    const std::size_t L = kFigarchLags;
    std::vector<double> hist(L, presample);
    for (std::size_t t = 0; t < total; ++t) {
        double h = base;
        for (std::size_t k = 1; k <= L; ++k) h += lambda[k] * hist[(t + L - k) % L];
        const double eps = std::sqrt(h) * rng.normal();
        hist[t % L] = eps * eps;
        if (t >= kCondVolBurnIn) {
            path.returns.push_back(eps);
            path.variance.push_back(h);
        }
    }
    return path;
}

}  // namespace vplab
