// numeric.cpp

#include "vplab/numeric.hpp"

#include "vplab/core.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>

namespace vplab {

namespace {

enum class PlanKind { r2c, c2r, c2c_forward };

// FFTW planning is not thread-safe; execution with the new-array interface is.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(PlanKind kind, std::size_t n) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_pair(static_cast<int>(kind), n);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        const int len = static_cast<int>(n);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan plan = nullptr;
        switch (kind) {
            case PlanKind::r2c: {
                std::vector<double> in(n);
                std::vector<fftw_complex> out(n / 2 + 1);
                plan = fftw_plan_dft_r2c_1d(len, in.data(), out.data(), flags);
                break;
            }
            case PlanKind::c2r: {
                std::vector<fftw_complex> in(n / 2 + 1);
                std::vector<double> out(n);
                plan = fftw_plan_dft_c2r_1d(len, in.data(), out.data(), flags);
                break;
            }
            case PlanKind::c2c_forward: {
                std::vector<fftw_complex> in(n), out(n);
                plan = fftw_plan_dft_1d(len, in.data(), out.data(), FFTW_FORWARD, flags);
                break;
            }
        }
        if (plan == nullptr) throw InternalError("FFTW failed to create a plan");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, std::size_t>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

std::vector<cplx> rfft(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<double> in(x.begin(), x.end());  // r2c may not preserve input
    std::vector<cplx> out(n / 2 + 1);
    fftw_execute_dft_r2c(plan_cache().get(PlanKind::r2c, n), in.data(), as_fftw(out.data()));
    return out;
}

std::vector<double> irfft(std::span<const cplx> spectrum, std::size_t n) {
    if (spectrum.size() != n / 2 + 1) throw InternalError("irfft: spectrum length mismatch");
    std::vector<cplx> in(spectrum.begin(), spectrum.end());  // c2r destroys input
    std::vector<double> out(n);
    fftw_execute_dft_c2r(plan_cache().get(PlanKind::c2r, n), as_fftw(in.data()), out.data());
    const double scale = 1.0 / static_cast<double>(n);
    for (double& v : out) v *= scale;
    return out;
}

std::vector<cplx> fft(std::span<const cplx> x) {
    const std::size_t n = x.size();
    std::vector<cplx> in(x.begin(), x.end());
    std::vector<cplx> out(n);
    fftw_execute_dft(plan_cache().get(PlanKind::c2c_forward, n), as_fftw(in.data()),
                     as_fftw(out.data()));
    return out;
}

std::size_t fast_fft_size(std::size_t n) {
    for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
        std::size_t r = m;
        for (std::size_t p : {2u, 3u, 5u, 7u}) {
            while (r % p == 0) r /= p;
        }
        if (r == 1) return m;
    }
}

std::vector<double> fft_convolve(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) return {};
    const std::size_t out_len = a.size() + b.size() - 1;
    const std::size_t n = fast_fft_size(out_len);
    std::vector<double> pa(n, 0.0), pb(n, 0.0);
    std::copy(a.begin(), a.end(), pa.begin());
    std::copy(b.begin(), b.end(), pb.begin());
    auto fa = rfft(pa);
    const auto fb = rfft(pb);
    for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
    auto out = irfft(fa, n);
    out.resize(out_len);
    return out;
}

// ----------------------------------------------------------------------------

double mean(std::span<const double> x) {
    if (x.empty()) return kMissing;
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
    if (x.size() < 2) return kMissing;
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

double sample_sd(std::span<const double> x) { return std::sqrt(sample_variance(x)); }

namespace {

struct Moments {
    double m2 = 0, m3 = 0, m4 = 0;
};

Moments central_moments(std::span<const double> x) {
    const double m = mean(x);
    Moments out;
    for (double v : x) {
        const double d = v - m;
        const double d2 = d * d;
        out.m2 += d2;
        out.m3 += d2 * d;
        out.m4 += d2 * d2;
    }
    const auto n = static_cast<double>(x.size());
    out.m2 /= n;
    out.m3 /= n;
    out.m4 /= n;
    return out;
}

}  // namespace

double skewness(std::span<const double> x) {
    if (x.size() < 3) return kMissing;
    const auto mo = central_moments(x);
    if (mo.m2 <= 0.0) return kMissing;
    return mo.m3 / std::pow(mo.m2, 1.5);
}

double excess_kurtosis(std::span<const double> x) {
    if (x.size() < 4) return kMissing;
    const auto mo = central_moments(x);
    if (mo.m2 <= 0.0) return kMissing;
    return mo.m4 / (mo.m2 * mo.m2) - 3.0;
}

double percentile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) return kMissing;
    if (p <= 0.0) return sorted.front();
    if (p >= 1.0) return sorted.back();
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double percentile(std::span<const double> x, double p) {
    std::vector<double> s(x.begin(), x.end());
    std::sort(s.begin(), s.end());
    return percentile_sorted(s, p);
}

SimpleFit simple_regression(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw EstimationError("simple_regression needs >= 2 paired points");
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0) throw EstimationError("simple_regression: regressor has no variation");
    SimpleFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    const double rss = std::max(0.0, syy - f.slope * sxy);
    f.r2 = syy > 0.0 ? 1.0 - rss / syy : 1.0;
    f.slope_se = n > 2 ? std::sqrt(rss / static_cast<double>(n - 2) / sxx) : kMissing;
    return f;
}

// ----------------------------------------------------------------------------

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opt) {
    const std::size_t n = x0.size();
    NelderMeadResult res;
    auto eval = [&](const std::vector<double>& x) {
        ++res.evals;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += opt.initial_step;
    for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);

    while (res.evals < opt.max_evals) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

        double diameter = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                diameter = std::max(diameter, std::abs(simplex[i][k] - simplex[best][k]));
            }
        }
        if (std::abs(fv[worst] - fv[best]) <= opt.f_tol * (1.0 + std::abs(fv[best])) &&
            diameter <= opt.x_tol) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
        }
        auto along = [&](double t, std::vector<double>& out) {
            for (std::size_t k = 0; k < n; ++k) out[k] = centroid[k] + t * (simplex[worst][k] - centroid[k]);
        };

        along(-1.0, trial);
        const double fr = eval(trial);
        if (fr < fv[best]) {
            along(-2.0, trial2);
            const double fe = eval(trial2);
            if (fe < fr) {
                simplex[worst] = trial2;
                fv[worst] = fe;
            } else {
                simplex[worst] = trial;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            simplex[worst] = trial;
            fv[worst] = fr;
            continue;
        }
        const bool outside = fr < fv[worst];
        along(outside ? -0.5 : 0.5, trial2);
        const double fc = eval(trial2);
        if (fc < (outside ? fr : fv[worst])) {
            simplex[worst] = trial2;
            fv[worst] = fc;
            continue;
        }
        // shrink toward best
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t k = 0; k < n; ++k) {
                simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
            }
            fv[i] = eval(simplex[i]);
        }
    }

    const auto best_it = std::min_element(fv.begin(), fv.end());
    res.x = simplex[static_cast<std::size_t>(best_it - fv.begin())];
    res.fx = *best_it;
    return res;
}

std::vector<double> numerical_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> x, double step) {
    std::vector<double> g(x.size()), probe(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = step * std::max(1.0, std::abs(x[i]));
        probe[i] = x[i] + h;
        const double up = f(probe);
        probe[i] = x[i] - h;
        const double down = f(probe);
        probe[i] = x[i];
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

QuasiNewtonResult quasi_newton(const std::function<double(std::span<const double>)>& f, std::vector<double> x0,
                               const QuasiNewtonOptions& opt) {
    const std::size_t n = x0.size();
    auto safe = [&](std::span<const double> x) {
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    auto max_abs = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double e : v) m = std::max(m, std::abs(e));
        return m;
    };

    QuasiNewtonResult res;
    res.x = std::move(x0);
    res.fx = safe(res.x);
    if (!std::isfinite(res.fx)) return res;
    auto g = numerical_gradient(safe, res.x, opt.fd_step);

    // inverse Hessian approximation, row-major
    std::vector<double> Hi(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) Hi[i * n + i] = 1.0;
    std::vector<double> p(n), x_new(n), s(n), y(n), Hy(n);

    for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
        res.grad_norm = max_abs(g);
        if (!std::isfinite(res.grad_norm)) break;
        if (res.grad_norm < opt.grad_tol) {
            res.converged = true;
            break;
        }
        double slope = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = 0.0;
            for (std::size_t k = 0; k < n; ++k) p[i] -= Hi[i * n + k] * g[k];
            slope += p[i] * g[i];
        }
        if (slope >= 0.0) {  // not a descent direction: reset to steepest descent
            std::fill(Hi.begin(), Hi.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                Hi[i * n + i] = 1.0;
                p[i] = -g[i];
            }
            slope = -std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
        }
        double step = 1.0, f_new = 0.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls, step *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = res.x[i] + step * p[i];
            f_new = safe(x_new);
            if (f_new <= res.fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        auto g_new = numerical_gradient(safe, x_new, opt.fd_step);
        double sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - res.x[i];
            y[i] = g_new[i] - g[i];
            sy += s[i] * y[i];
        }
        res.x = x_new;
        res.fx = f_new;
        g = std::move(g_new);
        if (sy <= 1e-12) continue;
        double yHy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            Hy[i] = 0.0;
            for (std::size_t k = 0; k < n; ++k) Hy[i] += Hi[i * n + k] * y[k];
            yHy += y[i] * Hy[i];
        }
        const double rho = 1.0 / sy;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                Hi[i * n + k] += rho * ((1.0 + rho * yHy) * s[i] * s[k] - Hy[i] * s[k] - s[i] * Hy[k]);
            }
        }
    }
    res.grad_norm = max_abs(g);
    res.converged = res.converged || res.grad_norm < opt.grad_tol;
    return res;
}

}  // namespace vplab
