// memest.cpp

#include "vplab/memest.hpp"

#include "vplab/numeric.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vplab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::string to_string(MemoryEstimator e) { return e == MemoryEstimator::gph ? "gph" : "local_whittle"; }

MemoryEstimator memory_estimator_from_string(const std::string& s) {
    if (s == "gph") return MemoryEstimator::gph;
    if (s == "local_whittle" || s == "lw") return MemoryEstimator::local_whittle;
    throw ConfigError("unknown memory estimator '" + s + "'");
}

Periodogram periodogram(std::span<const double> series) {
    const std::size_t T = series.size();
    if (T < 8) throw DataError("periodogram needs at least 8 observations");
    for (double v : series) {
        if (!std::isfinite(v)) throw DataError("periodogram input contains a non-finite value");
    }
    const double xbar = mean(series);
    std::vector<double> centered(T);
    for (std::size_t t = 0; t < T; ++t) centered[t] = series[t] - xbar;
    const auto spec = rfft(centered);

    Periodogram pg;
    pg.T = T;
    const std::size_t n = T / 2;
    pg.freq.resize(n);
    pg.ordinate.resize(n);
    const double norm = 1.0 / (kTwoPi * static_cast<double>(T));
    for (std::size_t j = 1; j <= n; ++j) {
        pg.freq[j - 1] = kTwoPi * static_cast<double>(j) / static_cast<double>(T);
        pg.ordinate[j - 1] = std::norm(spec[j]) * norm;
    }
    return pg;
}

std::size_t default_bandwidth(std::size_t T, double exponent) {
    const auto m = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(T), exponent)));
    return std::clamp<std::size_t>(m, 2, std::max<std::size_t>(2, T / 2));
}

namespace {

void check_bandwidth(const Periodogram& pg, std::size_t m) {
    if (m < 2 || m > pg.ordinate.size()) {
        throw ConfigError("bandwidth m=" + std::to_string(m) + " outside [2, " + std::to_string(pg.ordinate.size()) +
                          "]");
    }
}

}  // namespace

MemoryEstimate estimate_gph(const Periodogram& pg, std::size_t m) {
    check_bandwidth(pg, m);
    std::vector<double> x, y;
    x.reserve(m);
    y.reserve(m);
    MemoryEstimate est;
    est.estimator = MemoryEstimator::gph;
    est.bandwidth = m;
    est.T = pg.T;
    for (std::size_t j = 0; j < m; ++j) {
        if (!(pg.ordinate[j] > 0.0)) {
            ++est.excluded;
            continue;
        }
        const double s = std::sin(pg.freq[j] / 2.0);
        x.push_back(std::log(4.0 * s * s));
        y.push_back(std::log(pg.ordinate[j]));
    }
    if (x.size() < 2) throw EstimationError("GPH regression has fewer than 2 usable ordinates");
    const auto fit = simple_regression(x, y);
    est.d_hat = -fit.slope;
    const double asymptotic = std::numbers::pi / std::sqrt(24.0 * static_cast<double>(m));
    est.se = std::isfinite(fit.slope_se) ? std::max(fit.slope_se, asymptotic) : asymptotic;
    return est;
}

MemoryEstimate estimate_gph(std::span<const double> series, std::size_t m) {
    return estimate_gph(periodogram(series), m);
}

double local_whittle_objective(const Periodogram& pg, std::size_t m, double d) {
    double weighted = 0.0, log_freq = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double lf = std::log(pg.freq[j]);
        weighted += std::exp(2.0 * d * lf) * pg.ordinate[j];
        log_freq += lf;
    }
    const auto md = static_cast<double>(m);
    return std::log(weighted / md) - 2.0 * d * log_freq / md;
}

MemoryEstimate estimate_local_whittle(const Periodogram& pg, std::size_t m) {
    check_bandwidth(pg, m);
    bool any_positive = false;
    for (std::size_t j = 0; j < m; ++j) any_positive = any_positive || pg.ordinate[j] > 0.0;
    if (!any_positive) throw EstimationError("local Whittle: all periodogram ordinates are zero");

    // R(d) is a log-sum-exp of affine functions of d, hence convex: Brent finds
    // the global minimum on the interval.
    const auto [d_hat, r_min] = boost::math::tools::brent_find_minima(
        [&](double d) { return local_whittle_objective(pg, m, d); }, kLwLower, kLwUpper, 40);
    (void)r_min;

    MemoryEstimate est;
    est.estimator = MemoryEstimator::local_whittle;
    est.bandwidth = m;
    est.T = pg.T;
    est.d_hat = d_hat;
    est.se = 1.0 / (2.0 * std::sqrt(static_cast<double>(m)));
    est.at_boundary = d_hat - kLwLower < 1e-5 || kLwUpper - d_hat < 1e-5;
    return est;
}

MemoryEstimate estimate_local_whittle(std::span<const double> series, std::size_t m) {
    return estimate_local_whittle(periodogram(series), m);
}

bool is_significant(const MemoryEstimate& e) { return std::abs(e.d_hat / e.se) > 1.959963984540054; }

HurstEstimate estimate_hurst(std::span<const double> x, const std::vector<std::size_t>& lags, double q) {
    if (lags.size() < 2) throw ConfigError("Hurst estimation needs at least two lags");
    if (!(q > 0.0)) throw ConfigError("Hurst moment order q must be > 0");
    for (std::size_t i = 0; i < lags.size(); ++i) {
        if (lags[i] < 1 || (i > 0 && lags[i] <= lags[i - 1])) {
            throw ConfigError("Hurst lags must be >= 1 and strictly increasing");
        }
    }
    if (x.size() <= lags.back() + 1) throw DataError("series too short for the Hurst lag grid");

    std::vector<double> log_lag, log_m;
    for (std::size_t lag : lags) {
        double sum = 0.0;
        const std::size_t n = x.size() - lag;
        for (std::size_t t = 0; t < n; ++t) sum += std::pow(std::abs(x[t + lag] - x[t]), q);
        const double m = sum / static_cast<double>(n);
        if (!(m > 0.0)) throw EstimationError("Hurst: zero moment at lag " + std::to_string(lag));
        log_lag.push_back(std::log(static_cast<double>(lag)));
        log_m.push_back(std::log(m));
    }
    HurstEstimate est;
    est.q = q;
    est.lags = lags;
    const auto fit = simple_regression(log_lag, log_m);
    est.H_hat = fit.slope / q;
    est.r2 = fit.r2;
    return est;
}

// ----------------------------------------------------------------------------

std::vector<std::size_t> stride_rows(std::size_t n_dates, std::size_t window, std::size_t stride) {
    std::vector<std::size_t> rows;
    if (window == 0 || stride == 0) throw ConfigError("window and stride must be >= 1");
    for (std::size_t t = window - 1; t < n_dates; t += stride) rows.push_back(t);
    return rows;
}

MemoryPanel rolling_memory(const VolPanel& vol, const RollingConfig& cfg) {
    const std::size_t n = vol.dates.size();
    if (cfg.window > n) {
        throw ConfigError("rolling window " + std::to_string(cfg.window) + " exceeds the sample length " +
                          std::to_string(n));
    }
    if (cfg.window < 16) throw ConfigError("rolling window must be >= 16");

    MemoryPanel out;
    out.config = cfg;
    out.stocks = vol.stocks;
    out.day_index = stride_rows(n, cfg.window, cfg.stride);
    for (auto t : out.day_index) out.dates.push_back(vol.dates[t]);
    out.bandwidth = default_bandwidth(cfg.window, cfg.bandwidth_exponent);

    const auto rows = static_cast<Eigen::Index>(out.day_index.size());
    const auto cols = static_cast<Eigen::Index>(vol.stocks.size());
    for (Grid* g : {&out.d_gph, &out.se_gph, &out.d_lw, &out.se_lw, &out.hurst}) {
        *g = Grid::Constant(rows, cols, kMissing);
    }

    const std::size_t cells = static_cast<std::size_t>(rows * cols);
    std::vector<char> gap(cells, 0);
    parallel_for(cells, [&](std::size_t cell) {
        const auto j = static_cast<Eigen::Index>(cell / static_cast<std::size_t>(rows));
        const auto s = static_cast<Eigen::Index>(cell % static_cast<std::size_t>(rows));
        const std::size_t end = out.day_index[static_cast<std::size_t>(s)];
        const std::size_t start = end + 1 - cfg.window;
        const double* col = vol.rv.col(j).data();
        std::span<const double> window(col + start, cfg.window);
        if (std::any_of(window.begin(), window.end(), [](double v) { return is_missing(v); })) {
            gap[cell] = 1;
            return;
        }
        const auto pg = periodogram(window);
        try {
            const auto g = estimate_gph(pg, out.bandwidth);
            out.d_gph(s, j) = g.d_hat;
            out.se_gph(s, j) = g.se;
        } catch (const EstimationError&) {
        }
        try {
            const auto w = estimate_local_whittle(pg, out.bandwidth);
            out.d_lw(s, j) = w.d_hat;
            out.se_lw(s, j) = w.se;
        } catch (const EstimationError&) {
        }
        if (std::all_of(window.begin(), window.end(), [](double v) { return v > 0.0; })) {
            std::vector<double> logrv(window.size());
            std::transform(window.begin(), window.end(), logrv.begin(), [](double v) { return std::log(v); });
            try {
                out.hurst(s, j) = estimate_hurst(logrv, cfg.hurst_lags, cfg.hurst_q).H_hat;
            } catch (const EstimationError&) {
            }
        }
    });
    out.gap_count = static_cast<std::size_t>(std::count(gap.begin(), gap.end(), 1));
    return out;
}

}  // namespace vplab
