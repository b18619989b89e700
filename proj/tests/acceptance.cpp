// acceptance.cpp
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Run by ctest; takes a few minutes on one core.

#include "vplab/condvol.hpp"
#include "vplab/demo.hpp"
#include "vplab/eval.hpp"
#include "vplab/ladder.hpp"
#include "vplab/memest.hpp"
#include "vplab/models.hpp"
#include "vplab/numeric.hpp"
#include "vplab/pipeline.hpp"
#include "vplab/portfolio.hpp"
#include "vplab/rng.hpp"
#include "vplab/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

using namespace vplab;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    // A failed check is named in the detail line.
    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool identical(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

std::vector<double> arfima(double d, std::size_t T, std::uint64_t seed) {
    SynthSpec s;
    s.kind = SynthKind::arfima0d0;
    s.d = d;
    s.T = T;
    s.seed = seed;
    return simulate_long_memory(s);
}

std::vector<double> fbm(double H, std::size_t T, std::uint64_t seed) {
    SynthSpec s;
    s.kind = SynthKind::fbm_path;
    s.H = H;
    s.T = T;
    s.seed = seed;
    return simulate_long_memory(s);
}

struct Summary {
    double mean = 0.0, sd = 0.0;
};

Summary summarize(const std::vector<double>& v) { return {mean(v), sample_sd(v)}; }

template <class F>
std::vector<double> replicate(std::size_t reps, F&& draw) {
    std::vector<double> v(reps);
    parallel_for(reps, [&](std::size_t r) { v[r] = draw(r); });
    return v;
}

constexpr std::size_t kT = 6000, kM = 285, kReps = 200;
const std::vector<double> kGrid{0.0, 0.2, 0.3, 0.45};

// --- 1, 2: semiparametric memory estimators ---------------------------------

template <class Estimator>
void memory_recovery(Outcome& out, Estimator est, double asym_sd) {
    for (std::size_t g = 0; g < kGrid.size(); ++g) {
        const double d = kGrid[g];
        const auto s = summarize(
            replicate(kReps, [&](std::size_t r) { return est(arfima(d, kT, 10000 * (g + 1) + r), kM).d_hat; }));
        out.detail << " d=" << d << ": mean " << s.mean << " sd/asym " << s.sd / asym_sd << ";";
        std::ostringstream what;
        what << "d=" << d;
        out.check(std::abs(s.mean - d) <= 0.02, what.str() + " mean");
        out.check(std::abs(s.sd / asym_sd - 1.0) <= 0.30, what.str() + " sd");
    }
}

Outcome gph_recovery() {
    Outcome out;
    const auto t0 = Clock::now();
    memory_recovery(
        out, [](const std::vector<double>& x, std::size_t m) { return estimate_gph(x, m); },
        std::numbers::pi / std::sqrt(24.0 * kM));
    const double secs = seconds_since(t0);
    out.detail << " runtime " << secs << " s";
    out.check(secs < 60.0, "runtime");
    return out;
}

Outcome local_whittle_recovery() {
    Outcome out;
    memory_recovery(
        out, [](const std::vector<double>& x, std::size_t m) { return estimate_local_whittle(x, m); },
        1.0 / (2.0 * std::sqrt(static_cast<double>(kM))));
    return out;
}

// --- 3: Hurst ---------------------------------------------------------------

Outcome hurst_recovery() {
    Outcome out;
    for (double H : {0.1, 0.3, 0.5}) {
        const auto s = summarize(replicate(kReps, [&](std::size_t r) {
            return estimate_hurst(fbm(H, kT, 20000 + r)).H_hat;
        }));
        out.detail << " H=" << H << ": mean " << s.mean << ";";
        out.check(std::abs(s.mean - H) <= 0.02, "H=" + std::to_string(H));
    }
    // The Brownian benchmark is exact: increments of the H = 1/2 path are white.
    const auto acov = fgn_autocovariance(0.5, 1.0, 200);
    bool white = acov[0] == 1.0;
    for (std::size_t k = 1; k < acov.size(); ++k) white = white && acov[k] == 0.0;
    out.detail << " H=0.5 increment autocovariance exactly white: " << (white ? "yes" : "no");
    out.check(white, "H=0.5 increments");
    return out;
}

// --- 4: Parkinson -----------------------------------------------------------

Outcome parkinson_consistency() {
    Outcome out;
    const std::size_t days = 10000, steps = 390;
    const double sigma = 0.02, step_sd = sigma / std::sqrt(static_cast<double>(steps));
    MarketPanel p;
    p.dates = business_days(Date::from_ymd(1990, 1, 2), days);
    p.stocks = {"GBM"};
    p.open = p.high = p.low = p.close = p.volume = Grid::Constant(static_cast<Eigen::Index>(days), 1, 1.0);
    Philox rng(4);
    double x = std::log(100.0);
    for (std::size_t t = 0; t < days; ++t) {
        const auto ti = static_cast<Eigen::Index>(t);
        double hi = x, lo = x;
        p.open(ti, 0) = std::exp(x);
        for (std::size_t k = 0; k < steps; ++k) {
            x += step_sd * rng.normal();
            hi = std::max(hi, x);
            lo = std::min(lo, x);
        }
        p.high(ti, 0) = std::exp(hi);
        p.low(ti, 0) = std::exp(lo);
        p.close(ti, 0) = std::exp(x);
    }
    const auto rv = parkinson_rv(p);
    std::vector<double> v;
    for (Eigen::Index t = 0; t < rv.rv.rows(); ++t) {
        if (present(rv.rv(t, 0))) v.push_back(rv.rv(t, 0));
    }
    const double ratio = mean(v) / (sigma * sigma);
    out.detail << " mean RV/sigma^2 = " << ratio << " over " << v.size() << " days";
    out.check(v.size() == days, "day count");
    out.check(ratio >= 0.85 && ratio <= 1.00, "ratio");
    return out;
}

// --- 5, 6: conditional volatility QMLE --------------------------------------

Outcome garch_recovery() {
    Outcome out;
    const std::size_t reps = 50;
    std::vector<GarchFit> fits(reps);
    parallel_for(reps, [&](std::size_t s) {
        SynthSpec spec;
        spec.kind = SynthKind::garch11;
        spec.omega = 0.05;
        spec.alpha = 0.05;
        spec.beta = 0.90;
        spec.T = 10000;
        spec.seed = 500 + s;
        fits[s] = fit_garch11(simulate_conditional_vol(spec).returns);
    });
    std::vector<double> w, a, b;
    for (const auto& f : fits) {
        w.push_back(f.omega);
        a.push_back(f.alpha);
        b.push_back(f.beta);
    }
    auto close = [](double est, double truth) { return std::abs(est - truth) <= std::max(0.02, 0.2 * truth); };
    out.detail << " means omega " << mean(w) << " alpha " << mean(a) << " beta " << mean(b);
    out.check(close(mean(w), 0.05), "omega");
    out.check(close(mean(a), 0.05), "alpha");
    out.check(close(mean(b), 0.90), "beta");
    return out;
}

Outcome figarch_recovery() {
    Outcome out;
    const std::size_t reps = 50;
    std::vector<FigarchFit> fits(reps);
    parallel_for(reps, [&](std::size_t s) {
        SynthSpec spec;
        spec.kind = SynthKind::figarch1d1;
        spec.omega = 0.2;
        spec.d = 0.35;
        spec.phi = 0.3;
        spec.beta = 0.5;
        spec.T = 10000;
        spec.seed = 900 + s;
        fits[s] = fit_figarch(simulate_conditional_vol(spec).returns);
    });
    std::vector<double> d;
    std::size_t nonneg = 0, converged = 0;
    for (const auto& f : fits) {
        d.push_back(f.d);
        converged += f.converged;
        const auto lambda = figarch_lambda(f.d, f.phi, f.beta);
        bool ok = true;
        for (std::size_t k = 1; k < lambda.size(); ++k) ok = ok && lambda[k] >= -1e-12;
        nonneg += ok;
    }
    out.detail << " d mean " << mean(d) << " (sd " << sample_sd(d) << "), lambda >= 0 in " << nonneg << "/" << reps
               << " fits, converged " << converged << "/" << reps;
    out.check(std::abs(mean(d) - 0.35) <= 0.08, "d mean");
    out.check(nonneg == reps, "lambda nonnegativity");
    return out;
}

// --- 7: regression oracles --------------------------------------------------

Eigen::MatrixXd random_design(Eigen::Index n, Eigen::Index p, std::uint64_t seed, double corr) {
    Philox rng(seed);
    Eigen::MatrixXd X(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double common = rng.normal();
        for (Eigen::Index j = 0; j < p; ++j) X(i, j) = corr * common + rng.normal() + 0.5 * static_cast<double>(j);
    }
    return X;
}

std::vector<double> linear_response(const Eigen::MatrixXd& X, std::uint64_t seed, double noise) {
    Philox rng(seed);
    std::vector<double> y(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double v = 1.5;
        for (Eigen::Index j = 0; j < X.cols(); ++j) v += (j % 2 == 0 ? 0.8 : -0.3) * X(i, j) / (1.0 + j);
        y[static_cast<std::size_t>(i)] = v + noise * rng.normal();
    }
    return y;
}

Outcome regression_oracles() {
    Outcome out;
    double worst_ols = 0.0, worst_kkt = 0.0, worst_limit = 0.0;
    bool null_exact = true;
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        const auto X = random_design(300, 8, seed, 1.0);
        const auto y = linear_response(X, seed + 50, 0.7);
        const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));

        // normal equations on [1 X]
        Eigen::MatrixXd A(X.rows(), X.cols() + 1);
        A.col(0).setOnes();
        A.rightCols(X.cols()) = X;
        const Eigen::VectorXd b = (A.transpose() * A).ldlt().solve(A.transpose() * yv);
        const auto ols = fit_ols(X, y);
        worst_ols = std::max(worst_ols, std::abs(ols.raw_intercept() - b(0)) / std::abs(b(0)));
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            worst_ols = std::max(worst_ols, std::abs(ols.raw_slopes()(j) - b(j + 1)) / std::abs(b(j + 1)));
        }

        // lambda = 0 limit
        const auto zero = fit_shrinkage(X, y, EstimatorKind::lasso, 0.0);
        worst_limit = std::max(worst_limit, (zero.beta - ols.beta).cwiseAbs().maxCoeff());

        // KKT conditions on the standardized problem
        const double lmax = lasso_lambda_max(X, y);
        for (double frac : {0.005, 0.05, 0.2, 0.6}) {
            const auto fit = fit_shrinkage(X, y, EstimatorKind::lasso, frac * lmax);
            const Eigen::MatrixXd Z = fit.standardizer.apply(X);
            const Eigen::VectorXd r = (yv.array() - fit.intercept).matrix() - Z * fit.beta;
            const Eigen::VectorXd g = Z.transpose() * r / static_cast<double>(X.rows());
            for (Eigen::Index j = 0; j < X.cols(); ++j) {
                const double res = fit.beta(j) == 0.0
                                       ? std::max(0.0, std::abs(g(j)) - fit.lambda)
                                       : std::abs(g(j) - fit.lambda * (fit.beta(j) > 0 ? 1.0 : -1.0));
                worst_kkt = std::max(worst_kkt, res);
            }
        }

        // exact zeros at the null threshold, and not just below it
        const auto at = fit_shrinkage(X, y, EstimatorKind::lasso, lmax);
        const auto below = fit_shrinkage(X, y, EstimatorKind::lasso, 0.999 * lmax);
        null_exact = null_exact && at.beta.cwiseAbs().maxCoeff() == 0.0 && below.beta.cwiseAbs().maxCoeff() > 0.0;
    }
    out.detail << " OLS rel err " << worst_ols << "; KKT residual " << worst_kkt << "; lambda=0 vs OLS "
               << worst_limit << "; null threshold exact: " << (null_exact ? "yes" : "no");
    out.check(worst_ols <= 1e-8, "OLS");
    out.check(worst_kkt <= 1e-6, "KKT");
    out.check(worst_limit <= 1e-6, "lambda=0");
    out.check(null_exact, "null threshold");
    return out;
}

// --- 8: Diebold-Mariano -----------------------------------------------------

LossPanel loss_panel(const std::string& model, const std::vector<std::vector<double>>& cells) {
    LossPanel p;
    p.model = model;
    p.horizon = 5;
    p.cells.resize(static_cast<Eigen::Index>(cells.size()), static_cast<Eigen::Index>(cells[0].size()));
    for (std::size_t i = 0; i < cells[0].size(); ++i) p.stocks.push_back("S" + std::to_string(i));
    const Date d0 = Date::from_ymd(2020, 1, 6);
    for (std::size_t e = 0; e < cells.size(); ++e) {
        p.dates.push_back(Date{d0.days + static_cast<std::int32_t>(7 * e)});
        for (std::size_t i = 0; i < cells[e].size(); ++i) {
            p.cells(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(i)) = cells[e][i];
        }
    }
    return p;
}

Outcome dm_oracle() {
    Outcome out;
    // Hand computation: d_t = mean over stocks of (A - B) = {0.5, 1.5, 0.25};
    // mean 0.75, gamma_0 = 0.875 / 3, gamma_1 = -0.5625 / 3.
    const auto A = loss_panel("A", {{1, 2}, {3, 5}, {2, 2}});
    const auto B = loss_panel("B", {{0.5, 1.5}, {1, 4}, {2.5, 1}});
    double worst = 0.0;
    const auto r5 = dm_hln(A, B, 5, 3);
    const double plain5 = 0.75 / std::sqrt(0.875 / 3 / 3);
    worst = std::max(worst, std::abs(r5.plain - plain5) / plain5);
    worst = std::max(worst, std::abs(r5.statistic - plain5 * std::sqrt(2.0 / 3.0)) / plain5);
    const auto r10 = dm_hln(A, B, 10, 3);
    const double plain10 = 0.75 / std::sqrt((0.875 / 3 - 0.1875) / 3);
    worst = std::max(worst, std::abs(r10.plain - plain10) / plain10);
    worst = std::max(worst, std::abs(r10.statistic - plain10 * std::sqrt(2.0 / 9.0)) / plain10);
    out.detail << " toy panel rel err " << worst << ";";
    out.check(worst <= 1e-12, "hand panel");

    // antisymmetry and the HLN factor, exactly
    bool exact = true;
    Philox rng(17);
    std::vector<std::vector<double>> a(80, std::vector<double>(6)), b = a;
    for (std::size_t t = 0; t < 80; ++t) {
        for (std::size_t i = 0; i < 6; ++i) {
            a[t][i] = 1.0 + std::abs(rng.normal());
            b[t][i] = a[t][i] - 0.05 + 0.4 * rng.normal();
        }
    }
    const auto PA = loss_panel("A", a), PB = loss_panel("B", b);
    for (int h : {1, 5, 10, 22}) {
        const auto ab = dm_hln(PA, PB, h), ba = dm_hln(PB, PA, h);
        exact = exact && ab.statistic == -ba.statistic && ab.plain == -ba.plain && ab.p_value == ba.p_value;
        const auto T = static_cast<double>(ab.T), k = static_cast<double>(ab.k);
        exact = exact && hln_factor(ab.T, ab.k) == std::sqrt((T + 1.0 - 2.0 * k + k * (k - 1.0) / T) / T);
        exact = exact && ab.statistic == ab.plain * hln_factor(ab.T, ab.k);
    }
    out.detail << " antisymmetry and HLN factor exact: " << (exact ? "yes" : "no") << ";";
    out.check(exact, "exact identities");

    // a common date effect in the differential: cells are far from independent
    std::vector<std::vector<double>> ca(200, std::vector<double>(30)), cb = ca;
    Philox crng(11);
    for (std::size_t t = 0; t < 200; ++t) {
        const double common = 0.5 * crng.normal();
        for (std::size_t i = 0; i < 30; ++i) {
            ca[t][i] = 1.0 + std::abs(crng.normal());
            cb[t][i] = ca[t][i] - 0.08 - common - 0.3 * crng.normal();
        }
    }
    const auto corr = dm_hln(loss_panel("A", ca), loss_panel("B", cb), 5);
    out.detail << " correlated panel: panel-aware " << corr.statistic << " vs pooled-cell "
               << corr.pooled_cell_statistic;
    out.check(std::abs(corr.statistic) < std::abs(corr.pooled_cell_statistic), "pooled-cell divergence");
    return out;
}

// --- 9, 10, 11: the walk-forward ladder on the demo panel -------------------

struct LadderRun {
    std::map<std::pair<std::string, int>, ForecastSet> sets;
    double seconds = 0.0;
};

LadderRun run_ladder(const PipelineData& data, const std::vector<std::string>& models, const std::vector<int>& horizons,
                     bool garch) {
    LadderRun run;
    const auto t0 = Clock::now();
    const LadderConfig cfg;
    for (const auto& id : models) {
        for (int h : horizons) run.sets[{id, h}] = walk_forward(data.features, model_spec(id, cfg), h, cfg);
    }
    run.seconds = seconds_since(t0);
    if (garch) {
        auto g = garch_benchmark(data.features, data.returns, horizons, cfg);
        for (std::size_t k = 0; k < horizons.size(); ++k) run.sets[{"GARCH", horizons[k]}] = std::move(g[k]);
    }
    return run;
}

/// Prices and market series after daily row `cut` are perturbed; OHLC order
/// is preserved so the mutated panel stays valid.
MarketPanel mutate_after(const MarketPanel& base, std::size_t cut) {
    MarketPanel m = base;
    Philox rng(99);
    const auto T = static_cast<std::size_t>(m.close.rows());
    for (Eigen::Index i = 0; i < m.close.cols(); ++i) {
        double level = 1.0;
        for (std::size_t t = cut + 1; t < T; ++t) {
            const auto ti = static_cast<Eigen::Index>(t);
            level *= std::exp(0.03 * rng.normal());
            const double widen = std::exp(0.5 * std::abs(rng.normal()));
            m.open(ti, i) *= level;
            m.close(ti, i) *= level;
            m.high(ti, i) *= level * widen;
            m.low(ti, i) *= level / widen;
            m.volume(ti, i) *= std::exp(rng.normal());
        }
    }
    for (auto& [name, series] : m.market) {
        for (std::size_t t = cut + 1; t < series.size(); ++t) series[t] *= std::exp(0.3 * rng.normal());
    }
    return m;
}

/// Rows a fit at stride date q may use: the target window (t, t + h] must end
/// on or before q and every predictor must be present.
std::size_t audited_rows(const FeaturePanel& f, const ModelSpec& m, int h, std::size_t q) {
    std::size_t n = 0;
    const auto ycol = f.col(target_column(h));
    for (std::size_t s = 0; s <= q; ++s) {
        if (f.day_index[s] + static_cast<std::size_t>(h) > f.day_index[q]) continue;
        for (std::size_t i = 0; i < f.stocks.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(f.row(i, s));
            bool ok = present(ycol(r));
            for (const auto& c : m.columns) ok = ok && present(f.col(c)(r));
            n += ok;
        }
    }
    return n;
}

Outcome anti_leakage() {
    Outcome out;
    const DemoSpec spec;  // 20 stocks x 2,500 days
    const auto demo = make_demo_panel(spec);
    PipelineConfig cfg;
    cfg.winsor_lo = 0.0;  // full-sample percentiles would carry later data back
    cfg.winsor_hi = 1.0;
    const auto base = build_pipeline(demo.panel, cfg);
    const auto& f = base.features;

    const auto run = run_ladder(base, kModelIds, kHorizons, true);
    out.detail << " ladder (" << kModelIds.size() << " models x " << kHorizons.size() << " horizons) " << run.seconds
               << " s;";
    out.check(run.seconds < 600.0, "ladder runtime");

    const std::size_t first = warmup_dates(f.dates.size(), LadderConfig{}.warmup_frac);
    const std::size_t cut_stride = first + (f.dates.size() - first) / 2;
    const std::size_t cut = f.day_index[cut_stride];
    const auto mutated = build_pipeline(mutate_after(demo.panel, cut), cfg);
    const auto after = run_ladder(mutated, kModelIds, kHorizons, true);

    std::size_t compared = 0, mismatched = 0, sets_changed_later = 0;
    for (const auto& [key, a] : run.sets) {
        const auto& b = after.sets.at(key);
        bool later = false;
        for (std::size_t e = 0; e < a.dates.size(); ++e) {
            for (Eigen::Index i = 0; i < a.y_pred.cols(); ++i) {
                const auto ei = static_cast<Eigen::Index>(e);
                if (a.day_index[e] <= cut) {
                    ++compared;
                    mismatched += !identical(a.y_pred(ei, i), b.y_pred(ei, i));
                } else if (!identical(a.y_pred(ei, i), b.y_pred(ei, i))) {
                    later = true;
                }
            }
        }
        sets_changed_later += later;
    }
    out.detail << " " << compared << " forecasts at or before the cut, " << mismatched << " differ; "
               << sets_changed_later << "/" << run.sets.size() << " sets change after it;";
    out.check(compared > 0 && mismatched == 0, "byte identity before the cut");
    out.check(sets_changed_later == run.sets.size(), "mutation reaches every set");

    // construction audit of the training sets behind every forecast date
    std::size_t audited = 0, bad = 0, overlap_excluded = 0;
    for (const auto& [key, fs] : run.sets) {
        if (key.first == "GARCH") continue;
        const auto m = model_spec(key.first);
        const int h = key.second;
        for (std::size_t e = 0; e < fs.dates.size(); ++e) {
            const std::size_t s = first + e, q = fs.fit_date[e];
            ++audited;
            if (q > s || fs.n_train[e] != audited_rows(f, m, h, q)) ++bad;
            // rows whose target window straddles the fit date exist and are left out
            const long L = last_trainable(f.day_index, q, h);
            if (L >= 0 && static_cast<std::size_t>(L) < q) ++overlap_excluded;
        }
    }
    out.detail << " audit: " << bad << "/" << audited << " fit dates disagree with the independent row count, "
               << overlap_excluded << " with overlapping targets excluded";
    out.check(audited > 0 && bad == 0, "construction audit");
    out.check(overlap_excluded > 0, "overlap exclusion active");
    return out;
}

struct DemoForecasts {
    PipelineData data;
    DemoPanel demo;
    LadderRun run;
};

const DemoForecasts& stress_demo() {
    static const DemoForecasts fx = [] {
        DemoSpec spec;
        spec.kind = DemoKind::stress_memory;
        auto demo = make_demo_panel(spec);
        auto data = build_pipeline(demo.panel, PipelineConfig{});
        auto run = run_ladder(data, {"A", "A1", "C"}, {5}, false);
        return DemoForecasts{std::move(data), std::move(demo), std::move(run)};
    }();
    return fx;
}

double pooled_mse(const ForecastSet& f) {
    double s = 0.0;
    std::size_t n = 0;
    for (Eigen::Index k = 0; k < f.y_pred.size(); ++k) {
        if (present(f.y_pred.data()[k])) {
            s += mse_log_loss(f.y_true.data()[k], f.y_pred.data()[k]);
            ++n;
        }
    }
    return s / static_cast<double>(n);
}

Outcome signal_check() {
    Outcome out;
    const auto& fx = stress_demo();
    const auto& A = fx.run.sets.at({"A", 5});
    const auto la = compute_losses(A, LossKind::mse_log);
    const double mse_a = pooled_mse(A);
    out.detail << " stress DGP h=5: A " << mse_a;
    for (const char* id : {"A1", "C"}) {
        const auto& M = fx.run.sets.at({id, 5});
        const double mse = pooled_mse(M);
        const auto dm = dm_hln(la, compute_losses(M, LossKind::mse_log), 5);
        out.detail << ", " << id << " " << mse << " (DM " << dm.statistic << ")";
        out.check(mse < mse_a, std::string(id) + " MSE below A");
        out.check(dm.statistic > 2.0, std::string(id) + " DM > 2");
    }

    // the DGP's own conditional forecast on the same cells, for scale
    std::map<std::string, std::size_t> col;
    for (std::size_t j = 0; j < fx.demo.panel.stocks.size(); ++j) col[fx.demo.panel.stocks[j]] = j;
    double so = 0.0;
    std::size_t no = 0;
    for (std::size_t e = 0; e < A.dates.size(); ++e) {
        for (std::size_t i = 0; i < A.stocks.size(); ++i) {
            const auto ei = static_cast<Eigen::Index>(e), ii = static_cast<Eigen::Index>(i);
            if (!present(A.y_pred(ei, ii))) continue;
            const double o = demo_oracle_forecast(fx.demo, col.at(A.stocks[i]), A.day_index[e], 5);
            so += mse_log_loss(A.y_true(ei, ii), o);
            ++no;
        }
    }
    out.detail << ", oracle " << so / static_cast<double>(no) << ";";

    DemoSpec har;
    har.kind = DemoKind::pure_har;
    const auto hdata = build_pipeline(make_demo_panel(har).panel, PipelineConfig{});
    const auto hrun = run_ladder(hdata, {"A", "C"}, {5}, false);
    const double ha = pooled_mse(hrun.sets.at({"A", 5})), hc = pooled_mse(hrun.sets.at({"C", 5}));
    out.detail << " pure-HAR DGP h=5: A " << ha << ", C " << hc << " (" << 100.0 * (hc - ha) / ha << "%)";
    out.check(std::abs(hc - ha) <= 0.02 * ha, "pure HAR within 2%");
    return out;
}

Outcome portfolio_identities() {
    Outcome out;
    const auto& fx = stress_demo();
    const auto returns = to_log_returns(fx.demo.panel, 0.0, 1.0);
    double worst_var = 0.0, worst_sharpe = 0.0;
    bool dd_ok = true;
    std::vector<std::vector<double>> unmanaged;
    for (const char* id : {"A", "A1", "C"}) {
        const auto& f = fx.run.sets.at({id, 5});
        const auto mp = managed_returns(f, returns);
        for (Eigen::Index i = 0; i < mp.raw.cols(); ++i) {
            if (is_missing(mp.c[static_cast<std::size_t>(i)])) continue;
            std::vector<double> raw, man;
            for (Eigen::Index t = 0; t < mp.raw.rows(); ++t) {
                if (present(mp.raw(t, i)) && present(mp.managed(t, i))) {
                    raw.push_back(mp.raw(t, i));
                    man.push_back(mp.managed(t, i));
                }
            }
            const double vr = sample_variance(raw);
            worst_var = std::max(worst_var, std::abs(sample_variance(man) - vr) / vr);
        }
        const auto path = equal_weight(mp.managed);
        std::vector<double> x;
        for (double v : path) {
            if (present(v)) x.push_back(v);
        }
        const auto m = portfolio_metrics(x);
        for (double k : {0.25, 3.7, 40.0}) {
            std::vector<double> y(x);
            for (double& v : y) v *= k;
            worst_sharpe = std::max(worst_sharpe, std::abs(portfolio_metrics(y).sharpe - m.sharpe) / std::abs(m.sharpe));
        }
        const double worst_period = *std::min_element(x.begin(), x.end());
        dd_ok = dd_ok && m.max_drawdown >= -1.0 && m.max_drawdown <= 0.0 && m.max_drawdown <= std::min(0.0, worst_period);
        unmanaged.push_back(unmanaged_path(returns, f.day_index));
    }
    bool same = true;
    for (const auto& u : unmanaged) {
        same = same && u.size() == unmanaged[0].size() &&
               std::memcmp(u.data(), unmanaged[0].data(), u.size() * sizeof(double)) == 0;
    }
    out.detail << " variance match worst rel err " << worst_var << "; Sharpe scale rel err " << worst_sharpe
               << "; drawdown in [-1, min(0, worst period)]: " << (dd_ok ? "yes" : "no")
               << "; unmanaged path identical across models: " << (same ? "yes" : "no");
    out.check(worst_var < 1e-10, "variance match");
    out.check(worst_sharpe < 1e-12, "Sharpe scale invariance");
    out.check(dd_ok, "drawdown bounds");
    out.check(same, "unmanaged path");
    return out;
}

// --- 12: QLIKE --------------------------------------------------------------

Outcome qlike_minimum() {
    Outcome out;
    Philox rng(12);
    std::size_t wrong = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const double y = -10.0 + 6.0 * rng.uniform();
        const double step = 1e-3 + 0.1 * rng.uniform();
        const int half = 100 + static_cast<int>(rng.below(200));
        int best = 0;
        double best_loss = std::numeric_limits<double>::infinity();
        for (int k = -half; k <= half; ++k) {
            const double l = qlike_loss(y, y + k * step);
            if (l < best_loss) {
                best_loss = l;
                best = k;
            }
        }
        wrong += best != 0;
    }
    out.detail << " argmin off the truth in " << wrong << "/100 grids";
    out.check(wrong == 0, "argmin");
    return out;
}

}  // namespace

int main() {
    set_thread_count(std::max(1u, std::thread::hardware_concurrency()));
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"GPH recovery", gph_recovery},
        {"local Whittle recovery", local_whittle_recovery},
        {"Hurst recovery", hurst_recovery},
        {"Parkinson consistency", parkinson_consistency},
        {"GARCH(1,1) QMLE", garch_recovery},
        {"FIGARCH QMLE", figarch_recovery},
        {"OLS and shrinkage oracles", regression_oracles},
        {"DM-HLN oracle", dm_oracle},
        {"walk-forward anti-leakage", anti_leakage},
        {"end-to-end signal", signal_check},
        {"portfolio identities", portfolio_identities},
        {"QLIKE minimum", qlike_minimum},
    };
    std::size_t failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto& [name, run] = criteria[k];
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (k + 1) << ". " << name << ":" << o.detail.str() << " ("
                  << seconds_since(t0) << " s)" << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
