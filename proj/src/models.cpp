// models.cpp

#include "vplab/models.hpp"

#include "vplab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vplab {

namespace {

constexpr double kRankThreshold = 1e-10;

void check_shapes(const Eigen::MatrixXd& X, std::span<const double> y) {
    if (static_cast<std::size_t>(X.rows()) != y.size()) throw ConfigError("design rows and response length differ");
    if (!X.allFinite()) throw DataError("design matrix has missing or non-finite cells");
    for (double v : y) {
        if (!std::isfinite(v)) throw DataError("response has missing or non-finite values");
    }
}

double soft_threshold(double z, double g) {
    // a tie up to rounding stays at zero (exactly collinear columns produce
    // |z| = g + ulp)
    if (std::abs(z) - g <= 1e-12 * g) return 0.0;
    if (z > g) return z - g;
    if (z < -g) return z + g;
    return 0.0;
}

/// Solves R_s gamma = z by pivoted QR; R_s is small (p x p) or tall (n x p).
void pivoted_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, FitResult& fit) {
    const auto p = A.cols();
    fit.beta = Eigen::VectorXd::Zero(p);
    if (p == 0) return;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(kRankThreshold);
    const auto rank = qr.rank();
    const auto& perm = qr.colsPermutation().indices();
    // leading `rank` pivots are kept; solve the reduced triangular system
    const Eigen::VectorXd qtb = qr.householderQ().adjoint() * b;
    const Eigen::VectorXd top = qr.matrixQR()
                                    .topLeftCorner(rank, rank)
                                    .triangularView<Eigen::Upper>()
                                    .solve(qtb.head(rank));
    for (Eigen::Index k = 0; k < rank; ++k) fit.beta(perm(k)) = top(k);
    for (Eigen::Index k = rank; k < p; ++k) {
        const int col = perm(k);
        if (std::find(fit.standardizer.constant.begin(), fit.standardizer.constant.end(), col) ==
            fit.standardizer.constant.end()) {
            fit.dropped.push_back(col);
        }
    }
    std::sort(fit.dropped.begin(), fit.dropped.end());
}

}  // namespace

std::string to_string(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::ols: return "ols";
        case EstimatorKind::lasso: return "lasso";
        case EstimatorKind::ridge: return "ridge";
        case EstimatorKind::elastic_net: return "elastic_net";
        case EstimatorKind::random_forest: return "random_forest";
        case EstimatorKind::gradient_boosting: return "gradient_boosting";
    }
    return "?";
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& X) {
    Standardizer s;
    const auto n = static_cast<double>(X.rows());
    s.center = X.colwise().mean().transpose();
    s.scale.resize(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double ss = (X.col(j).array() - s.center(j)).square().sum();
        const double sd = std::sqrt(ss / n);
        if (!(sd > 0.0)) {
            s.scale(j) = 1.0;
            s.constant.push_back(static_cast<int>(j));
        } else {
            s.scale(j) = sd;
        }
    }
    return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd Z = (X.rowwise() - center.transpose()).array().rowwise() / scale.transpose().array();
    for (int j : constant) Z.col(j).setZero();
    return Z;
}

double Tree::predict(const double* x, Eigen::Index stride) const {
    int k = 0;
    while (nodes[static_cast<std::size_t>(k)].feature >= 0) {
        const auto& nd = nodes[static_cast<std::size_t>(k)];
        k = x[nd.feature * stride] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(k)].value;
}

Eigen::VectorXd FitResult::raw_slopes() const { return beta.array() / standardizer.scale.array(); }

double FitResult::raw_intercept() const { return intercept - raw_slopes().dot(standardizer.center); }

double FitResult::predict_row(const double* x, Eigen::Index stride) const {
    switch (kind) {
        case EstimatorKind::random_forest: {
            double s = 0.0;
            for (const auto& t : trees) s += t.predict(x, stride);
            return s / static_cast<double>(trees.size());
        }
        case EstimatorKind::gradient_boosting: {
            double s = base;
            for (const auto& t : trees) s += learning_rate * t.predict(x, stride);
            return s;
        }
        default: {
            double s = intercept;
            for (Eigen::Index j = 0; j < beta.size(); ++j) {
                if (beta(j) != 0.0) s += beta(j) * (x[j * stride] - standardizer.center(j)) / standardizer.scale(j);
            }
            return s;
        }
    }
}

Eigen::VectorXd FitResult::predict(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = predict_row(X.data() + i, X.rows());
    return out;
}

// ---------------------------------------------------------------------------

FitResult fit_ols(const Eigen::MatrixXd& X, std::span<const double> y) {
    check_shapes(X, y);
    if (X.rows() < X.cols() + 1) throw EstimationError("OLS needs at least columns + 1 rows");
    FitResult fit;
    fit.kind = EstimatorKind::ols;
    fit.n_train = y.size();
    fit.standardizer = Standardizer::fit(X);
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    fit.intercept = yv.mean();
    const Eigen::VectorXd yc = yv.array() - fit.intercept;
    pivoted_solve(fit.standardizer.apply(X), yc, fit);
    return fit;
}

FitResult ols_from_factor(const Eigen::MatrixXd& R, const Eigen::VectorXd& z, const Standardizer& st, double y_mean,
                          std::size_t n) {
    FitResult fit;
    fit.kind = EstimatorKind::ols;
    fit.n_train = n;
    fit.standardizer = st;
    fit.intercept = y_mean;
    Eigen::MatrixXd Rs = R.array().rowwise() / st.scale.transpose().array();
    for (int j : st.constant) Rs.col(j).setZero();
    pivoted_solve(Rs, z, fit);
    return fit;
}

// ---------------------------------------------------------------------------

double mixing_for(EstimatorKind kind, double alpha) {
    switch (kind) {
        case EstimatorKind::lasso: return 1.0;
        case EstimatorKind::ridge: return 0.0;
        case EstimatorKind::elastic_net: return alpha;
        default: throw ConfigError("not a shrinkage estimator: " + to_string(kind));
    }
}

namespace {

/// Gram form of the standardized problem: G = Z'Z/n, c = Z'y_c/n.
struct GramProblem {
    Eigen::MatrixXd G;
    Eigen::VectorXd c;
    std::vector<char> active;  // non-constant columns
};

GramProblem gram(const Eigen::MatrixXd& Z, const Eigen::VectorXd& yc, const Standardizer& st) {
    GramProblem g;
    const auto n = static_cast<double>(Z.rows());
    g.G = Eigen::MatrixXd::Zero(Z.cols(), Z.cols());
    g.G.selfadjointView<Eigen::Lower>().rankUpdate(Z.transpose(), 1.0 / n);
    g.G = g.G.selfadjointView<Eigen::Lower>();
    g.c = Z.transpose() * yc / n;
    g.active.assign(static_cast<std::size_t>(Z.cols()), 1);
    for (int j : st.constant) g.active[static_cast<std::size_t>(j)] = 0;
    return g;
}

/// Runs coordinate descent from `beta` (warm start); returns sweeps used.
std::size_t coordinate_descent(const GramProblem& g, double lambda, double alpha, Eigen::VectorXd& beta,
                               const ShrinkageOptions& opt) {
    const auto p = g.G.cols();
    Eigen::VectorXd q = g.G * beta;
    const double l1 = lambda * alpha, l2 = lambda * (1.0 - alpha);
    for (std::size_t sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (!g.active[static_cast<std::size_t>(j)]) continue;
            const double gjj = g.G(j, j);
            const double rho = g.c(j) - q(j) + gjj * beta(j);
            const double denom = gjj + l2;
            const double next = denom > 0.0 ? soft_threshold(rho, l1) / denom : 0.0;
            const double delta = next - beta(j);
            if (delta != 0.0) {
                q += g.G.col(j) * delta;
                beta(j) = next;
                max_change = std::max(max_change, std::abs(delta));
            }
        }
        if (max_change < opt.tol) return sweep;
    }
    throw EstimationError("coordinate descent did not converge within " + std::to_string(opt.max_sweeps) +
                          " sweeps (lambda " + std::to_string(lambda) + ")");
}

}  // namespace

FitResult fit_shrinkage(const Eigen::MatrixXd& X, std::span<const double> y, EstimatorKind kind, double lambda,
                        double alpha, const ShrinkageOptions& opt) {
    check_shapes(X, y);
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
    const double a = mixing_for(kind, alpha);
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("elastic-net mixing must lie in [0, 1]");
    if (X.rows() < 2) throw EstimationError("shrinkage fit needs at least 2 rows");
    FitResult fit;
    fit.kind = kind;
    fit.lambda = lambda;
    fit.alpha = a;
    fit.n_train = y.size();
    fit.standardizer = Standardizer::fit(X);
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    fit.intercept = yv.mean();
    const auto g = gram(fit.standardizer.apply(X), yv.array() - fit.intercept, fit.standardizer);
    fit.beta = Eigen::VectorXd::Zero(X.cols());
    fit.sweeps = coordinate_descent(g, lambda, a, fit.beta, opt);
    return fit;
}

double lasso_lambda_max(const Eigen::MatrixXd& X, std::span<const double> y) {
    check_shapes(X, y);
    const auto st = Standardizer::fit(X);
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    const Eigen::VectorXd c = st.apply(X).transpose() * (yv.array() - yv.mean()).matrix();
    return c.cwiseAbs().maxCoeff() / static_cast<double>(X.rows());
}

CvResult cross_validate_lambda(const Eigen::MatrixXd& X, std::span<const double> y, std::span<const double> time,
                               std::span<const double> label_end, EstimatorKind kind, double alpha,
                               const CvOptions& opt) {
    check_shapes(X, y);
    if (time.size() != y.size() || label_end.size() != y.size()) throw ConfigError("CV time index length mismatch");
    if (opt.splits < 1 || opt.grid_points < 2 || !(opt.lambda_lo > 0.0) || !(opt.lambda_hi > opt.lambda_lo)) {
        throw ConfigError("invalid cross-validation settings");
    }
    const double a = mixing_for(kind, alpha);

    CvResult out;
    const double llo = std::log(opt.lambda_lo), lhi = std::log(opt.lambda_hi);
    for (std::size_t k = 0; k < opt.grid_points; ++k) {
        out.grid.push_back(std::exp(lhi - (lhi - llo) * static_cast<double>(k) / static_cast<double>(opt.grid_points - 1)));
    }

    std::vector<double> times(time.begin(), time.end());
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    const std::size_t blocks = opt.splits + 1;
    if (times.size() < blocks) throw EstimationError("too few distinct dates for cross-validation");
    auto block_start = [&](std::size_t b) { return times[b * times.size() / blocks]; };

    const auto G = static_cast<std::size_t>(opt.grid_points);
    std::vector<std::vector<double>> fold_mse;
    for (std::size_t k = 1; k <= opt.splits; ++k) {
        const double v0 = block_start(k);
        const double v1 = k + 1 < blocks ? block_start(k + 1) : std::numeric_limits<double>::infinity();
        std::vector<Eigen::Index> tr, va;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (time[i] < v0 && label_end[i] <= v0) tr.push_back(static_cast<Eigen::Index>(i));
            if (time[i] >= v0 && time[i] < v1) va.push_back(static_cast<Eigen::Index>(i));
        }
        if (tr.size() < static_cast<std::size_t>(X.cols()) + 2 || va.empty()) continue;

        const Eigen::MatrixXd Xtr = X(tr, Eigen::all);
        Eigen::VectorXd ytr(static_cast<Eigen::Index>(tr.size()));
        for (std::size_t i = 0; i < tr.size(); ++i) ytr(static_cast<Eigen::Index>(i)) = y[static_cast<std::size_t>(tr[i])];
        const auto st = Standardizer::fit(Xtr);
        const double ybar = ytr.mean();
        const auto g = gram(st.apply(Xtr), ytr.array() - ybar, st);
        const Eigen::MatrixXd Zva = st.apply(X(va, Eigen::all));

        std::vector<double> mse(G);
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(X.cols());
        for (std::size_t l = 0; l < G; ++l) {
            coordinate_descent(g, out.grid[l], a, beta, opt.solver);
            const Eigen::VectorXd pred = (Zva * beta).array() + ybar;
            double s = 0.0;
            for (std::size_t i = 0; i < va.size(); ++i) {
                const double e = y[static_cast<std::size_t>(va[i])] - pred(static_cast<Eigen::Index>(i));
                s += e * e;
            }
            mse[l] = s / static_cast<double>(va.size());
        }
        fold_mse.push_back(std::move(mse));
    }
    if (fold_mse.empty()) throw EstimationError("no usable cross-validation split");

    const auto F = static_cast<double>(fold_mse.size());
    out.mse.assign(G, 0.0);
    out.se.assign(G, 0.0);
    for (std::size_t l = 0; l < G; ++l) {
        for (const auto& f : fold_mse) out.mse[l] += f[l] / F;
        if (fold_mse.size() > 1) {
            double ss = 0.0;
            for (const auto& f : fold_mse) ss += (f[l] - out.mse[l]) * (f[l] - out.mse[l]);
            out.se[l] = std::sqrt(ss / (F - 1.0)) / std::sqrt(F);
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(out.mse.begin(), out.mse.end()) - out.mse.begin());
    out.chosen = best;
    if (opt.rule == CvRule::one_se) {
        // grid is descending: the first point within one se is the largest lambda
        const double bound = out.mse[best] + out.se[best];
        for (std::size_t l = 0; l <= best; ++l) {
            if (out.mse[l] <= bound) {
                out.chosen = l;
                break;
            }
        }
    }
    out.lambda = out.grid[out.chosen];
    return out;
}

// ---------------------------------------------------------------------------
// Trees

namespace {

/// Quantile bins per feature; a row's code is the bin holding its value.
struct BinnedDesign {
    std::vector<std::vector<double>> lo, hi;  // per feature, per bin: min and max value
    std::vector<std::uint16_t> codes;         // column-major n x p
    Eigen::Index n = 0, p = 0;

    std::uint16_t code(Eigen::Index i, Eigen::Index j) const { return codes[static_cast<std::size_t>(j * n + i)]; }
};

BinnedDesign bin_design(const Eigen::MatrixXd& X, std::size_t max_bins) {
    BinnedDesign b;
    b.n = X.rows();
    b.p = X.cols();
    b.codes.resize(static_cast<std::size_t>(b.n * b.p));
    b.lo.resize(static_cast<std::size_t>(b.p));
    b.hi.resize(static_cast<std::size_t>(b.p));
    std::vector<double> v;
    for (Eigen::Index j = 0; j < b.p; ++j) {
        v.assign(X.col(j).data(), X.col(j).data() + b.n);
        std::sort(v.begin(), v.end());
        // upper edges: value at evenly spaced ranks, deduplicated
        std::vector<double> edges;
        std::vector<double> uniq(v);
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        if (uniq.size() <= max_bins) {
            edges = uniq;
        } else {
            for (std::size_t k = 1; k <= max_bins; ++k) {
                const double e = v[std::min(v.size() - 1, k * v.size() / max_bins - 1)];
                if (edges.empty() || e > edges.back()) edges.push_back(e);
            }
            if (edges.back() < v.back()) edges.push_back(v.back());
        }
        auto& lo = b.lo[static_cast<std::size_t>(j)];
        auto& hi = b.hi[static_cast<std::size_t>(j)];
        lo.assign(edges.size(), std::numeric_limits<double>::infinity());
        hi.assign(edges.size(), -std::numeric_limits<double>::infinity());
        for (Eigen::Index i = 0; i < b.n; ++i) {
            const double x = X(i, j);
            const auto k = static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), x) - edges.begin());
            b.codes[static_cast<std::size_t>(j * b.n + i)] = static_cast<std::uint16_t>(k);
            lo[k] = std::min(lo[k], x);
            hi[k] = std::max(hi[k], x);
        }
    }
    return b;
}

struct TreeBuilder {
    const BinnedDesign& bins;
    std::span<const double> y;
    std::span<const double> w;  // per-row multiplicity
    std::size_t mtry;
    int max_depth;
    double min_leaf;
    Philox* rng;  // feature subsampling; null means every feature
    Tree tree;
    std::vector<double> hw, hy;  // histogram scratch
    std::vector<int> features;

    int grow(std::vector<Eigen::Index>& rows, int depth) {
        double W = 0.0, S = 0.0, ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
        for (auto i : rows) {
            const double wi = w[static_cast<std::size_t>(i)], yi = y[static_cast<std::size_t>(i)];
            W += wi;
            S += wi * yi;
            ymin = std::min(ymin, yi);
            ymax = std::max(ymax, yi);
        }
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, S / W});
        if (depth >= max_depth || W < 2.0 * min_leaf || ymin == ymax) return id;

        // candidate features
        const auto p = static_cast<std::size_t>(bins.p);
        features.resize(p);
        std::iota(features.begin(), features.end(), 0);
        std::size_t m = p;
        if (rng != nullptr && mtry < p) {
            for (std::size_t k = 0; k < mtry; ++k) {
                const auto r = k + static_cast<std::size_t>(rng->below(p - k));
                std::swap(features[k], features[r]);
            }
            m = mtry;
        }

        const double parent = S * S / W;
        double best_gain = 0.0;
        int best_feature = -1;
        std::size_t best_bin = 0;
        for (std::size_t fi = 0; fi < m; ++fi) {
            const int j = features[fi];
            const auto nb = bins.lo[static_cast<std::size_t>(j)].size();
            hw.assign(nb, 0.0);
            hy.assign(nb, 0.0);
            for (auto i : rows) {
                const auto c = bins.code(i, j);
                hw[c] += w[static_cast<std::size_t>(i)];
                hy[c] += w[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
            }
            double WL = 0.0, SL = 0.0;
            for (std::size_t k = 0; k + 1 < nb; ++k) {
                WL += hw[k];
                SL += hy[k];
                if (hw[k] == 0.0) continue;  // same partition as the previous cut
                const double WR = W - WL;
                if (WL < min_leaf) continue;
                if (WR < min_leaf) break;
                const double SR = S - SL;
                const double gain = SL * SL / WL + SR * SR / WR - parent;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = j;
                    best_bin = k;
                }
            }
        }
        if (best_feature < 0) return id;

        const auto& lo = bins.lo[static_cast<std::size_t>(best_feature)];
        const auto& hi = bins.hi[static_cast<std::size_t>(best_feature)];
        std::size_t next = best_bin + 1;
        while (next < lo.size() && !std::isfinite(lo[next])) ++next;
        const double threshold = 0.5 * (hi[best_bin] + lo[next]);

        std::vector<Eigen::Index> left, right;
        for (auto i : rows) (bins.code(i, best_feature) <= best_bin ? left : right).push_back(i);
        rows.clear();
        rows.shrink_to_fit();
        const int l = grow(left, depth + 1);
        const int r = grow(right, depth + 1);
        auto& nd = tree.nodes[static_cast<std::size_t>(id)];
        nd.feature = best_feature;
        nd.threshold = threshold;
        nd.left = l;
        nd.right = r;
        return id;
    }
};

Tree build_tree(const BinnedDesign& bins, std::span<const double> y, std::span<const double> w,
                std::vector<Eigen::Index> rows, const TreeOptions& opt, std::size_t mtry, Philox* rng) {
    TreeBuilder b{bins, y, w, mtry, opt.max_depth, static_cast<double>(opt.min_leaf), rng, {}, {}, {}, {}};
    b.grow(rows, 0);
    return std::move(b.tree);
}

void check_tree_options(const TreeOptions& opt) {
    if (opt.max_depth < 0 || opt.min_leaf < 1 || opt.max_bins < 2 || opt.max_bins > 65535) {
        throw ConfigError("invalid tree options");
    }
}

}  // namespace

Tree fit_regression_tree(const Eigen::MatrixXd& X, std::span<const double> y, const TreeOptions& opt) {
    check_shapes(X, y);
    check_tree_options(opt);
    if (X.rows() == 0) throw EstimationError("tree fit needs at least one row");
    const auto bins = bin_design(X, opt.max_bins);
    const std::vector<double> w(y.size(), 1.0);
    std::vector<Eigen::Index> rows(y.size());
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});
    return build_tree(bins, y, w, std::move(rows), opt, static_cast<std::size_t>(X.cols()), nullptr);
}

FitResult fit_tree_ensemble(const Eigen::MatrixXd& X, std::span<const double> y, EstimatorKind kind,
                            const TreeOptions& opt) {
    check_shapes(X, y);
    check_tree_options(opt);
    if (X.rows() < 50) throw EstimationError("tree ensembles need at least 50 rows");
    const auto n = static_cast<std::size_t>(X.rows());
    const auto p = static_cast<std::size_t>(X.cols());
    const auto bins = bin_design(X, opt.max_bins);
    FitResult fit;
    fit.kind = kind;
    fit.n_train = n;
    std::vector<Eigen::Index> all(n);
    std::iota(all.begin(), all.end(), Eigen::Index{0});

    if (kind == EstimatorKind::random_forest) {
        if (opt.n_trees < 1) throw ConfigError("random forest needs at least one tree");
        const std::size_t mtry = opt.mtry > 0 ? std::min(opt.mtry, p) : std::max<std::size_t>(1, p / 3);
        fit.trees.resize(opt.n_trees);
        parallel_for(opt.n_trees, [&](std::size_t b) {
            Philox rng(opt.seed, b);
            std::vector<double> w(n, 0.0);
            if (opt.bootstrap) {
                for (std::size_t k = 0; k < n; ++k) w[rng.below(n)] += 1.0;
            } else {
                std::fill(w.begin(), w.end(), 1.0);
            }
            std::vector<Eigen::Index> rows;
            for (std::size_t i = 0; i < n; ++i) {
                if (w[i] > 0.0) rows.push_back(static_cast<Eigen::Index>(i));
            }
            fit.trees[b] = build_tree(bins, y, w, std::move(rows), opt, mtry, &rng);
        });
        return fit;
    }
    if (kind != EstimatorKind::gradient_boosting) throw ConfigError("not a tree estimator: " + to_string(kind));
    if (!(opt.learning_rate > 0.0) || opt.rounds < 1) throw ConfigError("invalid boosting settings");

    fit.learning_rate = opt.learning_rate;
    fit.base = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    const std::size_t mtry = opt.mtry > 0 ? std::min(opt.mtry, p) : p;
    Philox rng(opt.seed, 0);
    std::vector<double> F(n, fit.base), resid(n);
    const std::vector<double> w(n, 1.0);
    for (std::size_t round = 0; round < opt.rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) resid[i] = y[i] - F[i];
        auto tree = build_tree(bins, resid, w, all, opt, mtry, mtry < p ? &rng : nullptr);
        for (std::size_t i = 0; i < n; ++i) {
            F[i] += opt.learning_rate * tree.predict(X.data() + static_cast<Eigen::Index>(i), X.rows());
        }
        fit.trees.push_back(std::move(tree));
    }
    return fit;
}

}  // namespace vplab
