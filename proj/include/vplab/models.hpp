// models.hpp
// Pooled regression estimators behind the forecasting ladder: OLS on an
// orthogonal decomposition, penalized least squares by coordinate descent with
// forward-chaining cross-validation, and histogram regression-tree ensembles.

#pragma once

#include "vplab/core.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vplab {

enum class EstimatorKind { ols, lasso, ridge, elastic_net, random_forest, gradient_boosting };

std::string to_string(EstimatorKind k);

/// Column means and standard deviations (population, 1/n) of the training rows.
struct Standardizer {
    Eigen::VectorXd center, scale;
    std::vector<int> constant;  // columns with zero training sd

    static Standardizer fit(const Eigen::MatrixXd& X);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    double value = 0.0;
};

struct Tree {
    std::vector<TreeNode> nodes;
    double predict(const double* x, Eigen::Index stride) const;
};

struct FitResult {
    EstimatorKind kind = EstimatorKind::ols;
    Standardizer standardizer;
    /// Linear models: intercept and slopes on the standardized scale. Dropped
    /// columns (constant or linearly dependent) carry a zero slope.
    double intercept = 0.0;
    Eigen::VectorXd beta;
    std::vector<int> dropped;  // linearly dependent columns removed by the solver
    double lambda = kMissing;
    double alpha = kMissing;
    std::size_t sweeps = 0;
    std::size_t n_train = 0;
    // Tree ensembles work on raw columns.
    std::vector<Tree> trees;
    double base = 0.0;           // boosting start value
    double learning_rate = 1.0;  // boosting shrinkage

    /// Slopes on the original column scale.
    Eigen::VectorXd raw_slopes() const;
    double raw_intercept() const;

    double predict_row(const double* x, Eigen::Index stride = 1) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

// ---------------------------------------------------------------------------
// Linear

/// Least squares with an unpenalized intercept. Solved by a column-pivoting
/// Householder QR of the standardized, centred design; columns found linearly
/// dependent are dropped and listed in `dropped`.
FitResult fit_ols(const Eigen::MatrixXd& X, std::span<const double> y);

/// Solve from a ready triangular factor: `R` is the (p+1)x(p+1) factor of the
/// centred, standardized design and `z` its rotated response. Used by the
/// walk-forward engine, whose factor is updated one row at a time.
FitResult ols_from_factor(const Eigen::MatrixXd& R, const Eigen::VectorXd& z, const Standardizer& st, double y_mean,
                          std::size_t n);

struct ShrinkageOptions {
    double tol = 1e-7;              // max coefficient change per sweep
    std::size_t max_sweeps = 100000;
};

/// Coordinate descent on (1/2n)|y - Xb|^2 + lambda (alpha |b|_1 + (1-alpha)/2 |b|^2)
/// with X standardized on the training rows and the intercept unpenalized.
/// `kind` fixes alpha for lasso (1) and ridge (0); elastic_net uses `alpha`.
FitResult fit_shrinkage(const Eigen::MatrixXd& X, std::span<const double> y, EstimatorKind kind, double lambda,
                        double alpha = 0.5, const ShrinkageOptions& opt = {});

/// Penalty mixing actually used for `kind`.
double mixing_for(EstimatorKind kind, double alpha);

/// Smallest lambda that zeroes every lasso slope: max_j |x_j' y_c| / n on the
/// standardized design.
double lasso_lambda_max(const Eigen::MatrixXd& X, std::span<const double> y);

enum class CvRule { min_mse, one_se };

struct CvOptions {
    std::size_t splits = 5;
    std::size_t grid_points = 50;
    double lambda_lo = 1e-4;
    double lambda_hi = 10.0;
    CvRule rule = CvRule::min_mse;
    ShrinkageOptions solver;
};

struct CvResult {
    std::vector<double> grid;  // descending
    std::vector<double> mse, se;
    std::size_t chosen = 0;
    double lambda = 0.0;
};

/// Forward-chaining CV over contiguous blocks of distinct `time` values. Split
/// k trains on blocks 0..k-1 and validates on block k; training rows whose
/// label window (time, label_end] reaches past the first validation time are
/// purged. `label_end[i]` is the last time index row i's target depends on.
CvResult cross_validate_lambda(const Eigen::MatrixXd& X, std::span<const double> y, std::span<const double> time,
                               std::span<const double> label_end, EstimatorKind kind, double alpha,
                               const CvOptions& opt = {});

// ---------------------------------------------------------------------------
// Trees

struct TreeOptions {
    std::size_t n_trees = 300;
    int max_depth = 6;
    std::size_t min_leaf = 20;
    std::size_t mtry = 0;  // features tried per split; 0 = floor(p/3) for forests, p for boosting
    double learning_rate = 0.05;
    std::size_t rounds = 200;
    bool bootstrap = true;
    std::uint64_t seed = 1;
    std::size_t max_bins = 256;
};

/// Random forest (bagged, feature-subsampled) or squared-loss gradient boosting.
/// Requires at least 50 rows.
FitResult fit_tree_ensemble(const Eigen::MatrixXd& X, std::span<const double> y, EstimatorKind kind,
                            const TreeOptions& opt = {});

/// One unbagged tree using every feature at each split; no row minimum.
Tree fit_regression_tree(const Eigen::MatrixXd& X, std::span<const double> y, const TreeOptions& opt);

}  // namespace vplab
