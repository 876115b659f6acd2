#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "molres/reservoir.hpp"

namespace molres {

/// Contiguous 70/15/15 temporal split; offsets rotate the row sequence by
/// offset_index * n_rows / n_offsets before partitioning.
struct SplitSpec {
    double train_frac = 0.70;
    double val_frac = 0.15;
    int n_offsets = 6;
    int offset_index = 0;
};

struct SplitIndices {
    std::vector<int> train;
    std::vector<int> val;
    std::vector<int> test;
};

/// Tapped-delay embedding: row j is [r[n]; r[n-1]; ...; r[n-k]] for n = k + j.
Eigen::MatrixXd embed(const StateTrajectory& traj, int k);

/// y[n] = u[n + H] for n in [0, len - H); entry n aligns with window n.
Eigen::VectorXd make_targets(std::span<const double> u, int horizon);

/// Feature/target rows usable jointly for depth k and horizon H:
/// windows n in [k, len - H), count len - k - H.
struct AlignedRows {
    Eigen::MatrixXd features;
    Eigen::VectorXd targets;
    int first_window = 0;
};
AlignedRows assemble_rows(const StateTrajectory& traj, int k, int horizon);

/// Row indices (into the assembled rows) for one rotated contiguous split.
/// After a nonzero rotation the k rows whose feature windows reach back
/// across the cut are dropped.
SplitIndices split(int n_rows, int k, const SplitSpec& spec);

/// Affine PCA projection fitted on training rows only.
struct PcaProjection {
    Eigen::VectorXd mean;
    Eigen::MatrixXd basis; // d x n_components, orthonormal columns
    Eigen::VectorXd explained_variance;
    double explained_fraction = 0.0;
    int n_components = 0;
    bool degenerate = false; // zero-variance training data
};

PcaProjection fit_pca(const Eigen::MatrixXd& train_rows, double var_frac = 0.95);
Eigen::MatrixXd pca_project(const PcaProjection& p, const Eigen::MatrixXd& rows);

/// Linear readout with an explicit unregularized bias term.
struct RidgeModel {
    Eigen::VectorXd weights; // size p; applied to projected features
    double bias = 0.0;
    bool rank_deficient = false;
};

RidgeModel fit_ridge(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                     double lambda);
Eigen::VectorXd ridge_predict(const RidgeModel& m, const Eigen::MatrixXd& features);

std::vector<double> default_lambda_grid(); // 1e-8 .. 1e2, 11 log-spaced points

/// Validation-NRMSE selection over the grid; ties break toward larger lambda.
struct LambdaChoice {
    double lambda = 0.0;
    RidgeModel model; // fitted on the training rows at the chosen lambda
    double val_nrmse = 0.0;
};
LambdaChoice select_lambda(std::span<const double> candidates, const Eigen::MatrixXd& train_x,
                           const Eigen::VectorXd& train_y, const Eigen::MatrixXd& val_x,
                           const Eigen::VectorXd& val_y);

/// RMSE normalized by the population standard deviation of the target.
double nrmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& target);
double pearson(const Eigen::VectorXd& pred, const Eigen::VectorXd& target);
/// Coefficient of determination 1 - SS_res / SS_tot.
double r_squared(const Eigen::VectorXd& pred, const Eigen::VectorXd& target);

double median(std::vector<double> values);

struct EvalPoint {
    int horizon = 0;
    int depth = 0;
    int offset = 0;
    double lambda = 0.0;
    int n_components = 0;
    double nrmse_value = 0.0;
    double correlation = 0.0;
};

struct EvalSummary {
    std::vector<EvalPoint> offsets;
    double median_nrmse = 0.0;
    double median_correlation = 0.0;
};

struct ReadoutOptions {
    double var_frac = 0.95;
    std::vector<double> lambda_grid = default_lambda_grid();
    SplitSpec split;
    int workers = 1;
};

/// Full pipeline (embed, targets, split, PCA, lambda selection, ridge, test
/// metrics) per split offset, plus medians across offsets.
EvalSummary evaluate(const StateTrajectory& traj, int horizon, int depth,
                     const ReadoutOptions& options = {});

struct MemoryCurve {
    std::vector<double> r2; // R^2(d) for d = 1..d_max, clipped to [0, 1]
    double capacity = 0.0;  // sum of the stored values
};

/// Delay reconstruction u[n - d] from r[n] (depth-0 features), one fresh
/// PCA+ridge readout per delay, evaluated on the offset-0 test split.
MemoryCurve memory_curve(const StateTrajectory& traj, int d_max,
                         const ReadoutOptions& options = {});

} // namespace molres
