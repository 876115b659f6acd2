#include "molres/readout.hpp"

#include <algorithm>
#include <cmath>

#include "molres/errors.hpp"
#include "molres/parallel.hpp"

namespace molres {

Eigen::MatrixXd embed(const StateTrajectory& traj, int k) {
    if (k < 0) throw config_error("embed: depth must be >= 0");
    const long t = traj.n_windows();
    if (t <= k) throw insufficient_data_error("embed: trajectory shorter than depth + 1");
    const int dim = traj.state_dim;
    const long rows = t - k;
    Eigen::MatrixXd phi(rows, static_cast<long>(dim) * (k + 1));
    for (long j = 0; j < rows; ++j) {
        const long n = k + j;
        for (int lag = 0; lag <= k; ++lag) {
            const auto r = traj.state(n - lag);
            for (int i = 0; i < dim; ++i)
                phi(j, static_cast<long>(lag) * dim + i) = r[static_cast<std::size_t>(i)];
        }
    }
    return phi;
}

Eigen::VectorXd make_targets(std::span<const double> u, int horizon) {
    if (horizon < 0) throw config_error("make_targets: horizon must be >= 0");
    if (static_cast<long>(u.size()) <= horizon)
        throw insufficient_data_error("make_targets: horizon exceeds sequence length");
    const long rows = static_cast<long>(u.size()) - horizon;
    Eigen::VectorXd y(rows);
    for (long n = 0; n < rows; ++n) y(n) = u[static_cast<std::size_t>(n + horizon)];
    return y;
}

AlignedRows assemble_rows(const StateTrajectory& traj, int k, int horizon) {
    const long t = traj.n_windows();
    const long usable = t - k - horizon;
    if (usable < 1)
        throw insufficient_data_error("assemble_rows: trajectory too short for depth + horizon");
    Eigen::MatrixXd phi = embed(traj, k);
    Eigen::VectorXd y = make_targets(traj.inputs, horizon);
    AlignedRows out;
    out.features = phi.topRows(usable);
    out.targets = y.segment(k, usable);
    out.first_window = k;
    return out;
}

SplitIndices split(int n_rows, int k, const SplitSpec& spec) {
    if (spec.n_offsets < 1) throw config_error("split: n_offsets must be >= 1");
    if (spec.offset_index < 0 || spec.offset_index >= spec.n_offsets)
        throw config_error("split: offset_index out of range");
    if (k < 0) throw config_error("split: depth must be >= 0");

    const int rotation = static_cast<int>(
        static_cast<long>(spec.offset_index) * n_rows / spec.n_offsets);
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n_rows));
    for (int i = rotation; i < n_rows; ++i) order.push_back(i);
    for (int i = 0; i < rotation; ++i) order.push_back(i);

    // Rows right after the cut have feature windows overlapping rows from the
    // far end of the rotated sequence; drop them so no window crosses the seam.
    const int dropped = rotation > 0 ? std::min(k, n_rows) : 0;
    order.erase(order.begin(), order.begin() + dropped);

    const int usable = static_cast<int>(order.size());
    const int n_train = static_cast<int>(std::floor(spec.train_frac * usable));
    const int n_val = static_cast<int>(std::floor(spec.val_frac * usable));
    const int n_test = usable - n_train - n_val;
    if (n_train < 2 || n_val < 1 || n_test < 2)
        throw insufficient_data_error("split: too few rows for a 70/15/15 partition");

    SplitIndices out;
    out.train.assign(order.begin(), order.begin() + n_train);
    out.val.assign(order.begin() + n_train, order.begin() + n_train + n_val);
    out.test.assign(order.begin() + n_train + n_val, order.end());
    return out;
}

namespace {

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m, const std::vector<int>& idx) {
    Eigen::MatrixXd out(static_cast<long>(idx.size()), m.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<long>(i)) = m.row(idx[i]);
    return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& idx) {
    Eigen::VectorXd out(static_cast<long>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<long>(i)) = v(idx[i]);
    return out;
}

// Fix each component's sign so its largest-magnitude loading is positive
// (first index wins ties), making the basis deterministic.
void canonicalize_sign(Eigen::MatrixXd& basis) {
    for (long c = 0; c < basis.cols(); ++c) {
        long best = 0;
        double best_abs = -1.0;
        for (long r = 0; r < basis.rows(); ++r) {
            const double a = std::abs(basis(r, c));
            if (a > best_abs) {
                best_abs = a;
                best = r;
            }
        }
        if (basis(best, c) < 0.0) basis.col(c) = -basis.col(c);
    }
}

} // namespace

PcaProjection fit_pca(const Eigen::MatrixXd& train_rows, double var_frac) {
    const long n = train_rows.rows();
    const long d = train_rows.cols();
    if (n < 2) throw insufficient_data_error("fit_pca: need at least 2 training rows");
    if (!(var_frac > 0.0) || var_frac > 1.0)
        throw config_error("fit_pca: variance fraction must lie in (0, 1]");

    PcaProjection p;
    p.mean = train_rows.colwise().mean();
    Eigen::MatrixXd centered = train_rows.rowwise() - p.mean.transpose();

    const double denom = static_cast<double>(n - 1);
    Eigen::VectorXd eigvals;
    Eigen::MatrixXd components; // d x r
    if (n <= d) {
        // Gram trick: eigenvectors of X X^T map onto the principal axes.
        Eigen::MatrixXd gram = centered * centered.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        const Eigen::VectorXd ev = es.eigenvalues().reverse();
        const Eigen::MatrixXd u = es.eigenvectors().rowwise().reverse();
        eigvals = ev / denom;
        components.resize(d, ev.size());
        for (long i = 0; i < ev.size(); ++i) {
            if (ev(i) > 0.0)
                components.col(i) = centered.transpose() * u.col(i) / std::sqrt(ev(i));
            else
                components.col(i).setZero();
        }
    } else {
        Eigen::MatrixXd cov = centered.transpose() * centered / denom;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        eigvals = es.eigenvalues().reverse();
        components = es.eigenvectors().rowwise().reverse();
    }

    const double total = std::max(eigvals.sum(), 0.0);
    const double floor_ev = 1e-12 * (eigvals.size() > 0 ? std::max(eigvals(0), 0.0) : 0.0);
    if (total <= 0.0 || eigvals.size() == 0 || eigvals(0) <= 0.0) {
        p.degenerate = true;
        p.n_components = 0;
        p.basis.resize(d, 0);
        p.explained_variance.resize(0);
        p.explained_fraction = 0.0;
        return p;
    }

    long keep = 0;
    double accum = 0.0;
    for (long i = 0; i < eigvals.size(); ++i) {
        if (eigvals(i) <= floor_ev) break;
        accum += eigvals(i);
        ++keep;
        if (accum / total >= var_frac) break;
    }
    if (keep == 0) keep = 1;

    p.basis = components.leftCols(keep);
    canonicalize_sign(p.basis);
    p.explained_variance = eigvals.head(keep);
    p.explained_fraction = accum / total;
    p.n_components = static_cast<int>(keep);
    return p;
}

Eigen::MatrixXd pca_project(const PcaProjection& p, const Eigen::MatrixXd& rows) {
    return (rows.rowwise() - p.mean.transpose()) * p.basis;
}

RidgeModel fit_ridge(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                     double lambda) {
    if (lambda < 0.0) throw config_error("fit_ridge: lambda must be >= 0");
    if (features.rows() != targets.size())
        throw config_error("fit_ridge: feature/target row mismatch");
    const long n = features.rows();
    const long p = features.cols();

    Eigen::MatrixXd a(n, p + 1);
    a.leftCols(p) = features;
    a.col(p).setOnes();

    RidgeModel model;
    Eigen::VectorXd w;
    if (lambda > 0.0) {
        Eigen::MatrixXd normal = a.transpose() * a;
        for (long i = 0; i < p; ++i) normal(i, i) += lambda; // bias stays unregularized
        Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
        w = ldlt.solve(a.transpose() * targets);
    } else {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
        model.rank_deficient = qr.rank() < p + 1;
        w = qr.solve(targets);
    }
    model.weights = w.head(p);
    model.bias = w(p);
    return model;
}

Eigen::VectorXd ridge_predict(const RidgeModel& m, const Eigen::MatrixXd& features) {
    return (features * m.weights).array() + m.bias;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    grid.reserve(11);
    for (int e = -8; e <= 2; ++e) grid.push_back(std::pow(10.0, e));
    return grid;
}

LambdaChoice select_lambda(std::span<const double> candidates, const Eigen::MatrixXd& train_x,
                           const Eigen::VectorXd& train_y, const Eigen::MatrixXd& val_x,
                           const Eigen::VectorXd& val_y) {
    if (candidates.empty()) throw config_error("select_lambda: candidate grid is empty");
    LambdaChoice best;
    bool have = false;
    for (double lambda : candidates) {
        RidgeModel m = fit_ridge(train_x, train_y, lambda);
        const double score = nrmse(ridge_predict(m, val_x), val_y);
        // Ties break toward larger lambda, so >= on equal scores.
        if (!have || score < best.val_nrmse ||
            (score == best.val_nrmse && lambda > best.lambda)) {
            best.lambda = lambda;
            best.model = std::move(m);
            best.val_nrmse = score;
            have = true;
        }
    }
    return best;
}

double nrmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& target) {
    if (pred.size() != target.size() || target.size() < 2)
        throw metric_error("nrmse: need two equal-length series");
    const double mean = target.mean();
    const double var = (target.array() - mean).square().mean();
    if (var <= 0.0) throw metric_error("nrmse: target has zero variance");
    const double mse = (pred - target).array().square().mean();
    return std::sqrt(mse) / std::sqrt(var);
}

double pearson(const Eigen::VectorXd& pred, const Eigen::VectorXd& target) {
    if (pred.size() != target.size() || target.size() < 2)
        throw metric_error("pearson: need two equal-length series");
    const Eigen::ArrayXd x = pred.array() - pred.mean();
    const Eigen::ArrayXd y = target.array() - target.mean();
    const double sx = std::sqrt(x.square().sum());
    const double sy = std::sqrt(y.square().sum());
    if (sx <= 0.0 || sy <= 0.0) throw metric_error("pearson: constant input series");
    return (x * y).sum() / (sx * sy);
}

double r_squared(const Eigen::VectorXd& pred, const Eigen::VectorXd& target) {
    if (pred.size() != target.size() || target.size() < 2)
        throw metric_error("r_squared: need two equal-length series");
    const double mean = target.mean();
    const double ss_tot = (target.array() - mean).square().sum();
    if (ss_tot <= 0.0) throw metric_error("r_squared: target has zero variance");
    const double ss_res = (pred - target).array().square().sum();
    return 1.0 - ss_res / ss_tot;
}

double median(std::vector<double> values) {
    if (values.empty()) throw metric_error("median: empty input");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

EvalPoint evaluate_offset(const AlignedRows& rows, int horizon, int depth, int offset,
                          const ReadoutOptions& options) {
    SplitSpec spec = options.split;
    spec.offset_index = offset;
    const SplitIndices idx = split(static_cast<int>(rows.features.rows()), depth, spec);

    const Eigen::MatrixXd train_rows = gather_rows(rows.features, idx.train);
    const PcaProjection pca = fit_pca(train_rows, options.var_frac);

    const Eigen::MatrixXd train_x = pca_project(pca, train_rows);
    const Eigen::MatrixXd val_x = pca_project(pca, gather_rows(rows.features, idx.val));
    const Eigen::MatrixXd test_x = pca_project(pca, gather_rows(rows.features, idx.test));
    const Eigen::VectorXd train_y = gather(rows.targets, idx.train);
    const Eigen::VectorXd val_y = gather(rows.targets, idx.val);
    const Eigen::VectorXd test_y = gather(rows.targets, idx.test);

    const LambdaChoice choice =
        select_lambda(options.lambda_grid, train_x, train_y, val_x, val_y);
    const Eigen::VectorXd pred = ridge_predict(choice.model, test_x);

    EvalPoint point;
    point.horizon = horizon;
    point.depth = depth;
    point.offset = offset;
    point.lambda = choice.lambda;
    point.n_components = pca.n_components;
    point.nrmse_value = nrmse(pred, test_y);
    point.correlation = pearson(pred, test_y);
    return point;
}

} // namespace

EvalSummary evaluate(const StateTrajectory& traj, int horizon, int depth,
                     const ReadoutOptions& options) {
    const AlignedRows rows = assemble_rows(traj, depth, horizon);
    const int n_offsets = options.split.n_offsets;

    EvalSummary summary;
    summary.offsets.resize(static_cast<std::size_t>(n_offsets));
    parallel_for(static_cast<std::size_t>(n_offsets), options.workers,
                 [&](std::size_t begin, std::size_t end) {
                     for (std::size_t o = begin; o < end; ++o)
                         summary.offsets[o] =
                             evaluate_offset(rows, horizon, depth, static_cast<int>(o), options);
                 });

    std::vector<double> nrmses, correlations;
    for (const auto& pt : summary.offsets) {
        nrmses.push_back(pt.nrmse_value);
        correlations.push_back(pt.correlation);
    }
    summary.median_nrmse = median(nrmses);
    summary.median_correlation = median(correlations);
    return summary;
}

MemoryCurve memory_curve(const StateTrajectory& traj, int d_max, const ReadoutOptions& options) {
    if (d_max < 0) throw config_error("memory_curve: d_max must be >= 0");
    MemoryCurve curve;
    if (d_max == 0) return curve;
    const long t = traj.n_windows();
    if (t <= d_max + 10)
        throw insufficient_data_error("memory_curve: trajectory too short for d_max");

    const Eigen::MatrixXd all_states = embed(traj, 0);
    curve.r2.assign(static_cast<std::size_t>(d_max), 0.0);

    parallel_for(static_cast<std::size_t>(d_max), options.workers,
                 [&](std::size_t begin, std::size_t end) {
        for (std::size_t di = begin; di < end; ++di) {
            const int d = static_cast<int>(di) + 1;
            const long rows = t - d;
            // Features r[n], targets u[n - d], for n = d .. t-1.
            Eigen::MatrixXd features = all_states.bottomRows(rows);
            Eigen::VectorXd targets(rows);
            for (long j = 0; j < rows; ++j) targets(j) = traj.inputs[static_cast<std::size_t>(j)];

            SplitSpec spec = options.split;
            spec.offset_index = 0;
            const SplitIndices idx = split(static_cast<int>(rows), 0, spec);

            const Eigen::MatrixXd train_rows = gather_rows(features, idx.train);
            const PcaProjection pca = fit_pca(train_rows, options.var_frac);
            const Eigen::MatrixXd train_x = pca_project(pca, train_rows);
            const Eigen::MatrixXd val_x = pca_project(pca, gather_rows(features, idx.val));
            const Eigen::MatrixXd test_x = pca_project(pca, gather_rows(features, idx.test));
            const Eigen::VectorXd train_y = gather(targets, idx.train);
            const Eigen::VectorXd val_y = gather(targets, idx.val);
            const Eigen::VectorXd test_y = gather(targets, idx.test);

            const LambdaChoice choice =
                select_lambda(options.lambda_grid, train_x, train_y, val_x, val_y);
            const double raw = r_squared(ridge_predict(choice.model, test_x), test_y);
            curve.r2[di] = std::clamp(raw, 0.0, 1.0);
        }
    });

    curve.capacity = 0.0;
    for (double v : curve.r2) curve.capacity += v;
    return curve;
}

} // namespace molres
