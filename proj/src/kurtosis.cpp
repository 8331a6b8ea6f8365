#include "marketgeo/kurtosis.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "marketgeo/errors.hpp"

namespace marketgeo {

EffectiveSubspace restrict_to_subspace(const MarketEmbedding& embedding, int f) {
    if (f < 1) {
        throw ConfigError("subspace dimension must be at least 1");
    }
    if (f > embedding.coordinates.cols()) {
        throw ValidationError("subspace dimension " + std::to_string(f) + " exceeds the " +
                              std::to_string(embedding.coordinates.cols()) + " retained axes");
    }
    const Eigen::Index n = embedding.coordinates.rows();
    EffectiveSubspace sub;
    sub.f = f;
    sub.coordinates = embedding.coordinates.leftCols(f);
    sub.weights.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double total = embedding.total_norms(k);
        sub.weights(k) = total > 1e-300 ? sub.coordinates.row(k).norm() / total : 0.0;
    }
    sub.restricted_distances.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        sub.restricted_distances(k, k) = 0.0;
        for (Eigen::Index l = k + 1; l < n; ++l) {
            const double d = (sub.coordinates.row(k) - sub.coordinates.row(l)).norm();
            sub.restricted_distances(k, l) = d;
            sub.restricted_distances(l, k) = d;
        }
    }
    return sub;
}

SystematicCovariance systematic_covariance(const EffectiveSubspace& subspace,
                                           const Eigen::MatrixXd& raw_window) {
    const Eigen::Index n_assets = subspace.coordinates.rows();
    if (raw_window.cols() != n_assets) {
        throw ValidationError("raw window has " + std::to_string(raw_window.cols()) +
                              " assets but the subspace has " + std::to_string(n_assets));
    }
    if (raw_window.rows() < 2) {
        throw ValidationError("raw window needs at least two observations");
    }
    const double n = static_cast<double>(raw_window.rows());
    SystematicCovariance out;
    out.means.resize(n_assets);
    out.variances.resize(n_assets);
    Eigen::VectorXd amplitude(n_assets);
    for (Eigen::Index k = 0; k < n_assets; ++k) {
        const double mean = raw_window.col(k).sum() / n;
        double var = 0.0;
        for (Eigen::Index i = 0; i < raw_window.rows(); ++i) {
            const double dx = raw_window(i, k) - mean;
            var += dx * dx;
        }
        var /= n;
        out.means(k) = mean;
        out.variances(k) = var;
        amplitude(k) = subspace.weights(k) * std::sqrt(var);
    }
    out.values.resize(n_assets, n_assets);
    for (Eigen::Index k = 0; k < n_assets; ++k) {
        for (Eigen::Index l = k; l < n_assets; ++l) {
            const double d = subspace.restricted_distances(k, l);
            const double v = amplitude(k) * amplitude(l) * (1.0 - 0.5 * d * d);
            out.values(k, l) = v;
            out.values(l, k) = v;
        }
    }
    return out;
}

Eigen::MatrixXd population_scatter(const Eigen::MatrixXd& points) {
    const double n = static_cast<double>(points.rows());
    if (points.rows() < 1) {
        throw ValidationError("cannot form a scatter matrix from zero points");
    }
    Eigen::MatrixXd centered = points.rowwise() - points.colwise().mean();
    return centered.transpose() * centered / n;
}

double mardia_b2p(const Eigen::MatrixXd& points, const Eigen::MatrixXd& scatter) {
    const Eigen::Index n = points.rows();
    const Eigen::Index p = points.cols();
    if (p < 1) {
        throw ValidationError("kurtosis needs at least one dimension");
    }
    if (n <= p) {
        throw ValidationError("kurtosis needs more points (" + std::to_string(n) +
                              ") than dimensions (" + std::to_string(p) + ")");
    }
    if (scatter.rows() != p || scatter.cols() != p) {
        throw ValidationError("scatter matrix shape does not match the points");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(scatter);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition of the scatter matrix failed");
    }
    const Eigen::VectorXd& evals = solver.eigenvalues();
    const double lo = evals(0);
    const double hi = evals(p - 1);
    if (!(lo > 0.0) || hi / lo > 1e12) {
        throw SingularCovarianceError(
            "scatter matrix is singular or too ill-conditioned to invert (eigenvalues " +
            std::to_string(lo) + " .. " + std::to_string(hi) + ")");
    }
    // Invert through the eigendecomposition; with the condition bound above
    // this is stable and keeps the inverse exactly symmetric.
    Eigen::MatrixXd inv = solver.eigenvectors() * evals.cwiseInverse().asDiagonal() *
                          solver.eigenvectors().transpose();
    Eigen::MatrixXd centered = points.rowwise() - points.colwise().mean();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double m = centered.row(i) * inv * centered.row(i).transpose();
        acc += m * m;
    }
    return acc / static_cast<double>(n);
}

double mardia_t2(double b2p, int p, int n_points) {
    if (p < 1 || n_points < 1) {
        throw ConfigError("t2 needs positive dimension and point count");
    }
    const double pd = static_cast<double>(p);
    const double expected = pd * (pd + 2.0);
    const double scale = std::sqrt(8.0 * pd * (pd + 2.0) / static_cast<double>(n_points));
    return (b2p - expected) / scale;
}

void g_statistic(std::vector<KurtosisPoint>& points, const Baseline& baseline) {
    if (!(baseline.std_b2p > 0.0)) {
        throw DegenerateBaselineError("baseline has no spread; g is undefined");
    }
    for (auto& pt : points) {
        if (pt.valid) {
            pt.g = (pt.b2p - baseline.mean_b2p) / baseline.std_b2p;
        }
    }
}

} // namespace marketgeo
