#include "marketgeo/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "marketgeo/errors.hpp"

namespace marketgeo {

CorrelationMatrix correlation_matrix(const NormalizedWindow& window) {
    CorrelationMatrix c;
    c.values = window.vectors * window.vectors.transpose();
    // The gemm product is symmetric only up to rounding; mirror one triangle
    // so downstream code sees an exactly self-adjoint matrix.
    c.values.triangularView<Eigen::StrictlyUpper>() = c.values.transpose();
    c.values = c.values.cwiseMax(-1.0).cwiseMin(1.0);
    c.values.diagonal().setOnes();
    return c;
}

DistanceMatrix distance_matrix(const CorrelationMatrix& correlation) {
    const Eigen::MatrixXd& c = correlation.values;
    if (c.rows() != c.cols()) {
        throw ValidationError("correlation matrix must be square");
    }
    DistanceMatrix d;
    d.values.resize(c.rows(), c.cols());
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        for (Eigen::Index j = 0; j < c.cols(); ++j) {
            double v = c(i, j);
            if (v < -1.0 - 1e-9 || v > 1.0 + 1e-9) {
                throw NumericalError("correlation " + std::to_string(v) + " at (" +
                                     std::to_string(i) + ", " + std::to_string(j) +
                                     ") lies outside [-1, 1]");
            }
            v = std::min(std::max(v, -1.0), 1.0);
            d.values(i, j) = std::sqrt(2.0 * (1.0 - v));
        }
    }
    d.values.diagonal().setZero();
    return d;
}

MarketEmbedding embed(const DistanceMatrix& distances) {
    const Eigen::MatrixXd& dist = distances.values;
    const Eigen::Index n = dist.rows();
    if (dist.cols() != n) {
        throw ValidationError("distance matrix must be square");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(dist(i, i)) > 1e-12) {
            throw ValidationError("distance matrix has a nonzero diagonal entry at " +
                                  std::to_string(i));
        }
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (dist(i, j) < 0.0 || std::abs(dist(i, j) - dist(j, i)) > 1e-9) {
                throw ValidationError("distance matrix is not symmetric and nonnegative at (" +
                                      std::to_string(i) + ", " + std::to_string(j) + ")");
            }
        }
    }

    // Double centering: B = -1/2 J D^2 J recovers the Gram matrix of the
    // centered configuration from squared distances.
    Eigen::MatrixXd sq = dist.array().square().matrix();
    Eigen::VectorXd row_mean = sq.rowwise().mean();
    const double grand_mean = row_mean.mean();
    Eigen::MatrixXd b(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            b(i, j) = -0.5 * (sq(i, j) - row_mean(i) - row_mean(j) + grand_mean);
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition of the centered Gram matrix failed");
    }
    const Eigen::VectorXd& evals = solver.eigenvalues(); // ascending
    const double lambda_max = evals(n - 1);

    MarketEmbedding out;
    out.total_norms = Eigen::VectorXd::Zero(n);
    if (!(lambda_max > 0.0)) {
        // All points coincide: nothing to embed, every norm is zero.
        out.coordinates.resize(n, 0);
        out.eigenvalues.resize(0);
        return out;
    }
    if (evals(0) < -1e-8 * lambda_max) {
        throw NumericalError("distances are not Euclidean: eigenvalue " +
                             std::to_string(evals(0)) + " is significantly negative");
    }

    const double floor = 1e-10 * lambda_max;
    Eigen::Index kept = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (evals(i) > floor) ++kept;
    }
    out.coordinates.resize(n, kept);
    out.eigenvalues.resize(kept);
    for (Eigen::Index j = 0; j < kept; ++j) {
        const Eigen::Index src = n - 1 - j; // descending order
        const double lambda = evals(src);
        out.eigenvalues(j) = lambda;
        Eigen::VectorXd axis = solver.eigenvectors().col(src) * std::sqrt(lambda);
        // Deterministic orientation: first meaningfully nonzero entry positive.
        const double tol = 1e-8 * axis.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(axis(i)) > tol) {
                if (axis(i) < 0.0) axis = -axis;
                break;
            }
        }
        out.coordinates.col(j) = axis;
    }
    out.total_norms = out.coordinates.rowwise().norm();
    return out;
}

Eigen::VectorXd eigenvalue_spectrum(const MarketEmbedding& embedding, int n_assets) {
    if (n_assets < 2) {
        throw ConfigError("spectrum needs at least 2 assets");
    }
    Eigen::VectorXd spec = Eigen::VectorXd::Zero(n_assets - 1);
    const Eigen::Index m = std::min<Eigen::Index>(embedding.eigenvalues.size(), n_assets - 1);
    spec.head(m) = embedding.eigenvalues.head(m);
    return spec;
}

} // namespace marketgeo
