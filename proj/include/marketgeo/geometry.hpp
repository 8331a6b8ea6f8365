#pragma once

#include <Eigen/Core>

#include "marketgeo/returns.hpp"

namespace marketgeo {

struct CorrelationMatrix {
    Eigen::MatrixXd values; // N x N, unit diagonal, entries in [-1, 1]
};

struct DistanceMatrix {
    Eigen::MatrixXd values; // N x N, zero diagonal, entries in [0, 2]
};

// The point cloud recovered from pairwise distances by classical scaling.
struct MarketEmbedding {
    Eigen::MatrixXd coordinates; // N x m, axis j scaled by sqrt(eigenvalue j)
    Eigen::VectorXd eigenvalues; // m, descending, all above the retention floor
    Eigen::VectorXd total_norms; // N, per-stock norm across all retained axes
};

// Gram matrix of the normalized histories. Because the rows have unit norm,
// entry (k,l) is exactly the Pearson correlation of the two stocks over the
// window. Entries are clipped into [-1, 1] and the diagonal pinned to 1.
CorrelationMatrix correlation_matrix(const NormalizedWindow& window);

// d(k,l) = sqrt(2 (1 - c)). Equals the Euclidean distance between the
// normalized history vectors. Correlations beyond [-1-1e-9, 1+1e-9] raise
// NumericalError; smaller excursions are clamped before the square root.
DistanceMatrix distance_matrix(const CorrelationMatrix& correlation);

// Classical (Torgerson) scaling: double-center the squared distances,
// eigendecompose, keep axes whose eigenvalue exceeds 1e-10 times the largest,
// and scale eigenvectors by sqrt(eigenvalue). A significantly negative
// eigenvalue (below -1e-8 times the largest) means the distances are not
// Euclidean and raises NumericalError. Each axis's sign is fixed so its
// first nonzero coordinate is positive.
MarketEmbedding embed(const DistanceMatrix& distances);

// Retained eigenvalues padded with zeros to the full length N-1, i.e. the
// most dimensions N points can span around their centroid.
Eigen::VectorXd eigenvalue_spectrum(const MarketEmbedding& embedding, int n_assets);

} // namespace marketgeo
