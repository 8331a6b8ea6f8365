#pragma once

#include <Eigen/Core>
#include <limits>
#include <string>
#include <vector>

#include "marketgeo/geometry.hpp"

namespace marketgeo {

// The embedding cut down to its f leading axes, together with how much of
// each stock's geometry survives the cut.
struct EffectiveSubspace {
    int f = 0;
    Eigen::MatrixXd coordinates;          // N x f
    Eigen::VectorXd weights;              // per stock: norm inside / norm overall, in [0, 1]
    Eigen::MatrixXd restricted_distances; // pairwise distances within the subspace
};

// Asking for more axes than the embedding retained raises ValidationError.
EffectiveSubspace restrict_to_subspace(const MarketEmbedding& embedding, int f);

// Covariance attributed to the retained market structure. Entry (k,l) is
//   w_k sd_k * w_l sd_l * (1 - d_f(k,l)^2 / 2)
// with sd the raw window standard deviation (1/n moments) and d_f the
// subspace distance, so shrinking the subspace discounts both the shared
// direction and each stock's participation in it.
struct SystematicCovariance {
    Eigen::MatrixXd values;
    Eigen::VectorXd means;     // raw per-stock window means
    Eigen::VectorXd variances; // raw per-stock window population variances
};

// raw_window is the unnormalized return slice, one row per day, one column
// per stock; its column count must match the subspace.
SystematicCovariance systematic_covariance(const EffectiveSubspace& subspace,
                                           const Eigen::MatrixXd& raw_window);

// Population covariance (1/N) of a cloud of N row-points.
Eigen::MatrixXd population_scatter(const Eigen::MatrixXd& points);

// Mardia's multivariate kurtosis: the average fourth power of the
// Mahalanobis norm of each point under the given scatter. Needs more points
// than dimensions; a scatter with a non-positive eigenvalue or condition
// number beyond 1e12 raises SingularCovarianceError.
double mardia_b2p(const Eigen::MatrixXd& points, const Eigen::MatrixXd& scatter);

// Asymptotic standardization of b2p against the normal-theory null:
// (b2p - p(p+2)) / sqrt(8 p (p+2) / n).
double mardia_t2(double b2p, int p, int n_points);

// One rolling window's kurtosis measurements. Windows that could not be
// evaluated stay invalid with NaN values and carry an explanatory note.
struct KurtosisPoint {
    int window_index = -1;
    double b2p = std::numeric_limits<double>::quiet_NaN();
    double t2 = std::numeric_limits<double>::quiet_NaN();
    double g = std::numeric_limits<double>::quiet_NaN();
    bool valid = false;
    std::string note;
};

// Business-as-usual reference distribution of b2p.
struct Baseline {
    double mean_b2p = 0.0;
    double std_b2p = 0.0;
    int first_window = 0; // inclusive window-index range it was fit on
    int last_window = 0;
};

// Fills g = (b2p - baseline mean) / baseline std for every valid point;
// invalid points keep NaN.
void g_statistic(std::vector<KurtosisPoint>& points, const Baseline& baseline);

} // namespace marketgeo
