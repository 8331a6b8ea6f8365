#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "marketgeo/errors.hpp"
#include "marketgeo/geometry.hpp"
#include "marketgeo/kurtosis.hpp"

using namespace marketgeo;

namespace {

// Three stocks at hand-picked coordinates with norms 5, 2, 3, so the
// axis-by-axis weights and distances are readable off the numbers.
MarketEmbedding hand_embedding() {
    MarketEmbedding e;
    e.coordinates.resize(3, 3);
    e.coordinates << 3.0, 0.0, 4.0,
        0.0, 2.0, 0.0,
        -1.0, 2.0, 2.0;
    e.eigenvalues.resize(3);
    e.eigenvalues << 10.0, 8.0, 5.0; // descending; values irrelevant here
    e.total_norms = e.coordinates.rowwise().norm();
    return e;
}

Eigen::MatrixXd iid_points(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) m(r, c) = gauss(rng);
    }
    return m;
}

} // namespace

TEST_SUITE("kurtosis") {

TEST_CASE("restricting to the full embedding changes nothing") {
    const NormalizedWindow w = testutil::random_window(8, 40, 83);
    const DistanceMatrix d = distance_matrix(correlation_matrix(w));
    const MarketEmbedding e = embed(d);
    const EffectiveSubspace sub = restrict_to_subspace(e, static_cast<int>(e.coordinates.cols()));
    CHECK((sub.weights.array() - 1.0).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((sub.restricted_distances - d.values).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("single-axis restriction by hand") {
    const EffectiveSubspace sub = restrict_to_subspace(hand_embedding(), 1);
    CHECK(sub.weights(0) == doctest::Approx(3.0 / 5.0).epsilon(1e-14));
    CHECK(sub.weights(1) == 0.0);
    CHECK(sub.weights(2) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(sub.restricted_distances(0, 1) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(sub.restricted_distances(0, 2) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(sub.restricted_distances(1, 2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("two-axis restriction by hand") {
    const EffectiveSubspace sub = restrict_to_subspace(hand_embedding(), 2);
    CHECK(sub.weights(0) == doctest::Approx(3.0 / 5.0).epsilon(1e-14));
    CHECK(sub.weights(1) == 1.0);
    CHECK(sub.weights(2) == doctest::Approx(std::sqrt(5.0) / 3.0).epsilon(1e-14));
    CHECK(sub.restricted_distances(0, 1) == doctest::Approx(std::sqrt(13.0)).epsilon(1e-14));
    CHECK(sub.restricted_distances(1, 2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("a stock at the centroid gets weight zero, not a division blowup") {
    MarketEmbedding e;
    e.coordinates.resize(3, 1);
    e.coordinates << -1.0, 0.0, 1.0;
    e.eigenvalues.resize(1);
    e.eigenvalues << 2.0;
    e.total_norms = e.coordinates.rowwise().norm();
    const EffectiveSubspace sub = restrict_to_subspace(e, 1);
    CHECK(sub.weights(1) == 0.0);
    CHECK(sub.weights(0) == 1.0);
}

TEST_CASE("subspace dimension bounds") {
    const MarketEmbedding e = hand_embedding();
    CHECK_THROWS_AS(restrict_to_subspace(e, 0), ConfigError);
    CHECK_THROWS_AS(restrict_to_subspace(e, 4), ValidationError);
}

TEST_CASE("full-dimensional systematic covariance is the sample covariance") {
    // With every weight 1 and the full distances, 1 - d^2/2 is the sample
    // correlation again, so the filtered covariance degenerates to the plain
    // population covariance of the window.
    const ReturnsPanel rets = testutil::iid_returns(6, 40, 87);
    const NormalizedWindow w = normalize_window(rets, 0, 40);
    const MarketEmbedding e = embed(distance_matrix(correlation_matrix(w)));
    const EffectiveSubspace sub = restrict_to_subspace(e, static_cast<int>(e.coordinates.cols()));
    const SystematicCovariance sc = systematic_covariance(sub, rets.values);
    const Eigen::MatrixXd expected = population_scatter(rets.values);
    CHECK((sc.values - expected).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("systematic covariance scales amplitudes by weight") {
    EffectiveSubspace sub;
    sub.f = 1;
    sub.coordinates.resize(2, 1);
    sub.coordinates << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
    sub.weights.resize(2);
    sub.weights << 0.5, 1.0;
    sub.restricted_distances.resize(2, 2);
    const double d = std::sqrt(2.0);
    sub.restricted_distances << 0.0, d, d, 0.0;

    const Eigen::MatrixXd raw = iid_points(50, 2, 91) * 0.01;
    const SystematicCovariance sc = systematic_covariance(sub, raw);

    // Diagonal: weight^2 times the raw variance.
    CHECK(sc.values(0, 0) == doctest::Approx(0.25 * sc.variances(0)).epsilon(1e-12));
    CHECK(sc.values(1, 1) == doctest::Approx(sc.variances(1)).epsilon(1e-12));
    // The pair sits at squared distance 2, i.e. orthogonal: no shared term.
    CHECK(std::abs(sc.values(0, 1)) <= 1e-15);
    // Raw moments are the 1/n ones.
    const double mean0 = raw.col(0).mean();
    CHECK(sc.means(0) == doctest::Approx(mean0).epsilon(1e-12));
    CHECK(sc.variances(0) ==
          doctest::Approx((raw.col(0).array() - mean0).square().mean()).epsilon(1e-12));
}

TEST_CASE("systematic covariance validates shapes") {
    const EffectiveSubspace sub = restrict_to_subspace(hand_embedding(), 1);
    CHECK_THROWS_AS(systematic_covariance(sub, Eigen::MatrixXd::Zero(50, 2)), ValidationError);
    CHECK_THROWS_AS(systematic_covariance(sub, Eigen::MatrixXd::Zero(1, 3)), ValidationError);
}

TEST_CASE("kurtosis of two opposite points is exactly one") {
    Eigen::MatrixXd points(2, 1);
    points << -1.0, 1.0;
    const Eigen::MatrixXd scatter = population_scatter(points);
    CHECK(scatter(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mardia_b2p(points, scatter) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kurtosis of a large gaussian cloud approaches p(p+2)") {
    const Eigen::MatrixXd points = iid_points(20000, 6, 93);
    const double b2p = mardia_b2p(points, population_scatter(points));
    CHECK(b2p == doctest::Approx(48.0).epsilon(0.0125)); // within 0.6 of 48
}

TEST_CASE("kurtosis is invariant under affine maps") {
    const Eigen::MatrixXd points = iid_points(300, 4, 95);
    const double base = mardia_b2p(points, population_scatter(points));

    Eigen::MatrixXd a(4, 4);
    a << 2.0, 0.3, 0.0, -0.5,
        0.0, 1.5, 0.2, 0.0,
        0.1, 0.0, 0.8, 0.0,
        0.0, 0.0, 0.4, 1.2;
    Eigen::RowVectorXd shift(4);
    shift << 5.0, -3.0, 0.0, 100.0;
    Eigen::MatrixXd moved = (points * a.transpose()).rowwise() + shift;
    const double transformed = mardia_b2p(moved, population_scatter(moved));
    CHECK(transformed == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("kurtosis needs more points than dimensions and a usable scatter") {
    const Eigen::MatrixXd square = iid_points(4, 4, 97);
    CHECK_THROWS_AS(mardia_b2p(square, population_scatter(square)), ValidationError);

    Eigen::MatrixXd flat = iid_points(30, 3, 99);
    flat.col(2) = flat.col(0); // rank-deficient cloud
    CHECK_THROWS_AS(mardia_b2p(flat, population_scatter(flat)), SingularCovarianceError);

    const Eigen::MatrixXd pts = iid_points(30, 3, 101);
    CHECK_THROWS_AS(mardia_b2p(pts, Eigen::MatrixXd::Identity(2, 2)), ValidationError);
}

TEST_CASE("t2 standardization anchors") {
    CHECK(mardia_t2(48.0, 6, 500) == 0.0);
    // At n = 384 the denominator sqrt(8 * 6 * 8 / 384) is exactly 1.
    CHECK(mardia_t2(49.0, 6, 384) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mardia_t2(47.0, 6, 384) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK_THROWS_AS(mardia_t2(48.0, 0, 100), ConfigError);
}

TEST_CASE("g rescales against the baseline and skips invalid windows") {
    std::vector<KurtosisPoint> pts(3);
    pts[0].b2p = 40.0;
    pts[0].valid = true;
    pts[1].b2p = 44.0;
    pts[1].valid = true;
    pts[2].valid = false;

    Baseline base;
    base.mean_b2p = 40.0;
    base.std_b2p = 2.0;
    g_statistic(pts, base);
    CHECK(pts[0].g == 0.0);
    CHECK(pts[1].g == 2.0);
    CHECK(std::isnan(pts[2].g));

    base.std_b2p = 0.0;
    CHECK_THROWS_AS(g_statistic(pts, base), DegenerateBaselineError);
}

} // TEST_SUITE
