#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "marketgeo/returns.hpp"

namespace marketgeo {

enum class SurrogateKind {
    time_permuted, // shuffle each stock's history independently in time
    gaussian,      // fresh white noise with prescribed per-stock moments
};

// Destroys all cross-stock and temporal structure while keeping each stock's
// marginal distribution exactly: every row is an independent reshuffle of the
// original row. Deterministic in the seed.
NormalizedWindow permute_surrogate(const NormalizedWindow& window, std::uint64_t seed);

// Draws iid normal histories row by row with the given per-stock mean and
// standard deviation, then applies the usual zero-mean unit-norm rescale.
// Non-positive or non-finite stds raise ConfigError.
NormalizedWindow gaussian_surrogate(int n_assets, int length, const Eigen::VectorXd& means,
                                    const Eigen::VectorXd& stds, std::uint64_t seed);

// Eigenvalue spectra of an ensemble of surrogate windows, plus the rank-wise
// quantile curve the actual spectrum is compared against.
struct SurrogateEnsemble {
    SurrogateKind kind = SurrogateKind::time_permuted;
    double confidence = 0.99;
    Eigen::MatrixXd spectra;        // n_surrogates x (N-1), each row descending
    Eigen::VectorXd rank_quantiles; // per-rank quantile at `confidence`
};

// Runs the window through `n_surrogates` surrogates (seed + index each) and
// collects their spectra. `threads` follows resolve_threads semantics.
SurrogateEnsemble build_ensemble(const NormalizedWindow& window, SurrogateKind kind,
                                 int n_surrogates, double confidence, std::uint64_t seed,
                                 int threads = 1);

// Rank-wise upper quantile across ensemble rows, using the (M+1)-scaled
// order statistic: 1-based index min(M, ceil(q * (M+1))) of the sorted
// column. With 100 surrogates at q = 0.99 this is the column maximum.
Eigen::VectorXd rank_quantiles(const Eigen::MatrixXd& spectra, double confidence);

struct EffectiveDimensionResult {
    int f = 0;
    Eigen::VectorXd actual;     // the window's spectrum, length N-1
    Eigen::VectorXd thresholds; // surrogate quantile per rank
    double confidence = 0.0;
};

// f = length of the leading run of ranks whose actual eigenvalue strictly
// exceeds the surrogate threshold; the count stops at the first rank that
// fails, whatever happens further down the spectrum.
EffectiveDimensionResult effective_dimension(const Eigen::VectorXd& actual_spectrum,
                                             const SurrogateEnsemble& ensemble,
                                             double confidence);

} // namespace marketgeo
