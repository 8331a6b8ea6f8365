#include "marketgeo/surrogates.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "marketgeo/errors.hpp"
#include "marketgeo/geometry.hpp"
#include "marketgeo/parallel.hpp"

namespace marketgeo {

NormalizedWindow permute_surrogate(const NormalizedWindow& window, std::uint64_t seed) {
    NormalizedWindow out = window;
    std::mt19937_64 rng(seed);
    std::vector<double> row(static_cast<size_t>(window.length));
    for (Eigen::Index k = 0; k < out.vectors.rows(); ++k) {
        for (Eigen::Index i = 0; i < out.vectors.cols(); ++i) {
            row[static_cast<size_t>(i)] = out.vectors(k, i);
        }
        std::shuffle(row.begin(), row.end(), rng);
        for (Eigen::Index i = 0; i < out.vectors.cols(); ++i) {
            out.vectors(k, i) = row[static_cast<size_t>(i)];
        }
    }
    return out;
}

NormalizedWindow gaussian_surrogate(int n_assets, int length, const Eigen::VectorXd& means,
                                    const Eigen::VectorXd& stds, std::uint64_t seed) {
    if (n_assets < 1 || length < 2) {
        throw ConfigError("gaussian surrogate needs at least 1 asset and 2 observations");
    }
    if (means.size() != n_assets || stds.size() != n_assets) {
        throw ConfigError("per-stock moment vectors must have one entry per asset");
    }
    for (Eigen::Index k = 0; k < stds.size(); ++k) {
        if (!(stds(k) > 0.0) || !std::isfinite(stds(k)) || !std::isfinite(means(k))) {
            throw ConfigError("gaussian surrogate needs positive finite std for asset " +
                              std::to_string(k));
        }
    }
    NormalizedWindow out;
    out.start = 0;
    out.length = length;
    out.vectors.resize(n_assets, length);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Eigen::Index k = 0; k < n_assets; ++k) {
        for (Eigen::Index i = 0; i < length; ++i) {
            out.vectors(k, i) = means(k) + stds(k) * gauss(rng);
        }
    }
    const Eigen::Index bad = detail::normalize_rows(out.vectors);
    if (bad >= 0) {
        // n >= 2 fresh normal draws are never exactly constant.
        throw NumericalError("gaussian surrogate produced a constant row " + std::to_string(bad));
    }
    return out;
}

Eigen::VectorXd rank_quantiles(const Eigen::MatrixXd& spectra, double confidence) {
    if (spectra.rows() < 1) {
        throw ValidationError("surrogate ensemble is empty");
    }
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw ConfigError("confidence must lie strictly inside (0, 1)");
    }
    const Eigen::Index m = spectra.rows();
    // (M+1)-scaled order statistic; exceedance probability per rank is close
    // to 1 - confidence without interpolation.
    Eigen::Index k = static_cast<Eigen::Index>(
        std::ceil(confidence * (static_cast<double>(m) + 1.0) - 1e-12));
    k = std::min(std::max<Eigen::Index>(k, 1), m);

    Eigen::VectorXd q(spectra.cols());
    std::vector<double> column(static_cast<size_t>(m));
    for (Eigen::Index r = 0; r < spectra.cols(); ++r) {
        for (Eigen::Index s = 0; s < m; ++s) column[static_cast<size_t>(s)] = spectra(s, r);
        std::nth_element(column.begin(), column.begin() + (k - 1), column.end());
        q(r) = column[static_cast<size_t>(k - 1)];
    }
    return q;
}

SurrogateEnsemble build_ensemble(const NormalizedWindow& window, SurrogateKind kind,
                                 int n_surrogates, double confidence, std::uint64_t seed,
                                 int threads) {
    if (n_surrogates < 1) {
        throw ConfigError("need at least one surrogate");
    }
    const int n_assets = static_cast<int>(window.vectors.rows());
    if (n_assets < 2) {
        throw ValidationError("surrogate ensemble needs at least 2 assets");
    }
    SurrogateEnsemble ensemble;
    ensemble.kind = kind;
    ensemble.confidence = confidence;
    ensemble.spectra.resize(n_surrogates, n_assets - 1);

    // The window is already normalized, so gaussian surrogates target zero
    // mean and unit std; the rescale inside gaussian_surrogate makes any
    // other choice equivalent anyway.
    const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(n_assets);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n_assets);

    parallel_for(0, n_surrogates, threads, [&](int s) {
        const std::uint64_t s_seed = seed + static_cast<std::uint64_t>(s);
        NormalizedWindow sur = kind == SurrogateKind::time_permuted
                                   ? permute_surrogate(window, s_seed)
                                   : gaussian_surrogate(n_assets, window.length, zeros, ones, s_seed);
        const MarketEmbedding emb = embed(distance_matrix(correlation_matrix(sur)));
        ensemble.spectra.row(s) = eigenvalue_spectrum(emb, n_assets).transpose();
    });

    ensemble.rank_quantiles = rank_quantiles(ensemble.spectra, confidence);
    return ensemble;
}

EffectiveDimensionResult effective_dimension(const Eigen::VectorXd& actual_spectrum,
                                             const SurrogateEnsemble& ensemble,
                                             double confidence) {
    if (ensemble.spectra.rows() < 1) {
        throw ValidationError("surrogate ensemble is empty");
    }
    if (actual_spectrum.size() != ensemble.spectra.cols()) {
        throw ValidationError("actual spectrum and ensemble disagree on the number of ranks");
    }
    EffectiveDimensionResult res;
    res.confidence = confidence;
    res.actual = actual_spectrum;
    res.thresholds = confidence == ensemble.confidence
                         ? ensemble.rank_quantiles
                         : rank_quantiles(ensemble.spectra, confidence);
    int f = 0;
    for (Eigen::Index r = 0; r < res.actual.size(); ++r) {
        if (res.actual(r) > res.thresholds(r)) ++f;
        else break;
    }
    res.f = f;
    return res;
}

} // namespace marketgeo
