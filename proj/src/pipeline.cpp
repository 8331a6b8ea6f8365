#include "marketgeo/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "marketgeo/errors.hpp"
#include "marketgeo/parallel.hpp"
#include "marketgeo/returns.hpp"
#include "marketgeo/stats.hpp"

namespace marketgeo {

void AnalysisConfig::validate() const {
    if (window_length < 2) {
        throw ConfigError("window length must be at least 2");
    }
    if (step < 1) {
        throw ConfigError("step must be at least 1");
    }
    if (!estimate_f) {
        if (f < 1) {
            throw ConfigError("subspace dimension f must be at least 1");
        }
        if (window_length < f + 2) {
            throw ConfigError("window length " + std::to_string(window_length) +
                              " is too short for f = " + std::to_string(f) +
                              " (need at least f + 2 days)");
        }
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError("alpha must lie strictly inside (0, 1)");
    }
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw ConfigError("confidence must lie strictly inside (0, 1)");
    }
    if (n_surrogates < 1) {
        throw ConfigError("need at least one surrogate");
    }
    if (threads < 0) {
        throw ConfigError("thread count must be positive (or 0 for automatic)");
    }
    if (baseline_start.empty() || baseline_end.empty()) {
        throw ConfigError("baseline start and end dates are both required");
    }
    const auto lo = detail::parse_iso_date(baseline_start, "baseline start");
    const auto hi = detail::parse_iso_date(baseline_end, "baseline end");
    if (hi < lo) {
        throw ConfigError("baseline end date precedes its start date");
    }
}

Baseline calibrate_baseline(const std::vector<KurtosisPoint>& points, int first_window,
                            int last_window) {
    if (first_window < 0 || last_window < first_window ||
        static_cast<size_t>(last_window) >= points.size()) {
        throw CalibrationError("baseline window range [" + std::to_string(first_window) + ", " +
                               std::to_string(last_window) + "] is out of bounds");
    }
    double sum = 0.0;
    long count = 0;
    for (int t = first_window; t <= last_window; ++t) {
        if (points[static_cast<size_t>(t)].valid) {
            sum += points[static_cast<size_t>(t)].b2p;
            ++count;
        }
    }
    if (count < 2) {
        throw CalibrationError("baseline needs at least two valid windows, found " +
                               std::to_string(count));
    }
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (int t = first_window; t <= last_window; ++t) {
        if (points[static_cast<size_t>(t)].valid) {
            const double dx = points[static_cast<size_t>(t)].b2p - mean;
            ss += dx * dx;
        }
    }
    const double sd = std::sqrt(ss / static_cast<double>(count - 1));
    if (!(sd > 0.0)) {
        throw DegenerateBaselineError("every baseline window produced the same kurtosis " +
                                      std::to_string(mean));
    }
    Baseline base;
    base.mean_b2p = mean;
    base.std_b2p = sd;
    base.first_window = first_window;
    base.last_window = last_window;
    return base;
}

KurtosisSeries rolling_analysis(const PricePanel& panel, const AnalysisConfig& config,
                                const GeometryDump& dump) {
    config.validate();
    validate_panel(panel, /*allow_missing=*/false);
    const ReturnsPanel returns = log_returns(panel);
    const int n = config.window_length;
    const int step = config.step;
    if (returns.n_rows() < n) {
        throw ValidationError("panel provides " + std::to_string(returns.n_rows()) +
                              " return days, fewer than one window of " + std::to_string(n));
    }
    const int n_windows = static_cast<int>((returns.n_rows() - n) / step) + 1;
    const int n_assets = static_cast<int>(returns.n_assets());

    KurtosisSeries series;
    series.config = config;
    series.window_end_dates.resize(static_cast<size_t>(n_windows));
    for (int t = 0; t < n_windows; ++t) {
        series.window_end_dates[static_cast<size_t>(t)] =
            returns.dates[static_cast<size_t>(t * step + n - 1)];
    }

    // Dates are validated ISO, so lexicographic order is chronological.
    int first = -1, last = -1;
    for (int t = 0; t < n_windows; ++t) {
        const std::string& date = series.window_end_dates[static_cast<size_t>(t)];
        if (date >= config.baseline_start && date <= config.baseline_end) {
            if (first < 0) first = t;
            last = t;
        }
    }
    if (first < 0) {
        throw CalibrationError("no window ends inside the baseline range " +
                               config.baseline_start + " .. " + config.baseline_end);
    }

    const int threads = resolve_threads(config.threads);

    int f = config.f;
    if (config.estimate_f) {
        // One long window spanning the whole baseline stretch, tested
        // against its own surrogate ensemble.
        const int stretch_start = first * step;
        const int stretch_len = last * step + n - stretch_start;
        const NormalizedWindow whole = normalize_window(returns, stretch_start, stretch_len);
        const MarketEmbedding emb = embed(distance_matrix(correlation_matrix(whole)));
        const SurrogateEnsemble ens =
            build_ensemble(whole, config.surrogate_kind, config.n_surrogates, config.confidence,
                           config.seed, threads);
        const EffectiveDimensionResult dim =
            effective_dimension(eigenvalue_spectrum(emb, n_assets), ens, config.confidence);
        if (dim.f < 1) {
            throw CalibrationError(
                "surrogate comparison found no significant market dimensions in the baseline");
        }
        f = dim.f;
        if (n < f + 2) {
            throw CalibrationError("estimated subspace dimension " + std::to_string(f) +
                                   " is too large for windows of " + std::to_string(n) + " days");
        }
    }
    series.f_used = f;

    series.points.assign(static_cast<size_t>(n_windows), KurtosisPoint{});
    parallel_for(0, n_windows, threads, [&](int t) {
        KurtosisPoint& pt = series.points[static_cast<size_t>(t)];
        pt.window_index = t;
        const std::string& end_date = series.window_end_dates[static_cast<size_t>(t)];
        try {
            const NormalizedWindow w = normalize_window(returns, t * step, n);
            const CorrelationMatrix c = correlation_matrix(w);
            const DistanceMatrix d = distance_matrix(c);
            const MarketEmbedding emb = embed(d);
            const EffectiveSubspace sub = restrict_to_subspace(emb, f);
            const Eigen::MatrixXd scatter = population_scatter(sub.coordinates);
            pt.b2p = mardia_b2p(sub.coordinates, scatter);
            pt.t2 = mardia_t2(pt.b2p, f, n_assets);
            pt.valid = true;
            if (dump) dump(t, c, d, emb);
        } catch (const SingularCovarianceError& e) {
            pt.note = "window ending " + end_date + ": " + e.what();
        } catch (const ValidationError& e) {
            // Covers constant stocks and windows whose embedding kept fewer
            // than f axes; anything harder propagates and aborts the run.
            pt.note = "window ending " + end_date + ": " + e.what();
        }
    });

    series.baseline = calibrate_baseline(series.points, first, last);
    g_statistic(series.points, series.baseline);
    flag_crises(series, config.alpha, config.two_sided);
    return series;
}

void flag_crises(KurtosisSeries& series, double alpha, bool two_sided) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError("alpha must lie strictly inside (0, 1)");
    }
    const double threshold =
        two_sided ? normal_quantile(1.0 - alpha / 2.0) : normal_quantile(1.0 - alpha);
    series.flag_threshold = threshold;
    series.flags.assign(series.points.size(), false);
    for (size_t t = 0; t < series.points.size(); ++t) {
        const KurtosisPoint& pt = series.points[t];
        if (!pt.valid) continue;
        const double stat = two_sided ? std::abs(pt.g) : pt.g;
        series.flags[t] = stat > threshold;
    }
}

} // namespace marketgeo
