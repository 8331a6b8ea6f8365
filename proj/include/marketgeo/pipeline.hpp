#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "marketgeo/kurtosis.hpp"
#include "marketgeo/panel.hpp"
#include "marketgeo/surrogates.hpp"

namespace marketgeo {

struct AnalysisConfig {
    int window_length = 50;
    int step = 1;
    int f = 6;              // subspace dimension, unless estimate_f overrides it
    bool estimate_f = false;
    std::string baseline_start; // inclusive ISO date range, both required
    std::string baseline_end;
    double alpha = 0.05;
    bool two_sided = true;
    SurrogateKind surrogate_kind = SurrogateKind::time_permuted;
    int n_surrogates = 100;
    double confidence = 0.99;
    std::uint64_t seed = 0;
    int threads = 0; // 0 = MG_THREADS env var, then hardware concurrency

    void validate() const; // throws ConfigError / ParseError (bad dates)
};

struct KurtosisSeries {
    std::vector<KurtosisPoint> points;           // one per window, gaps included
    std::vector<std::string> window_end_dates;
    std::vector<bool> flags;
    Baseline baseline;
    AnalysisConfig config;    // as supplied
    int f_used = 0;           // config.f, or the estimate when estimate_f was set
    double flag_threshold = 0.0;

    size_t n_windows() const { return points.size(); }
};

// Sample mean/std of b2p over the valid points in the inclusive window-index
// range. Fewer than two valid points raise CalibrationError; zero spread
// raises DegenerateBaselineError.
Baseline calibrate_baseline(const std::vector<KurtosisPoint>& points, int first_window,
                            int last_window);

// Optional per-window sink for the intermediate geometry; called from worker
// threads, each invocation with a distinct window index.
using GeometryDump = std::function<void(int window_index, const CorrelationMatrix&,
                                        const DistanceMatrix&, const MarketEmbedding&)>;

// The full measurement: trailing windows of length window_length advancing by
// step, each normalized, embedded, cut to f axes and scored by its Mardia
// kurtosis; then the baseline is calibrated and every window standardized
// against it. Windows that cannot be scored (a constant stock, a singular
// scatter, too few retained axes) become invalid points with a note instead
// of aborting the run. Identical inputs and seed give identical output.
KurtosisSeries rolling_analysis(const PricePanel& panel, const AnalysisConfig& config,
                                const GeometryDump& dump = nullptr);

// Recomputes the flag column: a valid window is flagged when its g falls in
// the rejection region of a two-sided (|g| > z_{1-alpha/2}) or one-sided
// (g > z_{1-alpha}) normal test.
void flag_crises(KurtosisSeries& series, double alpha, bool two_sided = true);

} // namespace marketgeo
