#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "marketgeo/errors.hpp"
#include "marketgeo/pipeline.hpp"
#include "marketgeo/synth.hpp"

using namespace marketgeo;

namespace {

KurtosisPoint valid_point(double b2p) {
    KurtosisPoint pt;
    pt.b2p = b2p;
    pt.valid = true;
    return pt;
}

PricePanel stationary_panel(int n_assets, int n_dates, std::uint64_t seed, double c = 0.3) {
    RegimeSpec spec;
    spec.n_assets = n_assets;
    spec.seed = seed;
    spec.segments.push_back({n_dates - 1, c, {0.01}, 0.0});
    return generate_synthetic_panel(spec);
}

AnalysisConfig small_config() {
    AnalysisConfig cfg;
    cfg.window_length = 50;
    cfg.f = 6;
    cfg.baseline_start = "1990-01-01"; // wide open: every window is baseline
    cfg.baseline_end = "2099-12-31";
    cfg.seed = 7;
    cfg.threads = 1;
    return cfg;
}

} // namespace

TEST_SUITE("pipeline") {

TEST_CASE("baseline calibration by hand") {
    std::vector<KurtosisPoint> pts = {valid_point(10.0), valid_point(14.0)};
    const Baseline base = calibrate_baseline(pts, 0, 1);
    CHECK(base.mean_b2p == 12.0);
    CHECK(base.std_b2p == doctest::Approx(2.8284271247461903).epsilon(1e-15));
    CHECK(base.first_window == 0);
    CHECK(base.last_window == 1);

    // An invalid window inside the range is skipped, not counted as zero.
    pts.insert(pts.begin() + 1, KurtosisPoint{});
    const Baseline with_gap = calibrate_baseline(pts, 0, 2);
    CHECK(with_gap.mean_b2p == 12.0);
    CHECK(with_gap.std_b2p == doctest::Approx(2.8284271247461903).epsilon(1e-15));
}

TEST_CASE("baseline calibration failure modes") {
    std::vector<KurtosisPoint> pts = {valid_point(10.0), KurtosisPoint{}, valid_point(14.0)};
    CHECK_THROWS_AS(calibrate_baseline(pts, 0, 1), CalibrationError);  // one valid point
    CHECK_THROWS_AS(calibrate_baseline(pts, -1, 2), CalibrationError); // bad range
    CHECK_THROWS_AS(calibrate_baseline(pts, 2, 1), CalibrationError);
    CHECK_THROWS_AS(calibrate_baseline(pts, 0, 3), CalibrationError);

    std::vector<KurtosisPoint> flat = {valid_point(5.0), valid_point(5.0), valid_point(5.0)};
    CHECK_THROWS_AS(calibrate_baseline(flat, 0, 2), DegenerateBaselineError);
}

TEST_CASE("baseline windows standardize to mean zero and unit spread") {
    const PricePanel panel = stationary_panel(20, 201, 3);
    const KurtosisSeries series = rolling_analysis(panel, small_config());
    REQUIRE(series.n_windows() == 151);
    REQUIRE(series.baseline.first_window == 0);
    REQUIRE(series.baseline.last_window == 150);

    double sum = 0.0, ss = 0.0;
    int count = 0;
    for (const auto& pt : series.points) {
        REQUIRE(pt.valid);
        sum += pt.g;
        ++count;
    }
    const double mean = sum / count;
    for (const auto& pt : series.points) ss += (pt.g - mean) * (pt.g - mean);
    CHECK(std::abs(mean) <= 1e-10);
    CHECK(std::abs(std::sqrt(ss / (count - 1)) - 1.0) <= 1e-10);

    // t2 is a deterministic rescale of b2p.
    const KurtosisPoint& pt = series.points[0];
    CHECK(pt.t2 == mardia_t2(pt.b2p, series.f_used, 20));
}

TEST_CASE("flagging follows the normal rejection region") {
    KurtosisSeries series;
    series.points = {valid_point(0.0), valid_point(0.0), valid_point(0.0), KurtosisPoint{}};
    series.points[0].g = 2.5;
    series.points[1].g = -2.5;
    series.points[2].g = 1.0;
    series.window_end_dates.assign(4, "2020-01-01");

    flag_crises(series, 0.05, /*two_sided=*/true);
    CHECK(series.flag_threshold == doctest::Approx(1.959964).epsilon(1e-6));
    CHECK(series.flags == std::vector<bool>{true, true, false, false});

    flag_crises(series, 0.05, /*two_sided=*/false);
    CHECK(series.flag_threshold == doctest::Approx(1.6448536).epsilon(1e-6));
    CHECK(series.flags == std::vector<bool>{true, false, false, false});

    CHECK_THROWS_AS(flag_crises(series, 0.0), ConfigError);
    CHECK_THROWS_AS(flag_crises(series, 1.0), ConfigError);
}

TEST_CASE("the analysis is deterministic and thread-count invariant") {
    const PricePanel panel = stationary_panel(15, 140, 5);
    AnalysisConfig cfg = small_config();
    cfg.f = 4;
    const KurtosisSeries a = rolling_analysis(panel, cfg);
    const KurtosisSeries b = rolling_analysis(panel, cfg);
    cfg.threads = 4;
    const KurtosisSeries c = rolling_analysis(panel, cfg);

    REQUIRE(a.n_windows() == b.n_windows());
    REQUIRE(a.n_windows() == c.n_windows());
    for (size_t t = 0; t < a.n_windows(); ++t) {
        CHECK(a.points[t].b2p == b.points[t].b2p);
        CHECK(a.points[t].g == b.points[t].g);
        CHECK(a.points[t].b2p == c.points[t].b2p);
        CHECK(a.points[t].g == c.points[t].g);
        CHECK(a.flags[t] == c.flags[t]);
    }
    CHECK(a.baseline.mean_b2p == c.baseline.mean_b2p);
}

TEST_CASE("a stock that flatlines turns its windows into gaps, not aborts") {
    PricePanel panel = testutil::iid_prices(5, 121, 13);
    // Freeze T2 between price rows 30 and 80: return rows 30..79 are zero,
    // so exactly the windows starting at rows 30..40 see a constant stock.
    for (int r = 31; r <= 80; ++r) panel.prices(r, 2) = panel.prices(30, 2);

    AnalysisConfig cfg = small_config();
    cfg.window_length = 40;
    cfg.f = 3;
    const KurtosisSeries series = rolling_analysis(panel, cfg);
    REQUIRE(series.n_windows() == 81);

    for (int t = 0; t < 81; ++t) {
        CAPTURE(t);
        const KurtosisPoint& pt = series.points[static_cast<size_t>(t)];
        CHECK(pt.window_index == t);
        if (t >= 30 && t <= 40) {
            CHECK_FALSE(pt.valid);
            CHECK(std::isnan(pt.g));
            CHECK_FALSE(series.flags[static_cast<size_t>(t)]);
            CHECK(pt.note.find("T2") != std::string::npos);
            CHECK(pt.note.find("window ending " + series.window_end_dates[static_cast<size_t>(t)]) !=
                  std::string::npos);
        } else {
            CHECK(pt.valid);
            CHECK(pt.note.empty());
        }
    }
}

TEST_CASE("window end dates respect the step") {
    const PricePanel panel = testutil::iid_prices(4, 30, 15); // 29 return days
    AnalysisConfig cfg = small_config();
    cfg.window_length = 10;
    cfg.step = 5;
    cfg.f = 2;
    const KurtosisSeries series = rolling_analysis(panel, cfg);
    REQUIRE(series.n_windows() == 4);
    // Window t covers return rows [5t, 5t + 10); its end date is the panel
    // date of the window's last return, i.e. panel row 5t + 10.
    for (int t = 0; t < 4; ++t) {
        CHECK(series.window_end_dates[static_cast<size_t>(t)] ==
              panel.dates[static_cast<size_t>(5 * t + 10)]);
    }
}

TEST_CASE("the baseline range selects windows by end date, inclusive") {
    const PricePanel panel = testutil::iid_prices(6, 60, 17); // dates from 2000-01-03
    AnalysisConfig cfg = small_config();
    cfg.window_length = 10;
    cfg.f = 3;
    // Window t ends on 2000-01-13 + t days; these bounds hit t = 2 and t = 7
    // exactly, so both endpoints must be inside.
    cfg.baseline_start = "2000-01-15";
    cfg.baseline_end = "2000-01-20";
    const KurtosisSeries series = rolling_analysis(panel, cfg);
    CHECK(series.baseline.first_window == 2);
    CHECK(series.baseline.last_window == 7);

    cfg.baseline_start = "1980-01-01";
    cfg.baseline_end = "1980-12-31"; // long before the panel
    CHECK_THROWS_AS(rolling_analysis(panel, cfg), CalibrationError);
}

TEST_CASE("estimating f finds the single market factor") {
    const PricePanel panel = stationary_panel(30, 401, 19, 0.5);
    AnalysisConfig cfg = small_config();
    cfg.estimate_f = true;
    cfg.f = 0; // must be ignored
    const KurtosisSeries series = rolling_analysis(panel, cfg);
    CHECK(series.f_used == 1);
}

TEST_CASE("estimating f on structureless data fails loudly") {
    const PricePanel panel = testutil::iid_prices(20, 301, 23);
    AnalysisConfig cfg = small_config();
    cfg.estimate_f = true;
    CHECK_THROWS_AS(rolling_analysis(panel, cfg), CalibrationError);
}

TEST_CASE("quiet markets stay mostly unflagged") {
    // Pooled across seeds the false-flag fraction should stay near alpha.
    int flagged = 0, total = 0;
    for (std::uint64_t seed : {29u, 31u, 37u}) {
        const KurtosisSeries series =
            rolling_analysis(stationary_panel(20, 201, seed), small_config());
        for (size_t t = 0; t < series.n_windows(); ++t) {
            ++total;
            if (series.flags[t]) ++flagged;
        }
    }
    CHECK(total == 3 * 151);
    CHECK(static_cast<double>(total - flagged) / total >= 0.85);
}

TEST_CASE("config validation rejects contradictions") {
    const PricePanel panel = testutil::iid_prices(5, 80, 41);
    AnalysisConfig cfg = small_config();

    cfg.window_length = 1;
    CHECK_THROWS_AS(rolling_analysis(panel, cfg), ConfigError);
    cfg = small_config();
    cfg.window_length = 6; // too short for f = 6
    CHECK_THROWS_AS(rolling_analysis(panel, cfg), ConfigError);
    cfg = small_config();
    cfg.step = 0;
    CHECK_THROWS_AS(rolling_analysis(panel, cfg), ConfigError);
    cfg = small_config();
    cfg.alpha = 1.5;
    CHECK_THROWS_AS(rolling_analysis(panel, cfg), ConfigError);
    cfg = small_config();
    cfg.baseline_start.clear();
    CHECK_THROWS_AS(rolling_analysis(panel, cfg), ConfigError);
    cfg = small_config();
    cfg.baseline_end = "1989-01-01"; // before the start
    CHECK_THROWS_AS(rolling_analysis(panel, cfg), ConfigError);
    cfg = small_config();
    cfg.baseline_start = "not-a-date";
    CHECK_THROWS_AS(rolling_analysis(panel, cfg), ParseError);
    cfg = small_config();
    cfg.threads = -2;
    CHECK_THROWS_AS(rolling_analysis(panel, cfg), ConfigError);
    cfg = small_config();
    cfg.n_surrogates = 0;
    CHECK_THROWS_AS(rolling_analysis(panel, cfg), ConfigError);
}

TEST_CASE("data shortfalls are validation errors") {
    AnalysisConfig cfg = small_config();
    cfg.f = 2;
    cfg.window_length = 30;

    const PricePanel tiny = testutil::iid_prices(4, 20, 43); // 19 returns < one window
    CHECK_THROWS_AS(rolling_analysis(tiny, cfg), ValidationError);

    PricePanel gappy = testutil::iid_prices(4, 60, 47);
    gappy.prices(10, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(rolling_analysis(gappy, cfg), ValidationError);
}

} // TEST_SUITE
