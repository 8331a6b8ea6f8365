#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "marketgeo/panel.hpp"

namespace marketgeo {

// One stretch of the synthetic market. `length` counts return observations,
// so a spec's total price rows are the summed lengths plus one.
struct RegimeSegment {
    int length = 0;
    double correlation = 0.0;        // target mean pairwise correlation, [0, 1)
    std::vector<double> volatility;  // one shared value or one per asset
    double drift = 0.0;
};

struct RegimeSpec {
    int n_assets = 0;
    std::uint64_t seed = 0;
    std::vector<RegimeSegment> segments;
    std::string start_date = "2000-01-03";
    double start_price = 100.0;

    static RegimeSpec from_json_file(const std::string& path);
    void validate() const; // throws ConfigError
};

// Builds a price panel whose daily log returns follow the spec segment by
// segment. Returns within a segment come from a market factor shared by all
// assets plus a concentration factor loaded on a small fixed group of
// leaders; loadings are solved so the population mean pairwise correlation
// equals the segment's target exactly. The same seed always reproduces the
// same panel bit for bit.
PricePanel generate_synthetic_panel(const RegimeSpec& spec);

namespace detail {

struct SegmentLoadings {
    double market = 0.0;        // loading of ordinary assets on the market factor
    double leader_market = 0.0; // leaders' (reduced) market loading
    double concentration = 0.0; // leaders' loading on their own shared factor
};

// Number of leader assets; zero disables the concentration factor.
int leader_count(int n_assets);

// Solves the leader/ordinary loadings for one segment. The identity
//   mean corr = [a(lm^2 + h^2) + b*lm*g + d*g^2] / (N(N-1)),
// with a/b/d counting leader-leader, leader-ordinary and ordinary-ordinary
// pairs, is kept exact; feasibility (every asset keeps some idiosyncratic
// variance) is enforced by shrinking the concentration loading and, for high
// targets, raising the leaders' market share back toward uniform.
SegmentLoadings solve_loadings(int n_assets, int n_leaders, double correlation);

} // namespace detail

} // namespace marketgeo
