#include "marketgeo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "marketgeo/errors.hpp"

namespace marketgeo {

namespace detail {

int leader_count(int n_assets) {
    if (n_assets < 10) return 0;
    int l = static_cast<int>(std::lround(0.05 * n_assets));
    l = std::max(l, 3);
    l = std::min(l, n_assets / 5);
    return l;
}

SegmentLoadings solve_loadings(int n_assets, int n_leaders, double correlation) {
    const double c = correlation;
    if (c <= 0.0 || n_leaders <= 0) {
        double g = std::sqrt(std::max(c, 0.0));
        return {g, g, 0.0};
    }
    const double N = n_assets;
    const double L = n_leaders;
    const double a = L * (L - 1.0);
    const double b = 2.0 * L * (N - L);
    const double d = (N - L) * (N - L - 1.0);
    const double P = N * (N - 1.0);
    const double margin = 1e-3;

    double gamma = 0.4;
    double h2 = std::min(c, 0.83);
    double g2 = 0.0;
    for (int it = 0; it < 16; ++it) {
        g2 = (c * P - a * h2) / (a * gamma * gamma + b * gamma + d);
        double cap = gamma >= 1.0 ? 1.0 - 1e-6 : 0.97;
        if (g2 > cap) {
            // Ordinary assets would saturate; give leaders more market weight.
            const double A = a * cap, B = b * cap;
            const double C = -(c * P - a * h2 - d * cap);
            const double disc = B * B - 4.0 * A * C;
            double gnew = disc > 0.0 ? (-B + std::sqrt(disc)) / (2.0 * A) : 1.0;
            gamma = std::min(std::max(gnew, gamma), 1.0);
            cap = gamma >= 1.0 ? 1.0 - 1e-6 : 0.97;
            g2 = (c * P - a * h2) / (a * gamma * gamma + b * gamma + d);
            // Below the clamp the quadratic pinned g2 at the cap; trim the
            // rounding noise so the uniform-weights fallback (which assumes
            // gamma = 1) cannot fire spuriously.
            if (gamma < 1.0) g2 = std::min(g2, cap);
            if (g2 > cap) {
                // Even uniform market weights fall short; the leaders' own
                // factor has to absorb the remainder.
                h2 = std::max(h2, P * (c - cap) / a);
                g2 = (c * P - a * h2) / P;
            }
        }
        const double budget = 1.0 - gamma * gamma * g2 - margin;
        if (h2 > budget) {
            h2 = std::max(budget, 0.0);
            continue;
        }
        break;
    }
    g2 = (c * P - a * h2) / (a * gamma * gamma + b * gamma + d);

    if (!(g2 >= 0.0) || g2 > 1.0 - 1e-9 || gamma * gamma * g2 + h2 > 1.0 - 1e-9) {
        throw ConfigError("segment correlation " + std::to_string(c) +
                          " is too close to 1 to synthesize");
    }
    double g = std::sqrt(g2);
    return {g, gamma * g, std::sqrt(h2)};
}

} // namespace detail

RegimeSpec RegimeSpec::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open regime spec: " + path);
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    RegimeSpec spec;
    try {
        spec.n_assets = j.at("n_assets").get<int>();
        spec.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("start_date")) spec.start_date = j.at("start_date").get<std::string>();
        if (j.contains("start_price")) spec.start_price = j.at("start_price").get<double>();
        for (const auto& js : j.at("segments")) {
            RegimeSegment seg;
            seg.length = js.at("length").get<int>();
            seg.correlation = js.at("correlation").get<double>();
            if (js.contains("drift")) seg.drift = js.at("drift").get<double>();
            const auto& vol = js.at("volatility");
            if (vol.is_number()) {
                seg.volatility.push_back(vol.get<double>());
            } else {
                seg.volatility = vol.get<std::vector<double>>();
            }
            spec.segments.push_back(std::move(seg));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    spec.validate();
    return spec;
}

void RegimeSpec::validate() const {
    if (n_assets < 2) {
        throw ConfigError("regime spec needs at least 2 assets");
    }
    if (segments.empty()) {
        throw ConfigError("regime spec needs at least one segment");
    }
    if (!(start_price > 0.0) || !std::isfinite(start_price)) {
        throw ConfigError("start_price must be positive");
    }
    detail::parse_iso_date(start_date, "start_date"); // ParseError doubles as rejection
    for (size_t i = 0; i < segments.size(); ++i) {
        const auto& seg = segments[i];
        const std::string name = "segment " + std::to_string(i);
        if (seg.length < 2) {
            throw ConfigError(name + ": length must be at least 2");
        }
        if (!(seg.correlation >= 0.0 && seg.correlation < 1.0)) {
            throw ConfigError(name + ": correlation must lie in [0, 1)");
        }
        if (seg.volatility.size() != 1 && seg.volatility.size() != static_cast<size_t>(n_assets)) {
            throw ConfigError(name + ": volatility must be one value or one per asset");
        }
        for (double v : seg.volatility) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw ConfigError(name + ": volatilities must be positive");
            }
        }
        if (!std::isfinite(seg.drift)) {
            throw ConfigError(name + ": drift must be finite");
        }
    }
}

PricePanel generate_synthetic_panel(const RegimeSpec& spec) {
    spec.validate();
    const int n = spec.n_assets;
    int total_returns = 0;
    for (const auto& seg : spec.segments) total_returns += seg.length;

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // The leader group is fixed for the whole panel so regime changes alter
    // loadings, not membership.
    const int n_leaders = detail::leader_count(n);
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> is_leader(static_cast<size_t>(n), false);
    for (int i = 0; i < n_leaders; ++i) is_leader[static_cast<size_t>(order[static_cast<size_t>(i)])] = true;

    Eigen::MatrixXd returns(total_returns, n);
    int row = 0;
    for (const auto& seg : spec.segments) {
        const bool concentrated = seg.correlation > 0.0 && n_leaders > 0;
        const auto w = detail::solve_loadings(n, concentrated ? n_leaders : 0, seg.correlation);
        for (int t = 0; t < seg.length; ++t, ++row) {
            const double market = gauss(rng);
            const double conc = gauss(rng); // drawn even when unused, to keep the stream layout fixed
            for (int k = 0; k < n; ++k) {
                const bool lead = concentrated && is_leader[static_cast<size_t>(k)];
                const double gk = lead ? w.leader_market : w.market;
                const double hk = lead ? w.concentration : 0.0;
                const double idio = std::sqrt(std::max(0.0, 1.0 - gk * gk - hk * hk));
                const double x = gk * market + hk * conc + idio * gauss(rng);
                const double vol =
                    seg.volatility.size() == 1 ? seg.volatility[0] : seg.volatility[static_cast<size_t>(k)];
                returns(row, k) = seg.drift + vol * x;
            }
        }
    }

    PricePanel panel;
    panel.tickers.reserve(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        panel.tickers.push_back("A" + std::to_string(k));
    }
    panel.prices.resize(total_returns + 1, n);
    panel.prices.row(0).setConstant(spec.start_price);
    for (int t = 0; t < total_returns; ++t) {
        for (int k = 0; k < n; ++k) {
            panel.prices(t + 1, k) = panel.prices(t, k) * std::exp(returns(t, k));
        }
    }
    auto day = detail::parse_iso_date(spec.start_date, "start_date");
    panel.dates.reserve(static_cast<size_t>(total_returns + 1));
    for (int t = 0; t <= total_returns; ++t) {
        panel.dates.push_back(detail::format_iso_date(day));
        day += std::chrono::days{1};
    }
    validate_panel(panel, /*allow_missing=*/false);
    return panel;
}

} // namespace marketgeo
