#pragma once

#include <Eigen/Core>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "marketgeo/panel.hpp"
#include "marketgeo/returns.hpp"

namespace testutil {

namespace fs = std::filesystem;

// Scratch directory wiped when the test case ends.
struct TempDir {
    fs::path path;
    TempDir() {
        static std::atomic<int> counter{0};
        path = fs::temp_directory_path() /
               ("marketgeo_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter.fetch_add(1)));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Plain iid normal returns with synthetic labels, for unit tests that do not
// need a price panel behind them.
inline marketgeo::ReturnsPanel iid_returns(int n_assets, int rows, std::uint64_t seed,
                                           double vol = 0.01) {
    marketgeo::ReturnsPanel panel;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, vol);
    panel.values.resize(rows, n_assets);
    for (int r = 0; r < rows; ++r) {
        for (int k = 0; k < n_assets; ++k) {
            panel.values(r, k) = gauss(rng);
        }
    }
    for (int k = 0; k < n_assets; ++k) {
        panel.tickers.push_back("T" + std::to_string(k));
    }
    auto day = marketgeo::detail::parse_iso_date("2000-01-04", "test date");
    for (int r = 0; r < rows; ++r) {
        panel.dates.push_back(marketgeo::detail::format_iso_date(day));
        day += std::chrono::days{1};
    }
    return panel;
}

// Price panel whose log returns are the iid draws above, plus a seed row.
inline marketgeo::PricePanel iid_prices(int n_assets, int n_dates, std::uint64_t seed,
                                        double vol = 0.01) {
    const marketgeo::ReturnsPanel rets = iid_returns(n_assets, n_dates - 1, seed, vol);
    marketgeo::PricePanel panel;
    panel.tickers = rets.tickers;
    panel.prices.resize(n_dates, n_assets);
    panel.prices.row(0).setConstant(100.0);
    for (int t = 0; t + 1 < n_dates; ++t) {
        for (int k = 0; k < n_assets; ++k) {
            panel.prices(t + 1, k) = panel.prices(t, k) * std::exp(rets.values(t, k));
        }
    }
    auto day = marketgeo::detail::parse_iso_date("2000-01-03", "test date");
    for (int t = 0; t < n_dates; ++t) {
        panel.dates.push_back(marketgeo::detail::format_iso_date(day));
        day += std::chrono::days{1};
    }
    return panel;
}

inline marketgeo::NormalizedWindow random_window(int n_assets, int length, std::uint64_t seed) {
    return marketgeo::normalize_window(iid_returns(n_assets, length, seed), 0, length);
}

inline double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const double mx = x.mean();
    const double my = y.mean();
    const Eigen::VectorXd dx = x.array() - mx;
    const Eigen::VectorXd dy = y.array() - my;
    return dx.dot(dy) / std::sqrt(dx.squaredNorm() * dy.squaredNorm());
}

// Mean off-diagonal sample correlation of a returns matrix (rows = days).
inline double mean_pairwise_correlation(const Eigen::MatrixXd& returns) {
    const Eigen::Index n = returns.cols();
    double sum = 0.0;
    long count = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index l = k + 1; l < n; ++l) {
            sum += pearson(returns.col(k), returns.col(l));
            ++count;
        }
    }
    return sum / static_cast<double>(count);
}

} // namespace testutil
