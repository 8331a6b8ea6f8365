#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "marketgeo/panel.hpp"

namespace marketgeo {

// Daily log returns; row t is dated by the later of the two prices forming
// it, so dates[t] = panel.dates[t+1].
struct ReturnsPanel {
    std::vector<std::string> dates;
    std::vector<std::string> tickers;
    Eigen::MatrixXd values; // (T-1) x N

    Eigen::Index n_rows() const { return values.rows(); }
    Eigen::Index n_assets() const { return values.cols(); }
};

// Requires a complete panel (no missing cells) with at least two dates.
ReturnsPanel log_returns(const PricePanel& panel);

// One window of return histories rescaled to zero mean and unit norm, so the
// rows live on the unit sphere and inner products are correlations.
struct NormalizedWindow {
    int start = 0;  // first return row of the window
    int length = 0; // n
    Eigen::MatrixXd vectors; // N x n, one row per stock
};

// Maps each stock's n returns r to (r - mean) / sqrt(n * var), using the
// 1/n moment convention so the result has exact unit Euclidean norm.
// A stock with zero variance in the window raises DegenerateAssetError
// naming the ticker.
NormalizedWindow normalize_window(const ReturnsPanel& returns, int start, int length);

namespace detail {

// In-place zero-mean unit-norm rescale of every row (1/n moments). Returns
// -1 on success or the index of the first constant row, which the caller
// names in its own error.
Eigen::Index normalize_rows(Eigen::MatrixXd& rows);

} // namespace detail

} // namespace marketgeo
