#include "marketgeo/returns.hpp"

#include <cmath>

#include "marketgeo/errors.hpp"

namespace marketgeo {

ReturnsPanel log_returns(const PricePanel& panel) {
    validate_panel(panel, /*allow_missing=*/false);
    const Eigen::Index t = panel.n_dates();
    if (t < 2) {
        throw ValidationError("need at least two dates to form returns");
    }
    ReturnsPanel out;
    out.tickers = panel.tickers;
    out.dates.assign(panel.dates.begin() + 1, panel.dates.end());
    out.values.resize(t - 1, panel.n_assets());
    for (Eigen::Index r = 0; r + 1 < t; ++r) {
        for (Eigen::Index c = 0; c < panel.n_assets(); ++c) {
            out.values(r, c) = std::log(panel.prices(r + 1, c)) - std::log(panel.prices(r, c));
        }
    }
    return out;
}

namespace detail {

Eigen::Index normalize_rows(Eigen::MatrixXd& rows) {
    const double n = static_cast<double>(rows.cols());
    for (Eigen::Index k = 0; k < rows.rows(); ++k) {
        const double mean = rows.row(k).sum() / n;
        // Two-pass population variance: same quantity as <r^2> - <r>^2 but
        // without the cancellation, so the unit-norm invariant holds tightly.
        double var = 0.0;
        for (Eigen::Index i = 0; i < rows.cols(); ++i) {
            const double dx = rows(k, i) - mean;
            var += dx * dx;
        }
        var /= n;
        if (!(var > 1e-300)) {
            return k;
        }
        const double scale = 1.0 / std::sqrt(n * var);
        for (Eigen::Index i = 0; i < rows.cols(); ++i) {
            rows(k, i) = (rows(k, i) - mean) * scale;
        }
    }
    return -1;
}

} // namespace detail

NormalizedWindow normalize_window(const ReturnsPanel& returns, int start, int length) {
    if (length < 2) {
        throw ConfigError("window length must be at least 2");
    }
    if (start < 0 || static_cast<Eigen::Index>(start) + length > returns.n_rows()) {
        throw ValidationError("window [" + std::to_string(start) + ", " +
                              std::to_string(start + length) + ") falls outside the " +
                              std::to_string(returns.n_rows()) + " available return rows");
    }
    NormalizedWindow w;
    w.start = start;
    w.length = length;
    w.vectors = returns.values.block(start, 0, length, returns.n_assets()).transpose();
    const Eigen::Index bad = detail::normalize_rows(w.vectors);
    if (bad >= 0) {
        throw DegenerateAssetError("stock " + returns.tickers[static_cast<size_t>(bad)] +
                                   " has constant returns in window starting at row " +
                                   std::to_string(start));
    }
    return w;
}

} // namespace marketgeo
