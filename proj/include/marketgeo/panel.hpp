#pragma once

#include <Eigen/Core>
#include <chrono>
#include <string>
#include <vector>

namespace marketgeo {

// Daily close prices: one row per date (strictly increasing), one column per
// ticker. NaN cells mark missing observations until align_panel clears them.
struct PricePanel {
    std::vector<std::string> dates;
    std::vector<std::string> tickers;
    Eigen::MatrixXd prices;

    Eigen::Index n_dates() const { return prices.rows(); }
    Eigen::Index n_assets() const { return prices.cols(); }
};

enum class PanelFormat { csv, json };

// Picks CSV unless the filename ends in .json.
PanelFormat panel_format_for(const std::string& path);

// Loads and validates a panel. Rows are sorted by date on the way in;
// missing cells are tolerated here and rejected only by the analysis itself.
PricePanel load_price_panel(const std::string& path);
PricePanel load_price_panel(const std::string& path, PanelFormat format);

void write_panel(const PricePanel& panel, const std::string& path);
void write_panel(const PricePanel& panel, const std::string& path, PanelFormat format);

// Structural checks shared by the loaders and the generators: shape
// consistency, valid strictly-increasing dates, non-empty tickers, and
// strictly positive prices. With allow_missing, NaN cells pass.
void validate_panel(const PricePanel& panel, bool allow_missing);

// How align_panel repairs gaps that survive the drop threshold.
enum class FillPolicy {
    forward_fill, // carry the last seen price forward
    drop_dates,   // discard any date that still has missing cells
};

struct AlignReport {
    std::vector<std::string> dropped_tickers;
    std::vector<std::string> notes; // one human-readable line per action
    long cells_filled = 0;
    long dates_dropped = 0;
};

struct AlignResult {
    PricePanel panel; // complete: no missing cells remain
    AlignReport report;
};

// Drops assets whose missing fraction exceeds max_missing_fraction, then
// repairs the remaining gaps per policy. Assets that still have leading
// missing cells after a forward fill are dropped too (there is nothing to
// carry forward), with a note. Throws ValidationError if nothing survives.
AlignResult align_panel(const PricePanel& panel,
                        FillPolicy policy = FillPolicy::forward_fill,
                        double max_missing_fraction = 0.05);

namespace detail {

// Strict YYYY-MM-DD with a real calendar check; `where` names the offender.
std::chrono::sys_days parse_iso_date(const std::string& text, const std::string& where);
std::string format_iso_date(std::chrono::sys_days day);

} // namespace detail

} // namespace marketgeo
