#include "marketgeo/panel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "marketgeo/csv.hpp"
#include "marketgeo/errors.hpp"

namespace marketgeo {

namespace detail {

std::chrono::sys_days parse_iso_date(const std::string& text, const std::string& where) {
    auto fail = [&]() -> std::chrono::sys_days {
        throw ParseError(where + ": '" + text + "' is not a YYYY-MM-DD date");
    };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return fail();
    for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (text[i] < '0' || text[i] > '9') return fail();
    }
    int y = std::stoi(text.substr(0, 4));
    unsigned m = static_cast<unsigned>(std::stoi(text.substr(5, 2)));
    unsigned d = static_cast<unsigned>(std::stoi(text.substr(8, 2)));
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                    std::chrono::day{d}};
    if (!ymd.ok()) return fail();
    return std::chrono::sys_days{ymd};
}

std::string format_iso_date(std::chrono::sys_days day) {
    std::chrono::year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

} // namespace detail

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

// Reorders rows chronologically; the loaders accept unsorted files.
void sort_rows_by_date(PricePanel& panel) {
    const Eigen::Index t = panel.n_dates();
    std::vector<Eigen::Index> order(static_cast<size_t>(t));
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::chrono::sys_days> days(static_cast<size_t>(t));
    for (Eigen::Index i = 0; i < t; ++i) {
        days[static_cast<size_t>(i)] =
            detail::parse_iso_date(panel.dates[static_cast<size_t>(i)],
                                   "date column, row " + std::to_string(i + 2));
    }
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return days[static_cast<size_t>(a)] < days[static_cast<size_t>(b)];
    });
    if (std::is_sorted(order.begin(), order.end())) return;

    PricePanel sorted;
    sorted.tickers = panel.tickers;
    sorted.dates.resize(panel.dates.size());
    sorted.prices.resize(t, panel.n_assets());
    for (Eigen::Index i = 0; i < t; ++i) {
        sorted.dates[static_cast<size_t>(i)] = panel.dates[static_cast<size_t>(order[static_cast<size_t>(i)])];
        sorted.prices.row(i) = panel.prices.row(order[static_cast<size_t>(i)]);
    }
    panel = std::move(sorted);
}

PricePanel load_csv(const std::string& path) {
    auto records = csv::read_records(path);
    if (records.empty()) {
        throw ParseError(path + ": empty file");
    }
    const auto& header = records[0];
    if (header.size() < 2) {
        throw ParseError(path + ": header needs a date column and at least one ticker");
    }
    PricePanel panel;
    panel.tickers.assign(header.begin() + 1, header.end());
    const size_t n_cols = header.size();
    const size_t n_rows = records.size() - 1;
    if (n_rows == 0) {
        throw ValidationError(path + ": no data rows");
    }
    panel.dates.resize(n_rows);
    panel.prices.resize(static_cast<Eigen::Index>(n_rows),
                        static_cast<Eigen::Index>(panel.tickers.size()));
    for (size_t r = 0; r < n_rows; ++r) {
        const auto& rec = records[r + 1];
        const std::string rowname = path + ": row " + std::to_string(r + 2);
        if (rec.size() != n_cols) {
            throw ParseError(rowname + " has " + std::to_string(rec.size()) +
                             " fields, expected " + std::to_string(n_cols));
        }
        panel.dates[r] = rec[0];
        for (size_t c = 1; c < n_cols; ++c) {
            const std::string& cell = rec[c];
            double v;
            if (cell.empty()) {
                v = kNaN;
            } else {
                v = csv::parse_double(cell, rowname + ", ticker " + panel.tickers[c - 1]);
            }
            panel.prices(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - 1)) = v;
        }
    }
    return panel;
}

PricePanel load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open file: " + path);
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("dates") || !j.contains("tickers") || !j.contains("prices")) {
        throw ParseError(path + ": expected an object with dates, tickers, prices");
    }
    PricePanel panel;
    try {
        panel.dates = j.at("dates").get<std::vector<std::string>>();
        panel.tickers = j.at("tickers").get<std::vector<std::string>>();
        const auto& rows = j.at("prices");
        if (!rows.is_array() || rows.size() != panel.dates.size()) {
            throw ParseError(path + ": prices must hold one row per date");
        }
        panel.prices.resize(static_cast<Eigen::Index>(panel.dates.size()),
                            static_cast<Eigen::Index>(panel.tickers.size()));
        for (size_t r = 0; r < rows.size(); ++r) {
            const auto& row = rows[r];
            if (!row.is_array() || row.size() != panel.tickers.size()) {
                throw ParseError(path + ": prices row " + std::to_string(r) +
                                 " does not match the ticker count");
            }
            for (size_t c = 0; c < row.size(); ++c) {
                const auto& cell = row[c];
                panel.prices(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    cell.is_null() ? kNaN : cell.get<double>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (panel.dates.empty()) {
        throw ValidationError(path + ": no data rows");
    }
    return panel;
}

} // namespace

PanelFormat panel_format_for(const std::string& path) {
    if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
        return PanelFormat::json;
    }
    return PanelFormat::csv;
}

PricePanel load_price_panel(const std::string& path) {
    return load_price_panel(path, panel_format_for(path));
}

PricePanel load_price_panel(const std::string& path, PanelFormat format) {
    PricePanel panel = format == PanelFormat::csv ? load_csv(path) : load_json(path);
    sort_rows_by_date(panel);
    validate_panel(panel, /*allow_missing=*/true);
    return panel;
}

void validate_panel(const PricePanel& panel, bool allow_missing) {
    if (panel.tickers.empty()) {
        throw ValidationError("panel has no assets");
    }
    if (panel.dates.size() != static_cast<size_t>(panel.n_dates()) ||
        panel.tickers.size() != static_cast<size_t>(panel.n_assets())) {
        throw ValidationError("panel shape does not match its date/ticker labels");
    }
    std::set<std::string> seen;
    for (const auto& t : panel.tickers) {
        if (t.empty()) throw ValidationError("panel has an empty ticker name");
        if (!seen.insert(t).second) throw ValidationError("duplicate ticker: " + t);
    }
    std::chrono::sys_days prev{};
    for (size_t i = 0; i < panel.dates.size(); ++i) {
        auto day = detail::parse_iso_date(panel.dates[i], "date column, row " + std::to_string(i + 2));
        if (i > 0 && day <= prev) {
            throw ValidationError("duplicate or out-of-order date: " + panel.dates[i]);
        }
        prev = day;
    }
    for (Eigen::Index r = 0; r < panel.n_dates(); ++r) {
        for (Eigen::Index c = 0; c < panel.n_assets(); ++c) {
            double v = panel.prices(r, c);
            if (std::isnan(v)) {
                if (allow_missing) continue;
                throw ValidationError("missing price for " + panel.tickers[static_cast<size_t>(c)] +
                                      " on " + panel.dates[static_cast<size_t>(r)]);
            }
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw ValidationError("non-positive price " + csv::format_double(v) + " for " +
                                      panel.tickers[static_cast<size_t>(c)] + " on " +
                                      panel.dates[static_cast<size_t>(r)]);
            }
        }
    }
}

void write_panel(const PricePanel& panel, const std::string& path) {
    write_panel(panel, path, panel_format_for(path));
}

void write_panel(const PricePanel& panel, const std::string& path, PanelFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write file: " + path);
    }
    if (format == PanelFormat::csv) {
        out << "date";
        for (const auto& t : panel.tickers) out << ',' << csv::escape(t);
        out << '\n';
        for (Eigen::Index r = 0; r < panel.n_dates(); ++r) {
            out << panel.dates[static_cast<size_t>(r)];
            for (Eigen::Index c = 0; c < panel.n_assets(); ++c) {
                double v = panel.prices(r, c);
                out << ',';
                if (!std::isnan(v)) out << csv::format_double(v);
            }
            out << '\n';
        }
    } else {
        nlohmann::json j;
        j["dates"] = panel.dates;
        j["tickers"] = panel.tickers;
        auto rows = nlohmann::json::array();
        for (Eigen::Index r = 0; r < panel.n_dates(); ++r) {
            auto row = nlohmann::json::array();
            for (Eigen::Index c = 0; c < panel.n_assets(); ++c) {
                double v = panel.prices(r, c);
                if (std::isnan(v)) row.push_back(nullptr);
                else row.push_back(v);
            }
            rows.push_back(std::move(row));
        }
        j["prices"] = std::move(rows);
        out << j.dump(2) << '\n';
    }
    if (!out) {
        throw Error("write failed: " + path);
    }
}

AlignResult align_panel(const PricePanel& panel, FillPolicy policy, double max_missing_fraction) {
    if (max_missing_fraction < 0.0 || max_missing_fraction >= 1.0) {
        throw ConfigError("max_missing_fraction must lie in [0, 1)");
    }
    const Eigen::Index t = panel.n_dates();
    const Eigen::Index n = panel.n_assets();
    AlignResult result;
    auto& report = result.report;

    char line[160];
    std::vector<Eigen::Index> kept;
    for (Eigen::Index c = 0; c < n; ++c) {
        long missing = 0;
        for (Eigen::Index r = 0; r < t; ++r) {
            if (std::isnan(panel.prices(r, c))) ++missing;
        }
        const std::string& ticker = panel.tickers[static_cast<size_t>(c)];
        double frac = t > 0 ? static_cast<double>(missing) / static_cast<double>(t) : 0.0;
        if (missing == t) {
            report.dropped_tickers.push_back(ticker);
            report.notes.push_back(ticker + ": dropped (no observations at all)");
        } else if (frac > max_missing_fraction) {
            report.dropped_tickers.push_back(ticker);
            std::snprintf(line, sizeof line, "%s: dropped (%.1f%% missing exceeds %.1f%% threshold)",
                          ticker.c_str(), 100.0 * frac, 100.0 * max_missing_fraction);
            report.notes.push_back(line);
        } else {
            kept.push_back(c);
        }
    }

    PricePanel out;
    out.dates = panel.dates;
    out.tickers.reserve(kept.size());
    out.prices.resize(t, static_cast<Eigen::Index>(kept.size()));
    for (size_t i = 0; i < kept.size(); ++i) {
        out.tickers.push_back(panel.tickers[static_cast<size_t>(kept[i])]);
        out.prices.col(static_cast<Eigen::Index>(i)) = panel.prices.col(kept[i]);
    }

    if (policy == FillPolicy::forward_fill) {
        std::vector<Eigen::Index> still_kept;
        for (Eigen::Index c = 0; c < out.n_assets(); ++c) {
            const std::string& ticker = out.tickers[static_cast<size_t>(c)];
            double last = kNaN;
            long filled = 0;
            bool leading_gap = false;
            for (Eigen::Index r = 0; r < t; ++r) {
                double v = out.prices(r, c);
                if (std::isnan(v)) {
                    if (std::isnan(last)) {
                        leading_gap = true;
                        break;
                    }
                    out.prices(r, c) = last;
                    ++filled;
                } else {
                    last = v;
                }
            }
            if (leading_gap) {
                report.dropped_tickers.push_back(ticker);
                report.notes.push_back(ticker +
                                       ": dropped (gap at panel start, nothing to carry forward)");
                continue;
            }
            if (filled > 0) {
                report.cells_filled += filled;
                report.notes.push_back(ticker + ": forward-filled " + std::to_string(filled) +
                                       " gap(s)");
            }
            still_kept.push_back(c);
        }
        if (still_kept.size() != static_cast<size_t>(out.n_assets())) {
            PricePanel pruned;
            pruned.dates = out.dates;
            pruned.prices.resize(t, static_cast<Eigen::Index>(still_kept.size()));
            for (size_t i = 0; i < still_kept.size(); ++i) {
                pruned.tickers.push_back(out.tickers[static_cast<size_t>(still_kept[i])]);
                pruned.prices.col(static_cast<Eigen::Index>(i)) = out.prices.col(still_kept[i]);
            }
            out = std::move(pruned);
        }
    } else {
        std::vector<Eigen::Index> full_rows;
        for (Eigen::Index r = 0; r < t; ++r) {
            bool complete = true;
            for (Eigen::Index c = 0; c < out.n_assets(); ++c) {
                if (std::isnan(out.prices(r, c))) {
                    complete = false;
                    break;
                }
            }
            if (complete) full_rows.push_back(r);
        }
        report.dates_dropped = t - static_cast<Eigen::Index>(full_rows.size());
        if (report.dates_dropped > 0) {
            report.notes.push_back("dropped " + std::to_string(report.dates_dropped) +
                                   " date(s) with missing cells");
            PricePanel pruned;
            pruned.tickers = out.tickers;
            pruned.prices.resize(static_cast<Eigen::Index>(full_rows.size()), out.n_assets());
            for (size_t i = 0; i < full_rows.size(); ++i) {
                pruned.dates.push_back(out.dates[static_cast<size_t>(full_rows[i])]);
                pruned.prices.row(static_cast<Eigen::Index>(i)) = out.prices.row(full_rows[i]);
            }
            out = std::move(pruned);
        }
    }

    if (out.tickers.empty()) {
        throw ValidationError("alignment dropped every asset in the panel");
    }
    result.panel = std::move(out);
    validate_panel(result.panel, /*allow_missing=*/false);
    return result;
}

} // namespace marketgeo
