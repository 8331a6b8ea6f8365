#include "marketgeo/report.hpp"

#include <fstream>

#include "marketgeo/csv.hpp"
#include "marketgeo/errors.hpp"

namespace marketgeo {

void write_gseries_csv(const KurtosisSeries& series, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write file: " + path);
    }
    out << "window_end_date,b2p,t2,g,flagged\n";
    for (size_t t = 0; t < series.points.size(); ++t) {
        const KurtosisPoint& pt = series.points[t];
        out << series.window_end_dates[t] << ',' << csv::format_double(pt.b2p) << ','
            << csv::format_double(pt.t2) << ',' << csv::format_double(pt.g) << ','
            << (series.flags[t] ? 1 : 0) << '\n';
    }
    if (!out) {
        throw Error("write failed: " + path);
    }
}

void write_spectrum_csv(const EffectiveDimensionResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write file: " + path);
    }
    out << "rank,actual_eigenvalue,threshold_eigenvalue\n";
    for (Eigen::Index r = 0; r < result.actual.size(); ++r) {
        out << (r + 1) << ',' << csv::format_double(result.actual(r)) << ','
            << csv::format_double(result.thresholds(r)) << '\n';
    }
    if (!out) {
        throw Error("write failed: " + path);
    }
}

} // namespace marketgeo
