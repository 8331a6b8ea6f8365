#include "marketgeo/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "marketgeo/errors.hpp"

namespace marketgeo::csv {

std::vector<std::vector<std::string>> read_records(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();

    size_t pos = 0;
    if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) pos = 3;

    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool any_content = false; // current record saw at least one char or separator

    auto end_field = [&]() {
        record.push_back(field);
        field.clear();
    };
    auto end_record = [&]() {
        end_field();
        records.push_back(std::move(record));
        record.clear();
        any_content = false;
    };

    while (pos < text.size()) {
        char c = text[pos];
        if (quoted) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field += '"';
                    ++pos;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            ++pos;
            continue;
        }
        switch (c) {
            case '"':
                quoted = true;
                any_content = true;
                ++pos;
                break;
            case ',':
                end_field();
                any_content = true;
                ++pos;
                break;
            case '\r':
                if (pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
                [[fallthrough]];
            case '\n':
                if (any_content || !field.empty() || !record.empty()) end_record();
                ++pos;
                break;
            default:
                field += c;
                any_content = true;
                ++pos;
                break;
        }
    }
    if (quoted) {
        throw ParseError(path + ": unterminated quoted field at end of file");
    }
    if (any_content || !field.empty() || !record.empty()) end_record();
    return records;
}

std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    // Fewest digits (at full-looking precision) that parse back to the
    // identical bits; 15 avoids scientific notation for ordinary values.
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, value);
        double back = 0.0;
        auto [p, ec] = std::from_chars(buf, buf + std::strlen(buf), back);
        (void)p;
        if (ec == std::errc() && std::memcmp(&back, &value, sizeof back) == 0) break;
    }
    return buf;
}

double parse_double(const std::string& text, const std::string& where) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    double value = 0.0;
    auto [p, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || p != last || text.empty()) {
        throw ParseError(where + ": cannot parse number from '" + text + "'");
    }
    return value;
}

} // namespace marketgeo::csv
