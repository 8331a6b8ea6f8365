#pragma once

#include <string>
#include <vector>

namespace marketgeo::csv {

// Reads a whole CSV file into records of string fields, honoring quoted
// fields, embedded quotes ("" escapes), CRLF line endings, and a UTF-8 BOM.
// Blank trailing lines are ignored. Throws ParseError on an unterminated
// quoted field or unreadable file.
std::vector<std::vector<std::string>> read_records(const std::string& path);

// Quotes a field only when it contains a comma, quote, or line break.
std::string escape(const std::string& field);

// Shortest representation that round-trips a double exactly; NaN prints as
// "nan" so gap cells stay machine-readable.
std::string format_double(double value);

// Strict full-string double parse; `where` names the cell in the error.
double parse_double(const std::string& text, const std::string& where);

} // namespace marketgeo::csv
