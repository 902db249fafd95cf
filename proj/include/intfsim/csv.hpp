#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace intfsim::csv {

// Minimal CSV helpers for the fixed-schema files this project reads and
// writes. Fields never contain commas or quotes, so no quoting is done.

std::vector<std::string> split_row(std::string_view line);

/// Shortest decimal representation that parses back to the same double.
std::string fmt(double v);

double parse_double(std::string_view field, std::string_view what, std::size_t row);
long long parse_int(std::string_view field, std::string_view what, std::size_t row);

/// Reads all non-empty lines; strips a trailing '\r'.
std::vector<std::string> read_lines(std::istream& in);

}  // namespace intfsim::csv
