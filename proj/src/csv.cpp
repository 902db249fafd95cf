#include "intfsim/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>

#include "intfsim/common.hpp"

namespace intfsim::csv {

std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw Error("csv: cannot format value");
  return std::string(buf, ptr);
}

double parse_double(std::string_view field, std::string_view what, std::size_t row) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw Error("row " + std::to_string(row) + ": field '" + std::string(what) +
                "' is not a finite number: '" + std::string(field) + "'");
  }
  return v;
}

long long parse_int(std::string_view field, std::string_view what, std::size_t row) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw Error("row " + std::to_string(row) + ": field '" + std::string(what) +
                "' is not an integer: '" + std::string(field) + "'");
  }
  return v;
}

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace intfsim::csv
