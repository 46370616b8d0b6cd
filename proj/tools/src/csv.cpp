#include "nomajam_cli/csv.hpp"

#include <cmath>

#include <fmt/format.h>

namespace nomajam::cli {

std::string format_number(double value) {
  if (std::isnan(value)) return {};
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{}", value);
}

std::string format_number(std::optional<double> value) {
  return value ? format_number(*value) : std::string{};
}

std::string escape_cell(std::string_view cell) {
  if (cell.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (const char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << escape_cell(cells[i]);
  }
  out << '\n';
}

}  // namespace nomajam::cli
