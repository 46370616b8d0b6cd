#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace nomajam::cli {

/// Shortest decimal that round-trips; empty for NaN so missing values stay blank.
std::string format_number(double value);
std::string format_number(std::optional<double> value);

/// Quotes a cell only when it holds characters that need escaping.
std::string escape_cell(std::string_view cell);

void write_row(std::ostream& out, const std::vector<std::string>& cells);

}  // namespace nomajam::cli
