#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ddfc::csv {

// Shortest representation that parses back to the identical double.
std::string format_lossless(double value);

// Fixed-point with the given number of decimals (used for time columns).
std::string format_fixed(double value, int decimals);

std::vector<std::string> split(std::string_view line, char sep = ',');

double parse_double(std::string_view text);

}  // namespace ddfc::csv
