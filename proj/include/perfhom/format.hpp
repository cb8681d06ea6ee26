#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace perfhom {

/// Locale-independent decimal with 17 significant digits (round-trips).
std::string format_g17(double value);

/// Shortest locale-independent decimal that round-trips.
std::string format_shortest(double value);

/// Locale-independent parse of a full token; throws Error(Config) otherwise.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

}  // namespace perfhom
