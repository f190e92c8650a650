#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kitbench::text {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

/// Whole-token parse; nullopt on trailing garbage, empty input or overflow.
std::optional<double> parse_double(std::string_view token);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

}  // namespace kitbench::text
