#pragma once

// Minimal helpers for the plain comma-separated formats used throughout
// (no quoting; fields never contain commas).

#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lorasim::csv {

/// Splits on ',' and strips a trailing '\r' (CRLF tolerance).
std::vector<std::string_view> split(std::string_view line);

std::optional<double> parse_double(std::string_view field);
std::optional<long long> parse_int(std::string_view field);

/// Shortest round-trippable decimal representation.
std::string format_double(double value);

}  // namespace lorasim::csv
