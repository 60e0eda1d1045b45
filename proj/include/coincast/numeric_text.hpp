#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace coincast {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

/// Strict parse: the whole field must be a number (no separators, symbols, or padding).
std::optional<double> parse_double(std::string_view text);

std::string_view trim(std::string_view s);

}  // namespace coincast
