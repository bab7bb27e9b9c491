#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fibercuit::detail {

[[noreturn]] void parse_fail(int line, const std::string& what);

std::vector<std::string> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);
std::vector<std::string_view> lines(std::string_view text);

// Both throw Errc::ParseError naming `line`.
double to_double(const std::string& s, int line);
int to_int(const std::string& s, int line);

}  // namespace fibercuit::detail

namespace fibercuit::detail {

// Fixed `decimals` digits with trailing zeros (and a bare point) removed;
// negative zero prints as 0.
std::string format_trimmed(double v, int decimals);

}  // namespace fibercuit::detail
