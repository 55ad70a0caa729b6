#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace recapit::text {

std::string_view trim(std::string_view s);
std::string_view trim_right(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char delimiter);

// Splits on '\n', dropping a trailing '\r' from each line. A final newline
// does not produce an extra empty line; "" yields no lines.
std::vector<std::string_view> lines(std::string_view s);

// ASCII case folding; bytes >= 0x80 pass through unchanged.
std::string lower(std::string_view s);

std::optional<double> parse_double(std::string_view s);

// Maximal runs of ASCII alphanumerics and non-ASCII bytes, case-folded.
std::vector<std::string> tokenize(std::string_view s);

// Shortest round-trip decimal representation.
std::string format_double(double v);

std::string html_escape(std::string_view s);

}  // namespace recapit::text
