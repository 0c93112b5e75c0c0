#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tcltb::csv {

/// RFC 4180 quoting: fields containing comma, quote, CR or LF are quoted
/// and embedded quotes doubled.
std::string quote(std::string_view field);

void write_row(std::ostream& os, const std::vector<std::string>& fields);

/// Fixed shortest-round-trip formatting for doubles, locale independent.
std::string format_double(double v);

/// Parses one CSV file into rows of fields (RFC 4180, UTF-8, LF or CRLF).
/// Throws std::runtime_error with a line number on malformed input.
std::vector<std::vector<std::string>> read_file(const std::string& path);

std::vector<std::vector<std::string>> parse(std::string_view text);

}  // namespace tcltb::csv
