#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace robprod::csv {

// Splits one delimited line; double quotes group a field and "" escapes a quote.
std::vector<std::string> split_line(std::string_view line, char delimiter);

// Reads the next non-blank line (CR stripped); nullopt at end of stream.
std::optional<std::string> next_line(std::istream& in, std::size_t& line_no);

std::string trim(std::string_view s);

// Strict floating-point parse of the whole field.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

// Shortest text that parses back to the same double.
std::string format_double(double x);

}  // namespace robprod::csv
