#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lsm::detail {

/// Splits one CSV line on commas; strips surrounding whitespace and quotes.
std::vector<std::string> split_csv_line(std::string_view line);

/// Non-empty lines of a file, '\r' removed. Throws DataError if unreadable.
std::vector<std::string> read_lines(const std::string& path);

bool parse_double(const std::string& s, double& out);

}  // namespace lsm::detail
