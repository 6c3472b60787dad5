#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace skintone::csv {

/// Splits one CSV record (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split(std::string_view line);

/// Quotes a field only when it contains a comma, quote or newline.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

/// A parsed CSV file: header plus rows, with 1-based source line numbers.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;

    /// Index of a header column, or npos.
    std::size_t column(std::string_view name) const;
};

/// Blank lines are skipped. Trailing '\r' is stripped.
Table parse(std::string_view text);

Table read_file(const std::string& path);

}  // namespace skintone::csv
