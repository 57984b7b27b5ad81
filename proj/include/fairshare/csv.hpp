#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fairshare {

/// Splits one unquoted CSV record on commas and trims surrounding whitespace.
std::vector<std::string> split_csv(std::string_view line);

/// Column positions by header name; -1 when a column is absent.
struct CsvHeader {
    std::vector<std::string> names;
    int find(std::string_view name) const;
};

/// Non-empty, non-comment line reader shared by the CSV loaders: skips lines whose
/// first character is '#', strips a trailing '\r'.
bool next_record(std::istream& in, std::string& line);

long long parse_integer(std::string_view text, std::string_view what);
double parse_real(std::string_view text, std::string_view what);
bool parse_flag(std::string_view text, std::string_view what);

}  // namespace fairshare
