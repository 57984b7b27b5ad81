#include "fairshare/csv.hpp"

#include <charconv>
#include <cstdlib>
#include <istream>

#include "fairshare/error.hpp"

namespace fairshare {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

Error bad_cell(std::string_view text, std::string_view what)
{
    return Error(ErrorCode::ConfigError,
                 "cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
}

}  // namespace

std::vector<std::string> split_csv(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.emplace_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

int CsvHeader::find(std::string_view name) const
{
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

bool next_record(std::istream& in, std::string& line)
{
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        return true;
    }
    return false;
}

long long parse_integer(std::string_view text, std::string_view what)
{
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) throw bad_cell(text, what);
    return v;
}

double parse_real(std::string_view text, std::string_view what)
{
    // from_chars for doubles needs GCC 11; strtod keeps older toolchains working.
    const std::string copy(text);
    char* end = nullptr;
    const double v = std::strtod(copy.c_str(), &end);
    if (copy.empty() || end != copy.c_str() + copy.size()) throw bad_cell(text, what);
    return v;
}

bool parse_flag(std::string_view text, std::string_view what)
{
    if (text == "1" || text == "true") return true;
    if (text == "0" || text == "false") return false;
    throw bad_cell(text, what);
}

}  // namespace fairshare
