#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace epictrl::csv {

/// Parsed table: header names plus string cells, one row per record.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index of `name`; throws SchemaError when absent.
    std::size_t column(std::string_view name) const;
};

/// Minimal RFC-4180-ish reader: comma separated, optional double quotes,
/// blank lines skipped, surrounding whitespace trimmed.
Table parse(std::string_view text);
Table read_file(const std::string& path);

double to_double(const std::string& cell, std::string_view context);

/// Shortest representation that round-trips through strtod.
std::string format_double(double value);

} // namespace epictrl::csv
