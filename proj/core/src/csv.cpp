#include "epictrl/csv.hpp"

#include "epictrl/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace epictrl::csv {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_line(std::string_view line)
{
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur.push_back('"');
                ++i;
            }
            else if (c == '"') {
                quoted = false;
            }
            else {
                cur.push_back(c);
            }
        }
        else if (c == '"') {
            quoted = true;
        }
        else if (c == ',') {
            cells.push_back(trim(cur));
            cur.clear();
        }
        else {
            cur.push_back(c);
        }
    }
    cells.push_back(trim(cur));
    return cells;
}

} // namespace

std::size_t Table::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw SchemaError("missing column '" + std::string(name) + "'");
}

Table parse(std::string_view text)
{
    Table table;
    std::size_t pos = 0;
    bool have_header = false;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const auto line = text.substr(pos, end - pos);
        pos = end + 1;
        if (trim(line).empty()) {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        auto cells = split_line(line);
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
        }
        else {
            if (cells.size() != table.header.size()) {
                throw SchemaError("row has " + std::to_string(cells.size()) + " cells, header has " +
                                  std::to_string(table.header.size()));
            }
            table.rows.push_back(std::move(cells));
        }
        if (end == text.size()) {
            break;
        }
    }
    if (!have_header) {
        throw SchemaError("empty CSV document");
    }
    return table;
}

Table read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw SchemaError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

double to_double(const std::string& cell, std::string_view context)
{
    double value = 0.0;
    const auto* first = cell.data();
    const auto* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw SchemaError("cannot parse '" + cell + "' as a number (" + std::string(context) + ")");
    }
    return value;
}

std::string format_double(double value)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) {
        return "nan";
    }
    return std::string(buf, ptr);
}

} // namespace epictrl::csv
