#include "ergo/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string_view>

#include "ergo/error.hpp"

namespace ergo::csv {
namespace {

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true)
    {
        const auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return fields;
}

double parse_number(std::string_view field, std::size_t line_no)
{
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc() || ptr != end || field.empty())
        throw SchemaError("line " + std::to_string(line_no) + ": '" + std::string(field)
                          + "' is not a number");
    return value;
}

} // namespace

std::string format_number(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(len));
}

void write_columns(std::ostream& out, const std::vector<Column>& columns)
{
    if (columns.empty())
        throw SizeError("CSV needs at least one column");
    const std::size_t rows = columns.front().values.size();
    for (std::size_t c = 0; c < columns.size(); ++c)
    {
        if (columns[c].values.size() != rows)
            throw SizeError("CSV column '" + columns[c].name + "' has the wrong length");
        out << (c ? "," : "") << columns[c].name;
    }
    out << '\n';
    for (std::size_t r = 0; r < rows; ++r)
    {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << format_number(columns[c].values[r]);
        out << '\n';
    }
}

void write_ensemble(std::ostream& out, const Ensemble& ensemble)
{
    const auto& values = ensemble.values();
    const auto& grid = ensemble.grid();
    out << "time";
    for (std::size_t i = 0; i < values.rows(); ++i)
        out << ",inst_" << i;
    out << '\n';
    std::string line;
    for (std::size_t k = 0; k < values.cols(); ++k)
    {
        line = format_number(grid.time(k));
        for (std::size_t i = 0; i < values.rows(); ++i)
        {
            line += ',';
            line += format_number(values(i, k));
        }
        line += '\n';
        out << line;
    }
}

Ensemble read_ensemble(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw SchemaError("empty CSV input");
    const auto header = split(line);
    if (header.size() < 2 || header[0] != "time")
        throw SchemaError("header must start with 'time' followed by instance columns");
    for (std::size_t i = 1; i < header.size(); ++i)
        if (header[i] != "inst_" + std::to_string(i - 1))
            throw SchemaError("header column " + std::to_string(i) + " should be 'inst_"
                              + std::to_string(i - 1) + "'");
    const std::size_t n = header.size() - 1;

    std::vector<double> times;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line))
    {
        ++line_no;
        if (line.empty())
            continue;
        const auto fields = split(line);
        if (fields.size() != n + 1)
            throw SchemaError("line " + std::to_string(line_no) + " has "
                              + std::to_string(fields.size()) + " fields, expected "
                              + std::to_string(n + 1));
        times.push_back(parse_number(fields[0], line_no));
        std::vector<double> row(n);
        for (std::size_t i = 0; i < n; ++i)
            row[i] = parse_number(fields[i + 1], line_no);
        rows.push_back(std::move(row));
    }
    if (times.size() < 2)
        throw SchemaError("need at least two time rows");
    if (times[0] != 0.0)
        throw SchemaError("time column must start at 0");

    const double dt = times[1] - times[0];
    if (!(dt > 0.0))
        throw SchemaError("time column must be increasing");
    for (std::size_t k = 0; k < times.size(); ++k)
        if (std::abs(times[k] - static_cast<double>(k) * dt) > 1e-9 * std::max(1.0, times[k]))
            throw SchemaError("time column is not uniformly spaced at row "
                              + std::to_string(k + 2));

    TimeGrid grid(dt, times.size() - 1);
    Matrix values(n, times.size());
    for (std::size_t k = 0; k < rows.size(); ++k)
        for (std::size_t i = 0; i < n; ++i)
            values(i, k) = rows[k][i];
    return Ensemble(grid, std::move(values));
}

} // namespace ergo::csv
