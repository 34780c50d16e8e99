#ifndef LEGADAPT_IO_INPUT_HPP
#define LEGADAPT_IO_INPUT_HPP

#include "legadapt/errors.hpp"
#include "legadapt/estimators.hpp"
#include "legadapt/io/number.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace legadapt::io
{

/// One data row with the 1-based line it came from.
struct Row
{
    std::size_t line = 0;
    std::vector<double> values;
};

/** Rows of numbers separated by commas, semicolons, tabs or spaces.
 *
 *  Blank lines and lines whose first non-blank character is '#' are skipped.
 *  Every row must have the same number of columns.
 */
inline std::vector<Row> read_table(std::istream& in)
{
    std::vector<Row> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#')
            continue;
        Row row{lineno, {}};
        std::size_t pos = first;
        while (pos < line.size())
        {
            const auto end = line.find_first_of(",; \t", pos);
            const std::string_view tok(line.data() + pos, (end == std::string::npos ? line.size() : end) - pos);
            if (!tok.empty())
            {
                const auto v = parse_number(tok);
                if (!v)
                    throw DataError("line " + std::to_string(lineno) + ": not a finite number: '" + std::string(tok) + "'");
                row.values.push_back(*v);
            }
            if (end == std::string::npos)
                break;
            pos = end + 1;
        }
        if (row.values.empty())
            throw DataError("line " + std::to_string(lineno) + ": no values");
        if (!rows.empty() && row.values.size() != rows.front().values.size())
            throw DataError("line " + std::to_string(lineno) + ": expected " +
                            std::to_string(rows.front().values.size()) + " columns, got " +
                            std::to_string(row.values.size()));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<Row> read_table(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open input file " + path.string());
    return read_table(in);
}

inline constexpr double design_tolerance = 1e-9;

/** Regression observations in design order.
 *
 *  One column: y_1..y_n on the implicit grid x_i = -1 + 2i/n.  Two columns: x, y,
 *  where x must match that grid within 1e-9.
 */
inline RegressionSample regression_from_rows(const std::vector<Row>& rows)
{
    const std::size_t n = rows.size();
    if (n < min_sample_size)
        throw UsageError("regression input needs n >= 16 observations, got n = " + std::to_string(n));
    const std::size_t cols = rows.front().values.size();
    if (cols > 2)
        throw DataError("regression input must have 1 column (y) or 2 columns (x, y), got " + std::to_string(cols));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        if (cols == 2)
        {
            const double want = design_point(i + 1, n);
            if (std::abs(rows[i].values[0] - want) > design_tolerance)
                throw DataError("line " + std::to_string(rows[i].line) + ": x = " + format_number(rows[i].values[0]) +
                                " is off the design grid x_i = -1 + 2i/n (n = " + std::to_string(n) +
                                ", expected x_" + std::to_string(i + 1) + " = " + format_number(want) + ")");
        }
        y[i] = rows[i].values[cols - 1];
    }
    return RegressionSample(std::move(y));
}

/// Affine map of [min, max] onto [-1, 1].
struct Rescale
{
    double min = -1.0;
    double max = 1.0;

    double apply(double v) const { return -1.0 + 2.0 * (v - min) / (max - min); }
};

inline DensitySample density_from_rows(const std::vector<Row>& rows, const std::optional<Rescale>& rescale = {})
{
    const std::size_t n = rows.size();
    if (n < min_sample_size)
        throw UsageError("density input needs n >= 16 observations, got n = " + std::to_string(n));
    if (rows.front().values.size() != 1)
        throw DataError("density input must have a single column");
    if (rescale && !(rescale->max > rescale->min))
        throw UsageError("--rescale needs MIN < MAX");
    std::vector<double> xi(n);
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double raw = rows[i].values[0];
        double v = rescale ? rescale->apply(raw) : raw;
        // the affine map can land a hair outside at the interval ends
        if (rescale && std::abs(v) > 1.0 && std::abs(v) <= 1.0 + 1e-12)
            v = std::copysign(1.0, v);
        if (!(v >= -1.0 && v <= 1.0))
            bad.push_back(rows[i].line);
        xi[i] = v;
    }
    if (!bad.empty())
    {
        std::ostringstream msg;
        msg << bad.size() << " value(s) outside " << (rescale ? "the --rescale interval" : "[-1, 1] (use --rescale)")
            << " on line(s) ";
        for (std::size_t k = 0; k < bad.size() && k < 10; ++k)
            msg << (k ? ", " : "") << bad[k];
        if (bad.size() > 10)
            msg << ", ...";
        throw DataError(msg.str());
    }
    return DensitySample(std::move(xi));
}

} // namespace legadapt::io

#endif // LEGADAPT_IO_INPUT_HPP
