#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <ios>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bfcr/error.hpp"

namespace bfcr {

/// Ordered, uniformly spaced, finite samples. Never empty.
class Series {
public:
    explicit Series(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) {
            throw Error(Errc::EmptyInput, "series must contain at least one value");
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i])) {
                throw Error(Errc::NonFiniteValue, "series value at index " + std::to_string(i) + " is not finite");
            }
        }
    }

    Series(std::initializer_list<double> values) : Series(std::vector<double>(values)) {}

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double front() const noexcept { return values_.front(); }
    double back() const noexcept { return values_.back(); }

    std::span<const double> values() const noexcept { return values_; }
    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    /// Contiguous sub-range [first, first + count).
    Series slice(std::size_t first, std::size_t count) const {
        if (first + count > values_.size()) {
            throw Error(Errc::ShapeError, "slice out of range");
        }
        return Series(std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(first),
                                          values_.begin() + static_cast<std::ptrdiff_t>(first + count)));
    }

    friend bool operator==(const Series&, const Series&) = default;

private:
    std::vector<double> values_;
};

/// output[i] = input[N - 1 - i]. Order reversal only; values are never sorted.
inline Series reverse(const Series& series) {
    std::vector<double> out(series.begin(), series.end());
    std::reverse(out.begin(), out.end());
    return Series(std::move(out));
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

// Parses a whole cell as a double. Accepts a leading '+'.
inline std::optional<double> parse_double(std::string_view cell) {
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    if (cell.empty()) return std::nullopt;
    double value = 0.0;
    const auto* first = cell.data();
    const auto* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc::result_out_of_range) return std::numeric_limits<double>::infinity();
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return value;
}

inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace detail

/// Reads a one-column (value) or two-column (index,value) CSV. `column` is a
/// 0-based column selector; by default the last column is used. A single header
/// line is skipped when it is the only line that fails to parse.
inline Series parse_csv(std::string_view text, std::optional<std::size_t> column = std::nullopt) {
    struct Row {
        std::size_t line_no;
        std::string_view line;
    };
    std::vector<Row> rows;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find('\n', start);
        const auto raw = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        ++line_no;
        if (!detail::trim(raw).empty()) rows.push_back({line_no, raw});
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    if (rows.empty()) {
        throw Error(Errc::EmptyInput, "no data rows in CSV input");
    }

    auto cell_of = [&](const Row& row) -> std::optional<std::string_view> {
        const auto cells = detail::split_cells(row.line);
        const std::size_t col = column.value_or(cells.size() - 1);
        if (col >= cells.size()) return std::nullopt;
        return cells[col];
    };

    auto first_value = cell_of(rows.front());
    std::size_t first_row = 0;
    if (!first_value || !detail::parse_double(*first_value)) {
        first_row = 1;  // header
    }

    std::vector<double> values;
    values.reserve(rows.size() - first_row);
    for (std::size_t r = first_row; r < rows.size(); ++r) {
        const auto cell = cell_of(rows[r]);
        if (!cell) {
            throw Error(Errc::ParseError, "line " + std::to_string(rows[r].line_no) + ": selected column missing",
                        rows[r].line_no);
        }
        const auto value = detail::parse_double(*cell);
        if (!value) {
            throw Error(Errc::ParseError,
                        "line " + std::to_string(rows[r].line_no) + ": cannot parse '" + std::string(*cell) + "'",
                        rows[r].line_no);
        }
        if (!std::isfinite(*value)) {
            throw Error(Errc::NonFiniteValue, "line " + std::to_string(rows[r].line_no) + ": non-finite value",
                        rows[r].line_no);
        }
        values.push_back(*value);
    }
    if (values.empty()) {
        throw Error(Errc::EmptyInput, "CSV input has a header but no data rows");
    }
    return Series(std::move(values));
}

inline Series read_csv_file(const std::string& path, std::optional<std::size_t> column = std::nullopt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::Io, "cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), column);
}

/// Writes `value` header plus one value per line at 17 significant digits.
inline void write_csv(std::ostream& out, const Series& series) {
    out << "value\n";
    for (double v : series) out << detail::format_double(v) << '\n';
}

}  // namespace bfcr
