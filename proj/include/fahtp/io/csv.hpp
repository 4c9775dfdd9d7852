#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "../core.hpp"

namespace fahtp::io {

/// Shortest text that reads back to the same double (17 significant digits).
inline std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

} // namespace detail

struct CsvTable {
    std::vector<std::string> header;
    Matrix values;
};

/// Parses a numeric comma-separated file. Blank lines are skipped; every data row must
/// have the same number of fields. Rows and columns in error messages are 1-based and
/// count physical lines of the file.
inline CsvTable read_csv(const std::string& path, bool has_header)
{
    std::ifstream in(path);
    if (!in) fahtp::detail::fail(ErrorCode::io_error, "cannot open '" + path + "'");

    CsvTable table;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool header_pending = has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_fields(line);
        if (header_pending) {
            header_pending = false;
            for (auto f : fields) table.header.emplace_back(f);
            width = fields.size();
            continue;
        }
        const auto where = [&](std::size_t col) {
            return path + ": row " + std::to_string(line_no) + ", column " + std::to_string(col);
        };
        if (width == 0) width = fields.size();
        if (fields.size() != width) {
            fahtp::detail::fail(ErrorCode::parse_error, where(std::min(fields.size(), width) + 1) + ": expected " +
                                                            std::to_string(width) + " fields, found " +
                                                            std::to_string(fields.size()));
        }
        std::vector<double> row(fields.size());
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const auto f = fields[j];
            const char* end = f.data() + f.size();
            const char* begin = f.data();
            if (begin != end && *begin == '+') ++begin;
            auto [ptr, ec] = std::from_chars(begin, end, row[j]);
            if (f.empty() || ec != std::errc() || ptr != end || !std::isfinite(row[j])) {
                fahtp::detail::fail(ErrorCode::parse_error,
                                    where(j + 1) + ": '" + std::string(f) + "' is not a finite number");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fahtp::detail::fail(ErrorCode::parse_error, path + ": no data rows");

    table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < width; ++j) table.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    return table;
}

/// Row-at-a-time writer. Fields are written verbatim, so callers keep them free of commas.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : path_(path), out_(path, std::ios::binary)
    {
        if (!out_) fahtp::detail::fail(ErrorCode::io_error, "cannot write '" + path + "'");
    }

    void row(const std::vector<std::string>& fields)
    {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
        if (!out_) fahtp::detail::fail(ErrorCode::io_error, "write failed on '" + path_ + "'");
    }

private:
    std::string path_;
    std::ofstream out_;
};

inline void write_matrix_csv(const std::string& path, const Matrix& m)
{
    CsvWriter w(path);
    std::vector<std::string> fields(static_cast<std::size_t>(m.cols()));
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) fields[static_cast<std::size_t>(j)] = format_double(m(i, j));
        w.row(fields);
    }
}

} // namespace fahtp::io
