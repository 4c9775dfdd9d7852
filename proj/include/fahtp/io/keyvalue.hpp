#pragma once

#include <fstream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "../error.hpp"
#include "csv.hpp"

namespace fahtp::io {

using Setting = std::pair<std::string, std::string>;

/// Parses "key = value" lines. '#' starts a comment; blank lines are ignored; a key may
/// appear once. Order of appearance is preserved.
inline std::vector<Setting> read_key_values(const std::string& path)
{
    std::ifstream in(path);
    if (!in) fahtp::detail::fail(ErrorCode::io_error, "cannot open '" + path + "'");
    std::vector<Setting> out;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string_view body = detail::trim(std::string_view(line).substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        const std::string where = path + ": line " + std::to_string(line_no);
        if (eq == std::string_view::npos) fahtp::detail::fail(ErrorCode::parse_error, where + ": expected key = value");
        std::string key(detail::trim(body.substr(0, eq)));
        std::string value(detail::trim(body.substr(eq + 1)));
        if (key.empty()) fahtp::detail::fail(ErrorCode::parse_error, where + ": empty key");
        if (!seen.insert(key).second) fahtp::detail::fail(ErrorCode::parse_error, where + ": duplicate key '" + key + "'");
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

} // namespace fahtp::io
