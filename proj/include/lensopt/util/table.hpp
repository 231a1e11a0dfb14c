#pragma once

#include <charconv>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "lensopt/optics/types.hpp"

namespace lensopt::util {

/// Artifact tables: tab-separated text, '#'-prefixed header line, shortest
/// round-trip formatting for doubles so re-reading is lossless.
inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find('\t', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view field) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ConfigError(fmt::format("malformed number '{}'", field));
    return v;
}

inline int parse_int(std::string_view field) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ConfigError(fmt::format("malformed integer '{}'", field));
    return v;
}

/// Reads data rows, skipping blank and '#' lines; checks the column count.
template <typename RowFn>
void for_each_row(std::istream& in, std::size_t columns, RowFn&& fn) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.front() == '#') continue;
        auto fields = split_tabs(line);
        if (fields.size() != columns)
            throw ConfigError(fmt::format("line {}: expected {} columns, got {}", lineno, columns, fields.size()));
        fn(fields);
    }
}

}  // namespace lensopt::util
