/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

// Internal text-format helpers shared by the file-writing translation
// units. Not part of the public headers.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace slosh::detail {

/// Shortest decimal form that parses back to the same double.
inline void append_double(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

/// Hex float, always exact.
inline void append_hex(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%a", v);
    out += buf;
}

inline double parse_double(const std::string& tok, const std::string& context) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + tok.size() || tok.empty()) {
        throw std::invalid_argument("bad number '" + tok + "' in " + context);
    }
    return v;
}

inline long parse_long(const std::string& tok, const std::string& context) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end != begin + tok.size() || tok.empty()) {
        throw std::invalid_argument("bad integer '" + tok + "' in " + context);
    }
    return v;
}

/// Write the whole file at once, creating parent directories.
inline void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

inline std::ifstream open_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::invalid_argument("cannot open file: " + path.string());
    }
    return in;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

/// `key=value` lines; `#` lines and blank lines are skipped.
inline std::vector<std::pair<std::string, std::string>> read_pairs(
    const std::filesystem::path& path) {
    auto in = open_text(path);
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("expected key=value in " + path.string() + ": " + line);
        }
        pairs.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    return pairs;
}

} // namespace slosh::detail
