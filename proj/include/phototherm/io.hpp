#pragma once

// Small file and CSV helpers shared by the bath/fitdata loaders and the CLI.
// All emitted numbers go through g17 (17 significant digits) and all line
// endings are '\n' so repeated runs are byte-identical.

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "phototherm/errors.hpp"
#include "phototherm/params.hpp"

namespace phototherm {

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw config_error("read failure on file: " + path);
    return buf.str();
}

inline void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open file for writing: " + path);
    out << content;
    if (!out) throw config_error("write failure on file: " + path);
}

namespace detail {

inline std::vector<std::string> split_fields(std::string_view line, char delim = ',') {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(trim(line.substr(start)));
            return out;
        }
        out.emplace_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

inline std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t pos = text.find('\n', start);
        if (pos == std::string_view::npos) {
            if (start < text.size()) out.emplace_back(text.substr(start));
            return out;
        }
        std::string_view line = text.substr(start, pos - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.emplace_back(line);
        start = pos + 1;
    }
    return out;
}

} // namespace detail

} // namespace phototherm
