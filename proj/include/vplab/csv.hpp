// csv.hpp
// Minimal comma-separated reader/writer for the lab's flat file formats.
// No quoting: none of the documented schemas contain embedded commas.

#pragma once

#include <cstddef>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace vplab::csv {

class Reader {
public:
    /// Opens `path` and checks that the header equals `expected` exactly.
    Reader(std::string path, const std::vector<std::string>& expected);

    /// Reads the next non-empty row; false at EOF. Row width is validated.
    bool next(std::vector<std::string_view>& fields);

    std::size_t line() const { return line_; }
    const std::string& path() const { return path_; }

    /// Parses a numeric field; empty -> NaN; garbage -> ParseError.
    double number(std::string_view field) const;
    [[noreturn]] void fail(const std::string& what) const;

private:
    std::string path_;
    std::ifstream in_;
    std::string buf_;
    std::size_t width_ = 0;
    std::size_t line_ = 1;
};

/// Shortest round-trip decimal representation; NaN -> empty field.
std::string format(double v);

std::vector<std::string_view> split(std::string_view line, char sep = ',');

class Writer {
public:
    Writer(const std::string& path, const std::vector<std::string>& header);
    Writer& operator<<(std::string_view field);
    Writer& operator<<(double v);
    Writer& operator<<(long long v);
    void end_row();

private:
    std::ofstream out_;
    bool first_ = true;
};

}  // namespace vplab::csv
