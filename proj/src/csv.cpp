// csv.cpp

#include "vplab/csv.hpp"

#include "vplab/core.hpp"

#include <charconv>
#include <cmath>

namespace vplab::csv {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

namespace {

std::string_view trim_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += v[i];
    }
    return s;
}

}  // namespace

Reader::Reader(std::string path, const std::vector<std::string>& expected)
    : path_(std::move(path)), in_(path_), width_(expected.size()) {
    if (!in_) throw DataError("cannot open '" + path_ + "'");
    if (!std::getline(in_, buf_)) fail("empty file (expected header '" + join(expected) + "')");
    const auto got = trim_cr(buf_);
    if (got != join(expected)) {
        fail("header '" + std::string(got) + "' does not match '" + join(expected) + "'");
    }
}

bool Reader::next(std::vector<std::string_view>& fields) {
    while (std::getline(in_, buf_)) {
        ++line_;
        const auto row = trim_cr(buf_);
        if (row.empty()) continue;
        fields = split(row);
        if (fields.size() != width_) {
            fail("expected " + std::to_string(width_) + " fields, got " +
                 std::to_string(fields.size()));
        }
        return true;
    }
    return false;
}

double Reader::number(std::string_view field) const {
    if (field.empty()) return kMissing;
    double v = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc{} || ptr != end) fail("not a number: '" + std::string(field) + "'");
    return v;
}

void Reader::fail(const std::string& what) const { throw ParseError(path_, line_, what); }

std::string format(double v) {
    if (std::isnan(v)) return {};
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

Writer::Writer(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw DataError("cannot write '" + path + "'");
    out_ << join(header) << '\n';
}

Writer& Writer::operator<<(std::string_view field) {
    if (!first_) out_ << ',';
    out_ << field;
    first_ = false;
    return *this;
}

Writer& Writer::operator<<(double v) { return *this << std::string_view(format(v)); }

Writer& Writer::operator<<(long long v) { return *this << std::string_view(std::to_string(v)); }

void Writer::end_row() {
    out_ << '\n';
    first_ = true;
}

}  // namespace vplab::csv
