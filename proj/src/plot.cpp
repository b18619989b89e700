// plot.cpp

#include "vplab/plot.hpp"

#include "vplab/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

namespace vplab::plot {

namespace {

constexpr double kW = 800, kH = 420, kLeft = 70, kRight = 70, kTop = 40, kBottom = 50;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
    char buf[32];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, std::round(v * 100.0) / 100.0);
    return std::string(buf, p);
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string label(double x, double y, const std::string& text, const char* anchor = "middle", int size = 11) {
    return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + std::to_string(size) +
           "\" text-anchor=\"" + anchor + "\">" + escape(text) + "</text>\n";
}

std::pair<double, double> range_of(const std::vector<Series>& s) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& x : s) {
        for (double v : x.y) {
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    if (!std::isfinite(lo)) return {0.0, 1.0};
    if (hi - lo < 1e-12) return {lo - 0.5, hi + 0.5};
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

std::string compact(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

}  // namespace

std::string line_chart(const std::string& title, const std::vector<std::string>& x_labels,
                       const std::vector<Series>& primary, const std::vector<Series>& secondary) {
    std::size_t n = 0;
    for (const auto* group : {&primary, &secondary}) {
        for (const auto& s : *group) n = std::max(n, s.y.size());
    }
    const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
    auto xpos = [&](std::size_t i) { return kLeft + (n > 1 ? pw * static_cast<double>(i) / static_cast<double>(n - 1) : 0.0); };

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kW) + "\" height=\"" + num(kH) +
                      "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += label(kW / 2, 22, title, "middle", 14);
    svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
           "\" fill=\"none\" stroke=\"#444\"/>\n";

    std::size_t colour = 0;
    auto draw = [&](const std::vector<Series>& group, bool right) {
        if (group.empty()) return;
        const auto [lo, hi] = range_of(group);
        auto ypos = [&](double v) { return kTop + ph * (1.0 - (v - lo) / (hi - lo)); };
        const double ax = right ? kW - kRight + 6 : kLeft - 6;
        const char* anchor = right ? "start" : "end";
        for (int k = 0; k <= 4; ++k) {
            const double v = lo + (hi - lo) * k / 4.0;
            svg += label(ax, ypos(v) + 4, compact(v), anchor, 10);
        }
        if (lo < 0.0 && hi > 0.0 && !right) {
            svg += "<line x1=\"" + num(kLeft) + "\" x2=\"" + num(kLeft + pw) + "\" y1=\"" + num(ypos(0.0)) + "\" y2=\"" +
                   num(ypos(0.0)) + "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
        }
        for (const auto& s : group) {
            const char* col = kPalette[colour % std::size(kPalette)];
            std::string d;
            bool pen = false;
            for (std::size_t i = 0; i < s.y.size(); ++i) {
                if (!std::isfinite(s.y[i])) {
                    pen = false;
                    continue;
                }
                d += (pen ? " L" : " M") + num(xpos(i)) + " " + num(ypos(s.y[i]));
                pen = true;
            }
            svg += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + col + "\" stroke-width=\"1.4\"" +
                   (right ? " stroke-dasharray=\"5 3\"" : "") + "/>\n";
            const double ly = kTop + 14 + 14 * static_cast<double>(colour);
            svg += "<line x1=\"" + num(kLeft + 10) + "\" x2=\"" + num(kLeft + 28) + "\" y1=\"" + num(ly - 4) + "\" y2=\"" +
                   num(ly - 4) + "\" stroke=\"" + col + "\" stroke-width=\"2\"/>\n";
            svg += label(kLeft + 32, ly, s.name + (right ? " (right axis)" : ""), "start", 10);
            ++colour;
        }
    };
    draw(primary, false);
    draw(secondary, true);
    if (!x_labels.empty() && n > 0) {
        for (std::size_t i : {std::size_t{0}, (n - 1) / 2, n - 1}) {
            if (i < x_labels.size()) svg += label(xpos(i), kTop + ph + 18, x_labels[i], "middle", 10);
        }
    }
    svg += "</svg>\n";
    return svg;
}

std::string heatmap(const std::string& title, const std::vector<std::string>& rows,
                    const std::vector<std::string>& cols, const std::vector<std::vector<double>>& values) {
    const double cell_w = 70, cell_h = 22, left = 170, top = 70;
    const double width = left + cell_w * static_cast<double>(cols.size()) + 30;
    const double height = top + cell_h * static_cast<double>(rows.size()) + 30;
    double scale = 0.0;
    for (const auto& r : values) {
        for (double v : r) {
            if (std::isfinite(v)) scale = std::max(scale, std::abs(v));
        }
    }
    if (scale == 0.0) scale = 1.0;

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
                      "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += label(width / 2, 22, title, "middle", 14);
    for (std::size_t j = 0; j < cols.size(); ++j) {
        svg += label(left + cell_w * (static_cast<double>(j) + 0.5), top - 8, cols[j], "middle", 10);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double y = top + cell_h * static_cast<double>(i);
        svg += label(left - 6, y + cell_h * 0.7, rows[i], "end", 10);
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const double v = i < values.size() && j < values[i].size() ? values[i][j] : NAN;
            std::string fill = "#eeeeee";
            if (std::isfinite(v)) {
                const double t = std::clamp(v / scale, -1.0, 1.0);
                // blue for gains, red for losses, white at zero
                const int other = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(t))));
                char buf[16];
                if (t >= 0) std::snprintf(buf, sizeof buf, "#%02x%02xff", other, other);
                else std::snprintf(buf, sizeof buf, "#ff%02x%02x", other, other);
                fill = buf;
            }
            const double x = left + cell_w * static_cast<double>(j);
            svg += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(cell_w) + "\" height=\"" + num(cell_h) +
                   "\" fill=\"" + fill + "\" stroke=\"white\"/>\n";
            if (std::isfinite(v)) svg += label(x + cell_w / 2, y + cell_h * 0.7, compact(v), "middle", 10);
        }
    }
    svg += "</svg>\n";
    return svg;
}

void write_file(const std::string& path, const std::string& svg) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << svg;
}

}  // namespace vplab::plot
