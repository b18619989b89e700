// plot.hpp
// Minimal SVG line charts and heatmaps. The plots only restate data already
// written to CSV, so they favour fixed layout over configurability.

#pragma once

#include <string>
#include <vector>

namespace vplab::plot {

struct Series {
    std::string name;
    std::vector<double> y;  // NaN breaks the line
};

/// Lines over a shared x axis; `x_labels` (if non-empty) annotates the first,
/// middle and last positions. `secondary` series use a right-hand axis.
std::string line_chart(const std::string& title, const std::vector<std::string>& x_labels,
                       const std::vector<Series>& primary, const std::vector<Series>& secondary = {});

/// rows x cols grid coloured on a diverging scale symmetric around zero.
std::string heatmap(const std::string& title, const std::vector<std::string>& row_labels,
                    const std::vector<std::string>& col_labels, const std::vector<std::vector<double>>& values);

void write_file(const std::string& path, const std::string& svg);

}  // namespace vplab::plot
