// config.hpp
// Run configuration: an INI file with sections, validated at load time and
// echoed back fully resolved (defaults expanded) next to every output.

#pragma once

#include "vplab/demo.hpp"
#include "vplab/ladder.hpp"
#include "vplab/pipeline.hpp"
#include "vplab/portfolio.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vplab {

enum class DataSource { demo, files };

struct RunConfig {
    // [run]
    std::uint64_t seed = 1;  // demo panel, tree ensembles
    // [data]
    DataSource source = DataSource::demo;
    std::string prices_path, market_path, sectors_path;
    double min_coverage = 0.70;
    // [demo]
    DemoSpec demo;
    // [returns], [memory], [features]
    PipelineConfig pipeline;
    // [ladder]
    std::vector<std::string> models = kModelIds;
    bool garch_benchmark = true;
    LadderConfig ladder;
    // [figarch]
    std::size_t figarch_stocks = 10;
    double figarch_scale = 100.0;
    std::size_t figarch_lags = 1000;
    // [evaluate]
    std::string benchmark = "A";
    std::size_t dm_min_dates = 10;
    bool importance = true;
    // [portfolio]
    double gamma = 5.0;
    ScalingWindow scaling = ScalingWindow::full;
    std::size_t min_regime_periods = 8;

    /// Throws ConfigError naming the first offending key.
    void validate() const;
    /// Fully resolved INI text; stable key order.
    std::string resolved_ini() const;
    /// FNV-1a 64 of resolved_ini(), as 16 hex digits.
    std::string hash() const;
};

/// Empty path = all defaults. Unknown sections or keys are errors.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& ini_text, const std::string& origin = "<config>");

std::string fnv1a_hex(std::string_view bytes);

}  // namespace vplab
