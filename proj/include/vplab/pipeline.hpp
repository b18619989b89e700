// pipeline.hpp
// Raw panel -> returns, variance proxy, rolling memory, targets and features,
// in the order every consumer (tests, acceptance runs, CLI) needs them.

#pragma once

#include "vplab/features.hpp"
#include "vplab/ingest.hpp"
#include "vplab/memest.hpp"

#include <vector>

namespace vplab {

struct PipelineConfig {
    double winsor_lo = 0.001;
    double winsor_hi = 0.999;
    ProxyKind target_proxy = ProxyKind::parkinson;
    RollingConfig rolling;
    FeatureConfig features;
    std::vector<int> horizons = kHorizons;
};

struct PipelineData {
    ReturnPanel returns;
    VolPanel vol;  // Parkinson variance; always the feature source
    MemoryPanel memory;
    std::vector<TargetPanel> targets;
    FeaturePanel features;
};

PipelineData build_pipeline(const MarketPanel& market, const PipelineConfig& cfg);

}  // namespace vplab
