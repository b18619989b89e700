// pipeline.cpp

#include "vplab/pipeline.hpp"

namespace vplab {

PipelineData build_pipeline(const MarketPanel& market, const PipelineConfig& cfg) {
    PipelineData out;
    out.returns = to_log_returns(market, cfg.winsor_lo, cfg.winsor_hi);
    out.vol = parkinson_rv(market);
    out.memory = rolling_memory(out.vol, cfg.rolling);
    // the squared-return variant swaps only the target; predictors stay on
    // the range-based proxy
    const VolPanel target_vol =
        cfg.target_proxy == ProxyKind::parkinson ? out.vol : squared_return_rv(market, out.returns);
    for (int h : cfg.horizons) out.targets.push_back(forecast_target(target_vol, h, cfg.target_proxy));
    out.features = assemble_features(market, out.vol, out.returns, out.memory, out.targets, cfg.features);
    return out;
}

}  // namespace vplab
