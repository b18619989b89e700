// demo.hpp
// Synthetic market panels with a known volatility data-generating process.
//
// stress_memory: log v_it = mu_i + S_t + u_it, where S is a persistent common
//   stress factor that also drives VIX and MOVE, and u_it is an AR(1) whose
//   coefficient rho_it wanders slowly inside [0.85, 0.99].
// pure_har:      log v_it follows a HAR recursion in its own past; VIX and MOVE
//   are unrelated noise.
// Observed Parkinson variance is v_it * exp(eta_it), eta ~ N(0, noise_sd^2),
// built into the high/low range so that parkinson_rv returns it exactly.

#pragma once

#include "vplab/core.hpp"
#include "vplab/ingest.hpp"

#include <string>

namespace vplab {

enum class DemoKind { stress_memory, pure_har };

std::string to_string(DemoKind k);
DemoKind demo_kind_from_string(const std::string& s);

struct DemoSpec {
    DemoKind kind = DemoKind::stress_memory;
    std::size_t n_stocks = 20;
    std::size_t n_days = 2500;
    std::uint64_t seed = 1;
    std::string start = "2012-01-02";
    double noise_sd = 0.6;  // measurement noise of the variance proxy (log scale)
};

struct DemoPanel {
    MarketPanel panel;
    Grid log_var;     // latent log variance (days x stocks)
    Grid rho;         // AR coefficient of the idiosyncratic part (stress_memory)
    std::vector<double> stress;  // common factor S_t (stress_memory)
    std::vector<double> mu;      // per-stock long-run log variance
    DemoSpec spec;
};

DemoPanel make_demo_panel(const DemoSpec& spec);

/// Monte Carlo estimate of E[log mean(RV_{t+1..t+h})] given the latent state at
/// t: the forecast a model with perfect state knowledge would make.
double demo_oracle_forecast(const DemoPanel& demo, std::size_t stock, std::size_t t, int h);

}  // namespace vplab
