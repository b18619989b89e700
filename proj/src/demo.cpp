// demo.cpp

#include "vplab/demo.hpp"

#include "vplab/numeric.hpp"
#include "vplab/rng.hpp"

#include <cmath>
#include <cstdio>
#include <iterator>
#include <numbers>

namespace vplab {

namespace {

constexpr double kStressPhi = 0.995;
constexpr double kStressSd = 0.6;     // stationary sd of S
constexpr double kIdioSd = 0.4;       // stationary sd of u
constexpr double kStatePhi = 0.998;   // persistence of the memory state
constexpr double kStateSd = 1.5;
constexpr double kRhoLow = 0.85, kRhoHigh = 0.99;

// HAR recursion of the pure_har variant on log variance
constexpr double kHarD = 0.36, kHarW = 0.28, kHarM = 0.28;
constexpr double kHarSd = 0.35;
constexpr std::size_t kHarBurn = 500;

constexpr std::size_t kOracleDraws = 400;

const char* const kSectors[] = {"Energy", "Financials", "Health Care", "Industrials", "Information Technology"};

double rho_of_state(double m) { return kRhoLow + (kRhoHigh - kRhoLow) * logistic(m); }

double har_step_mean(const std::vector<double>& lv, std::size_t t, double c) {
    // prediction of lv[t] from lv[..t-1]
    double w = 0.0, m = 0.0;
    for (std::size_t k = 1; k <= 5; ++k) w += lv[t - k];
    for (std::size_t k = 1; k <= 22; ++k) m += lv[t - k];
    return c + kHarD * lv[t - 1] + kHarW * w / 5.0 + kHarM * m / 22.0;
}

}  // namespace

std::string to_string(DemoKind k) { return k == DemoKind::stress_memory ? "stress_memory" : "pure_har"; }

DemoKind demo_kind_from_string(const std::string& s) {
    if (s == "stress_memory") return DemoKind::stress_memory;
    if (s == "pure_har") return DemoKind::pure_har;
    throw ConfigError("unknown demo kind '" + s + "'");
}

DemoPanel make_demo_panel(const DemoSpec& spec) {
    if (spec.n_stocks < 1 || spec.n_days < 30) throw ConfigError("demo panel needs >= 1 stock and >= 30 days");
    if (!(spec.noise_sd >= 0.0)) throw ConfigError("demo noise_sd must be >= 0");
    const auto n = static_cast<Eigen::Index>(spec.n_days), N = static_cast<Eigen::Index>(spec.n_stocks);

    DemoPanel out;
    out.spec = spec;
    MarketPanel& p = out.panel;
    p.dates = business_days(Date::parse(spec.start), spec.n_days);
    p.open.resize(n, N);
    p.high.resize(n, N);
    p.low.resize(n, N);
    p.close.resize(n, N);
    p.volume.resize(n, N);
    out.log_var.resize(n, N);
    out.rho = Grid::Constant(n, N, kMissing);

    // common factor and market series
    Philox common(spec.seed, 0);
    out.stress.resize(spec.n_days);
    std::vector<double> vix(spec.n_days), move(spec.n_days), vol_shock(spec.n_days);
    const double stress_innov = kStressSd * std::sqrt(1.0 - kStressPhi * kStressPhi);
    double S = kStressSd * common.normal();
    for (std::size_t t = 0; t < spec.n_days; ++t) {
        if (t > 0) S = kStressPhi * S + stress_innov * common.normal();
        out.stress[t] = S;
        const double zv = common.normal(), zm = common.normal();
        if (spec.kind == DemoKind::stress_memory) {
            vix[t] = 20.0 * std::exp(0.8 * S + 0.05 * zv);
            move[t] = 100.0 * std::exp(0.6 * S + 0.05 * zm);
        } else {
            vix[t] = 20.0 * std::exp(0.3 * zv);
            move[t] = 100.0 * std::exp(0.3 * zm);
        }
        vol_shock[t] = 0.3 * common.normal();
    }
    p.market = {{"VIX", vix}, {"MOVE", move}};
    if (spec.kind == DemoKind::pure_har) out.stress.assign(spec.n_days, 0.0);

    const double ln2x4 = 4.0 * std::numbers::ln2;
    out.mu.assign(spec.n_stocks, 0.0);
    parallel_for(spec.n_stocks, [&](std::size_t i) {
        const auto j = static_cast<Eigen::Index>(i);
        Philox rng(spec.seed, 1 + i);
        const double mu = std::log(2e-4) + 0.3 * rng.normal();
        out.mu[i] = mu;
        const double vol_level = std::log(1e6) + 0.5 * rng.normal();

        std::vector<double> lv(spec.n_days);
        if (spec.kind == DemoKind::stress_memory) {
            const double state_innov = kStateSd * std::sqrt(1.0 - kStatePhi * kStatePhi);
            double m = kStateSd * rng.normal();
            double u = kIdioSd * rng.normal();
            for (std::size_t t = 0; t < spec.n_days; ++t) {
                const double rho = rho_of_state(m);
                if (t > 0) u = rho * u + kIdioSd * std::sqrt(1.0 - rho * rho) * rng.normal();
                lv[t] = mu + out.stress[t] + u;
                out.rho(static_cast<Eigen::Index>(t), j) = rho;
                m = kStatePhi * m + state_innov * rng.normal();
            }
        } else {
            const double c = mu * (1.0 - kHarD - kHarW - kHarM);
            std::vector<double> path(kHarBurn + spec.n_days, mu);
            for (std::size_t t = 22; t < path.size(); ++t) path[t] = har_step_mean(path, t, c) + kHarSd * rng.normal();
            std::copy(path.begin() + static_cast<long>(kHarBurn), path.end(), lv.begin());
        }

        double close = 50.0 * std::exp(0.5 * rng.normal());
        for (std::size_t t = 0; t < spec.n_days; ++t) {
            const auto ti = static_cast<Eigen::Index>(t);
            const double v = std::exp(lv[t]);
            out.log_var(ti, j) = lv[t];
            if (t > 0) close *= std::exp(std::sqrt(v) * rng.normal() - 0.5 * v);
            const double v_obs = v * std::exp(spec.noise_sd * rng.normal());
            const double range = std::sqrt(ln2x4 * v_obs);
            p.close(ti, j) = close;
            p.high(ti, j) = close * std::exp(0.5 * range);
            p.low(ti, j) = close * std::exp(-0.5 * range);
            p.open(ti, j) = close * std::exp(range * (rng.uniform() - 0.5));
            p.volume(ti, j) = std::round(std::exp(vol_level + vol_shock[t] + 0.2 * rng.normal()));
        }
    });
    for (std::size_t i = 0; i < spec.n_stocks; ++i) {
        char name[16];
        std::snprintf(name, sizeof name, "SYN%03zu", i + 1);
        p.stocks.emplace_back(name);
        p.sectors[name] = kSectors[i % std::size(kSectors)];
    }
    p.validate();
    return out;
}

double demo_oracle_forecast(const DemoPanel& demo, std::size_t stock, std::size_t t, int h) {
    if (h < 1) throw ConfigError("forecast horizon must be >= 1");
    const auto j = static_cast<Eigen::Index>(stock);
    const auto& spec = demo.spec;
    // Monte Carlo over the future path given the latent state at t; the seed
    // depends only on (stock, t) so the oracle is deterministic.
    Philox rng(spec.seed ^ 0x9e3779b97f4a7c15ULL, (static_cast<std::uint64_t>(stock) << 32) | t);
    double acc = 0.0;
    const double stress_innov = kStressSd * std::sqrt(1.0 - kStressPhi * kStressPhi);

    if (spec.kind == DemoKind::stress_memory) {
        const double S0 = demo.stress[t];
        const double mu = demo.mu[stock];
        const double u0 = demo.log_var(static_cast<Eigen::Index>(t), j) - S0 - mu;
        const double rho = demo.rho(static_cast<Eigen::Index>(t), j);
        for (std::size_t r = 0; r < kOracleDraws; ++r) {
            double S = S0, u = u0, sum = 0.0;
            for (int k = 1; k <= h; ++k) {
                S = kStressPhi * S + stress_innov * rng.normal();
                u = rho * u + kIdioSd * std::sqrt(1.0 - rho * rho) * rng.normal();
                sum += std::exp(mu + S + u + spec.noise_sd * rng.normal());
            }
            acc += std::log(sum / h);
        }
    } else {
        const double mu = demo.mu[stock];
        const double c = mu * (1.0 - kHarD - kHarW - kHarM);
        std::vector<double> lv(23 + static_cast<std::size_t>(h));
        for (std::size_t r = 0; r < kOracleDraws; ++r) {
            for (std::size_t k = 0; k < 23; ++k) {
                const auto src = static_cast<Eigen::Index>(t) - 22 + static_cast<Eigen::Index>(k);
                lv[k] = demo.log_var(std::max<Eigen::Index>(src, 0), j);
            }
            double sum = 0.0;
            for (int k = 1; k <= h; ++k) {
                const std::size_t pos = 22 + static_cast<std::size_t>(k);
                lv[pos] = har_step_mean(lv, pos, c) + kHarSd * rng.normal();
                sum += std::exp(lv[pos] + spec.noise_sd * rng.normal());
            }
            acc += std::log(sum / h);
        }
    }
    return acc / static_cast<double>(kOracleDraws);
}

}  // namespace vplab
