// vplab.cpp
// Command-line front end: one subcommand per pipeline stage.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 estimation
// error, 1 anything else.

#include "vplab/runner.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <thread>

namespace {

struct ForecastFlags {
    std::string models, horizons;
    std::optional<double> warmup_frac;
    std::optional<std::size_t> d_refit_stride;
};

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vplab: volatility persistence laboratory"};
    app.require_subcommand(1, 1);

    std::string config_path, out_dir = "out";
    std::size_t threads = 0;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "INI configuration file (defaults if omitted)");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--threads", threads, "worker threads; 0 = all hardware threads")->capture_default_str();
    app.add_option("--seed", seed, "overrides run.seed");

    std::string stage_name;
    ForecastFlags ff;
    for (const char* name : {"simulate", "estimate", "figarch", "features", "forecast", "evaluate", "portfolio",
                             "report", "all"}) {
        auto* sub = app.add_subcommand(name, std::string("run the '") + name + "' stage");
        sub->callback([&stage_name, name] { stage_name = name; });
        if (std::string(name) == "forecast" || std::string(name) == "all") {
            sub->add_option("--models", ff.models, "comma-separated model ids");
            sub->add_option("--horizons", ff.horizons, "comma-separated horizons in days");
            sub->add_option("--warmup-frac", ff.warmup_frac, "share of stride dates used only for training");
            sub->add_option("--d-refit-stride", ff.d_refit_stride, "stride dates between D-model refits");
        }
    }
    auto* run = app.add_subcommand("run", "run a named stage");
    run->add_option("--stage", stage_name, "stage name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        vplab::RunConfig cfg = vplab::load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (!ff.models.empty()) cfg.models = split_csv(ff.models);
        if (!ff.horizons.empty()) {
            cfg.pipeline.horizons.clear();
            for (const auto& h : split_csv(ff.horizons)) {
                try {
                    cfg.pipeline.horizons.push_back(std::stoi(h));
                } catch (const std::exception&) {
                    throw vplab::ConfigError("--horizons: '" + h + "' is not an integer");
                }
            }
        }
        if (ff.warmup_frac) cfg.ladder.warmup_frac = *ff.warmup_frac;
        if (ff.d_refit_stride) cfg.ladder.d_refit_stride = *ff.d_refit_stride;
        cfg.validate();
        vplab::set_thread_count(threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads);
        vplab::run_stage(vplab::stage_from_string(stage_name), cfg, out_dir);
    } catch (const vplab::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const vplab::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const vplab::EstimationError& e) {
        std::cerr << "estimation error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
