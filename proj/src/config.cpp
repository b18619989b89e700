// config.cpp

#include "vplab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace vplab {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T>
T parse_integer(const std::string& key, const std::string& v) {
    T out{};
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return out;
}

double parse_real(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(out)) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string real(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

template <class T>
std::string join(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        if constexpr (std::is_same_v<T, std::string>) {
            out += xs[i];
        } else {
            out += std::to_string(xs[i]);
        }
    }
    return out;
}

struct Key {
    std::string section, name;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string& key, const std::string& value)> set;
};

#define VPLAB_SIZE(sec, nm, field)                                                                \
    Key {                                                                                         \
        sec, nm, [](const RunConfig& c) { return std::to_string(c.field); },                      \
            [](RunConfig& c, const std::string& k, const std::string& v) {                        \
                c.field = parse_integer<std::decay_t<decltype(c.field)>>(k, v);                   \
            }                                                                                     \
    }
#define VPLAB_REAL(sec, nm, field)                                                                \
    Key {                                                                                         \
        sec, nm, [](const RunConfig& c) { return real(c.field); },                                \
            [](RunConfig& c, const std::string& k, const std::string& v) { c.field = parse_real(k, v); } \
    }
#define VPLAB_BOOL(sec, nm, field)                                                                \
    Key {                                                                                         \
        sec, nm, [](const RunConfig& c) { return std::string(c.field ? "true" : "false"); },      \
            [](RunConfig& c, const std::string& k, const std::string& v) { c.field = parse_bool(k, v); } \
    }
#define VPLAB_TEXT(sec, nm, field)                                                                \
    Key {                                                                                         \
        sec, nm, [](const RunConfig& c) { return c.field; },                                      \
            [](RunConfig& c, const std::string&, const std::string& v) { c.field = v; }           \
    }

const std::vector<Key>& keys() {
    static const std::vector<Key> table{
        VPLAB_SIZE("run", "seed", seed),

        {"data", "source", [](const RunConfig& c) { return std::string(c.source == DataSource::demo ? "demo" : "files"); },
         [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v == "demo") c.source = DataSource::demo;
             else if (v == "files") c.source = DataSource::files;
             else throw ConfigError(k + ": expected demo or files, got '" + v + "'");
         }},
        VPLAB_TEXT("data", "prices", prices_path),
        VPLAB_TEXT("data", "market", market_path),
        VPLAB_TEXT("data", "sectors", sectors_path),
        VPLAB_REAL("data", "min_coverage", min_coverage),

        {"demo", "kind", [](const RunConfig& c) { return to_string(c.demo.kind); },
         [](RunConfig& c, const std::string&, const std::string& v) { c.demo.kind = demo_kind_from_string(v); }},
        VPLAB_SIZE("demo", "n_stocks", demo.n_stocks),
        VPLAB_SIZE("demo", "n_days", demo.n_days),
        VPLAB_TEXT("demo", "start", demo.start),
        VPLAB_REAL("demo", "noise_sd", demo.noise_sd),

        VPLAB_REAL("returns", "winsor_lo", pipeline.winsor_lo),
        VPLAB_REAL("returns", "winsor_hi", pipeline.winsor_hi),
        {"returns", "target_proxy", [](const RunConfig& c) { return to_string(c.pipeline.target_proxy); },
         [](RunConfig& c, const std::string&, const std::string& v) { c.pipeline.target_proxy = proxy_from_string(v); }},

        VPLAB_SIZE("memory", "window", pipeline.rolling.window),
        VPLAB_SIZE("memory", "stride", pipeline.rolling.stride),
        VPLAB_REAL("memory", "bandwidth_exponent", pipeline.rolling.bandwidth_exponent),
        {"memory", "hurst_lags", [](const RunConfig& c) { return join(c.pipeline.rolling.hurst_lags); },
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.pipeline.rolling.hurst_lags.clear();
             for (const auto& x : split_list(v)) c.pipeline.rolling.hurst_lags.push_back(parse_integer<std::size_t>(k, x));
         }},
        VPLAB_REAL("memory", "hurst_q", pipeline.rolling.hurst_q),

        VPLAB_SIZE("features", "dynamics_window", pipeline.features.dynamics_window),
        VPLAB_REAL("features", "tau", pipeline.features.tau),
        {"features", "estimator", [](const RunConfig& c) { return to_string(c.pipeline.features.estimator); },
         [](RunConfig& c, const std::string&, const std::string& v) {
             c.pipeline.features.estimator = memory_estimator_from_string(v);
         }},
        VPLAB_SIZE("features", "ret_lookback", pipeline.features.ret_lookback),

        {"ladder", "models", [](const RunConfig& c) { return join(c.models); },
         [](RunConfig& c, const std::string&, const std::string& v) { c.models = split_list(v); }},
        {"ladder", "horizons", [](const RunConfig& c) { return join(c.pipeline.horizons); },
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.pipeline.horizons.clear();
             for (const auto& x : split_list(v)) c.pipeline.horizons.push_back(parse_integer<int>(k, x));
         }},
        VPLAB_REAL("ladder", "warmup_frac", ladder.warmup_frac),
        VPLAB_SIZE("ladder", "d_refit_stride", ladder.d_refit_stride),
        VPLAB_REAL("ladder", "en_alpha", ladder.en_alpha),
        VPLAB_SIZE("ladder", "cv_splits", ladder.cv.splits),
        VPLAB_SIZE("ladder", "cv_grid_points", ladder.cv.grid_points),
        VPLAB_REAL("ladder", "lambda_lo", ladder.cv.lambda_lo),
        VPLAB_REAL("ladder", "lambda_hi", ladder.cv.lambda_hi),
        VPLAB_SIZE("ladder", "n_trees", ladder.trees.n_trees),
        VPLAB_SIZE("ladder", "max_depth", ladder.trees.max_depth),
        VPLAB_SIZE("ladder", "min_leaf", ladder.trees.min_leaf),
        VPLAB_REAL("ladder", "learning_rate", ladder.trees.learning_rate),
        VPLAB_SIZE("ladder", "rounds", ladder.trees.rounds),
        VPLAB_SIZE("ladder", "max_bins", ladder.trees.max_bins),
        VPLAB_BOOL("ladder", "garch_benchmark", garch_benchmark),

        VPLAB_SIZE("figarch", "stocks", figarch_stocks),
        VPLAB_REAL("figarch", "return_scale", figarch_scale),
        VPLAB_SIZE("figarch", "lags", figarch_lags),

        VPLAB_TEXT("evaluate", "benchmark", benchmark),
        VPLAB_SIZE("evaluate", "dm_min_dates", dm_min_dates),
        VPLAB_BOOL("evaluate", "importance", importance),

        VPLAB_REAL("portfolio", "gamma", gamma),
        {"portfolio", "scaling", [](const RunConfig& c) { return std::string(c.scaling == ScalingWindow::full ? "full" : "expanding"); },
         [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v == "full") c.scaling = ScalingWindow::full;
             else if (v == "expanding") c.scaling = ScalingWindow::expanding;
             else throw ConfigError(k + ": expected full or expanding, got '" + v + "'");
         }},
        VPLAB_SIZE("portfolio", "min_regime_periods", min_regime_periods),
    };
    return table;
}

#undef VPLAB_SIZE
#undef VPLAB_REAL
#undef VPLAB_BOOL
#undef VPLAB_TEXT

}  // namespace

void RunConfig::validate() const {
    if (source == DataSource::files && (prices_path.empty() || market_path.empty() || sectors_path.empty())) {
        throw ConfigError("data.source = files needs data.prices, data.market and data.sectors");
    }
    if (!(min_coverage > 0.0 && min_coverage <= 1.0)) throw ConfigError("data.min_coverage must lie in (0, 1]");
    if (demo.n_stocks < 1 || demo.n_days < 30) throw ConfigError("demo.n_stocks must be >= 1 and demo.n_days >= 30");
    if (!(demo.noise_sd >= 0.0)) throw ConfigError("demo.noise_sd must be >= 0");
    Date::parse(demo.start);  // throws on a malformed date
    if (!(pipeline.winsor_lo >= 0.0 && pipeline.winsor_lo < pipeline.winsor_hi && pipeline.winsor_hi <= 1.0)) {
        throw ConfigError("returns.winsor_lo / winsor_hi must satisfy 0 <= lo < hi <= 1");
    }
    const auto& r = pipeline.rolling;
    if (r.window < 64) throw ConfigError("memory.window must be >= 64");
    if (r.stride < 1) throw ConfigError("memory.stride must be >= 1");
    if (!(r.bandwidth_exponent > 0.0 && r.bandwidth_exponent < 1.0)) {
        throw ConfigError("memory.bandwidth_exponent must lie in (0, 1)");
    }
    if (r.hurst_lags.size() < 2) throw ConfigError("memory.hurst_lags needs at least two lags");
    for (std::size_t i = 0; i < r.hurst_lags.size(); ++i) {
        if (r.hurst_lags[i] < 1 || (i > 0 && r.hurst_lags[i] <= r.hurst_lags[i - 1])) {
            throw ConfigError("memory.hurst_lags must be >= 1 and strictly increasing");
        }
    }
    if (r.hurst_lags.back() >= r.window) throw ConfigError("memory.hurst_lags must be shorter than the window");
    if (!(r.hurst_q > 0.0)) throw ConfigError("memory.hurst_q must be > 0");
    if (pipeline.features.dynamics_window < 2) throw ConfigError("features.dynamics_window must be >= 2");
    if (pipeline.features.ret_lookback < 1) throw ConfigError("features.ret_lookback must be >= 1");
    if (pipeline.horizons.empty()) throw ConfigError("ladder.horizons is empty");
    for (int h : pipeline.horizons) {
        if (h < 1) throw ConfigError("ladder.horizons must be >= 1");
    }
    if (models.empty()) throw ConfigError("ladder.models is empty");
    std::set<std::string> seen;
    for (const auto& m : models) {
        model_spec(m, ladder);  // throws on an unknown id
        if (!seen.insert(m).second) throw ConfigError("ladder.models lists '" + m + "' twice");
    }
    try {
        ladder.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("ladder: ") + e.what());
    }
    if (ladder.trees.max_bins < 2 || ladder.trees.max_bins > 256) throw ConfigError("ladder.max_bins must lie in [2, 256]");
    if (figarch_stocks < 1) throw ConfigError("figarch.stocks must be >= 1");
    if (!(figarch_scale > 0.0)) throw ConfigError("figarch.return_scale must be > 0");
    if (figarch_lags < 10) throw ConfigError("figarch.lags must be >= 10");
    if (std::find(kModelIds.begin(), kModelIds.end(), benchmark) == kModelIds.end()) {
        throw ConfigError("evaluate.benchmark '" + benchmark + "' is not a ladder model");
    }
    if (!seen.contains(benchmark)) throw ConfigError("evaluate.benchmark '" + benchmark + "' is not in ladder.models");
    if (dm_min_dates < 3) throw ConfigError("evaluate.dm_min_dates must be >= 3");
    if (!(gamma > 0.0)) throw ConfigError("portfolio.gamma must be > 0");
    if (min_regime_periods < 2) throw ConfigError("portfolio.min_regime_periods must be >= 2");
}

std::string RunConfig::resolved_ini() const {
    std::string out;
    std::string section;
    for (const auto& k : keys()) {
        if (k.section != section) {
            if (!section.empty()) out += '\n';
            section = k.section;
            out += "[" + section + "]\n";
        }
        out += k.name + " = " + k.get(*this) + '\n';
    }
    return out;
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string RunConfig::hash() const { return fnv1a_hex(resolved_ini()); }

RunConfig parse_config(const std::string& text, const std::string& origin) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    RunConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError(origin + ": key '" + section + "' outside any section");
        for (const auto& [name, value] : body) {
            const std::string full = section + "." + name;
            const auto it = std::find_if(keys().begin(), keys().end(),
                                         [&](const Key& k) { return k.section == section && k.name == name; });
            if (it == keys().end()) throw ConfigError(origin + ": unknown key '" + full + "'");
            it->set(cfg, full, trim(value.data()));
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    if (path.empty()) {
        RunConfig cfg;
        cfg.validate();
        return cfg;
    }
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace vplab
