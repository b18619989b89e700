// runner.cpp

#include "vplab/runner.hpp"

#include "vplab/condvol.hpp"
#include "vplab/csv.hpp"
#include "vplab/eval.hpp"
#include "vplab/plot.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace vplab {

namespace artifact {
std::string forecast(const std::string& model, int horizon) {
    return "forecast/" + model + "_h" + std::to_string(horizon) + ".csv";
}
}  // namespace artifact

namespace header {
const std::vector<std::string> kMemory{"date", "ticker", "d_gph", "se_gph", "d_lw", "se_lw", "hurst", "window", "bandwidth"};
const std::vector<std::string> kFigarch{"ticker", "omega", "d", "phi", "beta", "aic", "bic", "converged"};
const std::vector<std::string> kForecast{"date", "ticker", "y_true", "y_pred"};
const std::vector<std::string> kForecastDiagnostics{"model", "h", "date", "fit_date", "n_train", "lambda"};
const std::vector<std::string> kTable5{"model", "h", "mse", "qlike", "pct_delta", "dm", "p_value"};
const std::vector<std::string> kDmDetail{"model", "h",       "loss",          "T",      "k",
                                         "bandwidth", "mean_d", "dm_plain",   "dm_hln", "p_value",
                                         "nw_fallback", "pooled_cell_dm_illustrative"};
const std::vector<std::string> kSplits{"grouping", "group", "model", "h", "cells",
                                       "loss_benchmark", "loss_model", "improvement_pct"};
const std::vector<std::string> kCumulative{"model", "h", "date", "differential", "cumulative"};
const std::vector<std::string> kTable9{"regime", "portfolio", "ann_ret", "ann_vol", "sharpe", "max_dd", "cer"};
const std::vector<std::string> kPortfolioPaths{"date", "portfolio", "return"};
const std::vector<std::string> kPortfolioNotes{"portfolio", "note"};
const std::vector<std::string> kDbarVix{"date", "cs_mean_d", "vix", "rolling_corr"};
const std::vector<std::string> kSectorHeatmap{"sector", "model", "h", "improvement_pct"};
}  // namespace header

namespace {

constexpr const char* kStageVersion = "1";
constexpr std::size_t kRollingCorrWindow = 52;

const std::vector<Stage> kGraph{Stage::simulate, Stage::estimate, Stage::figarch,  Stage::features,
                                Stage::forecast, Stage::evaluate, Stage::portfolio, Stage::report};

class Context {
public:
    Context(const RunConfig& cfg, const std::string& out) : cfg_(cfg), root_(out) {}

    const RunConfig& cfg() const { return cfg_; }

    std::string path(const std::string& rel) const { return (root_ / rel).string(); }

    /// Path of an upstream artifact; throws MissingArtifact naming `stage`.
    std::string require(const std::string& rel, const std::string& stage) const {
        const auto p = root_ / rel;
        if (!fs::exists(p)) throw MissingArtifact(p.string(), stage);
        return p.string();
    }

    /// Output path, with the parent directory created; recorded for the manifest.
    std::string output(const std::string& rel) {
        const auto p = root_ / rel;
        fs::create_directories(p.parent_path());
        written_.push_back(rel);
        return p.string();
    }

    const std::vector<std::string>& written() const { return written_; }
    void clear_written() { written_.clear(); }

    MarketPanel market() const {
        if (cfg_.source == DataSource::demo) {
            const std::string prices = require(artifact::kPrices, "simulate");
            const std::string market = require(artifact::kMarket, "simulate");
            const std::string sectors = require(artifact::kSectors, "simulate");
            return load_market_panel(prices, market, sectors, cfg_.min_coverage);
        }
        for (const auto* p : {&cfg_.prices_path, &cfg_.market_path, &cfg_.sectors_path}) {
            if (!fs::exists(*p)) throw DataError("input file '" + *p + "' does not exist");
        }
        return load_market_panel(cfg_.prices_path, cfg_.market_path, cfg_.sectors_path, cfg_.min_coverage);
    }

    LadderConfig ladder() const {
        LadderConfig l = cfg_.ladder;
        l.seed = cfg_.seed;
        l.trees.seed = cfg_.seed;
        return l;
    }

private:
    const RunConfig& cfg_;
    fs::path root_;
    std::vector<std::string> written_;
};

void log(const std::string& stage, const std::string& msg) { std::cerr << "[" << stage << "] " << msg << '\n'; }

std::string read_file(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DataError("cannot write '" + p + "'");
    out << text;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Records the stage's artifacts (size and content hash) in manifest.json.
void update_manifest(Context& ctx, Stage stage) {
    const std::string mpath = ctx.path(artifact::kManifest);
    json m = json::object();
    if (fs::exists(mpath)) {
        try {
            m = json::parse(read_file(mpath));
        } catch (const json::exception&) {
            m = json::object();
        }
    }
    const std::string hash = ctx.cfg().hash();
    if (m.contains("config_hash") && m["config_hash"] != hash) {
        log(to_string(stage), "note: earlier stages in this directory ran with config " +
                                  m["config_hash"].get<std::string>() + ", this stage with " + hash);
    }
    m["config_hash"] = hash;
    m["seed"] = ctx.cfg().seed;
    m["config_file"] = artifact::kResolvedConfig;
    json entry = json::object();
    entry["version"] = kStageVersion;
    entry["config_hash"] = hash;
    entry["seed"] = ctx.cfg().seed;
    entry["finished_at"] = utc_now();
    json files = json::array();
    for (const auto& rel : ctx.written()) {
        const std::string body = read_file(ctx.path(rel));
        files.push_back({{"path", rel}, {"bytes", body.size()}, {"fnv1a", fnv1a_hex(body)}});
    }
    entry["artifacts"] = files;
    m["stages"][to_string(stage)] = entry;
    write_text(mpath, m.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// memory panel file

void write_memory(const MemoryPanel& mp, const std::string& path) {
    csv::Writer w(path, header::kMemory);
    for (std::size_t s = 0; s < mp.dates.size(); ++s) {
        const auto e = static_cast<Eigen::Index>(s);
        for (std::size_t i = 0; i < mp.stocks.size(); ++i) {
            const auto j = static_cast<Eigen::Index>(i);
            w << mp.dates[s].iso() << mp.stocks[i] << mp.d_gph(e, j) << mp.se_gph(e, j) << mp.d_lw(e, j)
              << mp.se_lw(e, j) << mp.hurst(e, j) << static_cast<long long>(mp.config.window)
              << static_cast<long long>(mp.bandwidth);
            w.end_row();
        }
    }
}

MemoryPanel read_memory(const std::string& path, const VolPanel& vol, const RollingConfig& cfg) {
    csv::Reader in(path, header::kMemory);
    std::map<Date, std::size_t> day_of;
    for (std::size_t t = 0; t < vol.dates.size(); ++t) day_of[vol.dates[t]] = t;
    std::map<std::string, std::size_t> stock_of;
    for (std::size_t i = 0; i < vol.stocks.size(); ++i) stock_of[vol.stocks[i]] = i;

    MemoryPanel mp;
    mp.stocks = vol.stocks;
    mp.config = cfg;
    struct Cell {
        std::size_t date, stock;
        double v[5];
    };
    std::vector<Cell> cells;
    std::vector<std::string_view> f;
    while (in.next(f)) {
        const Date d = Date::parse(f[0]);
        const auto day = day_of.find(d);
        if (day == day_of.end()) in.fail("date " + std::string(f[0]) + " is not in the market panel; rerun 'estimate'");
        const auto st = stock_of.find(std::string(f[1]));
        if (st == stock_of.end()) in.fail("ticker " + std::string(f[1]) + " is not in the market panel; rerun 'estimate'");
        if (mp.dates.empty() || mp.dates.back() != d) {
            if (!mp.dates.empty() && d < mp.dates.back()) in.fail("dates out of order");
            mp.dates.push_back(d);
            mp.day_index.push_back(day->second);
        }
        const double window = in.number(f[7]);
        if (window != static_cast<double>(cfg.window)) {
            throw ConfigError(path + " was estimated with window " + std::string(f[7]) + " but the config has " +
                              std::to_string(cfg.window) + "; rerun 'estimate'");
        }
        mp.bandwidth = static_cast<std::size_t>(in.number(f[8]));
        Cell c{mp.dates.size() - 1, st->second, {}};
        for (int k = 0; k < 5; ++k) c.v[k] = in.number(f[2 + static_cast<std::size_t>(k)]);
        cells.push_back(c);
    }
    const auto S = static_cast<Eigen::Index>(mp.dates.size()), N = static_cast<Eigen::Index>(mp.stocks.size());
    for (Grid* g : {&mp.d_gph, &mp.se_gph, &mp.d_lw, &mp.se_lw, &mp.hurst}) *g = Grid::Constant(S, N, kMissing);
    for (const auto& c : cells) {
        const auto e = static_cast<Eigen::Index>(c.date), j = static_cast<Eigen::Index>(c.stock);
        mp.d_gph(e, j) = c.v[0];
        mp.se_gph(e, j) = c.v[1];
        mp.d_lw(e, j) = c.v[2];
        mp.se_lw(e, j) = c.v[3];
        mp.hurst(e, j) = c.v[4];
    }
    for (Eigen::Index e = 0; e < S; ++e) {
        for (Eigen::Index j = 0; j < N; ++j) mp.gap_count += is_missing(mp.d_gph(e, j));
    }
    return mp;
}

std::vector<double> series_on(const MarketPanel& market, const std::string& name,
                              const std::vector<std::size_t>& day_index) {
    const auto& s = market.series(name);
    std::vector<double> out;
    out.reserve(day_index.size());
    for (auto t : day_index) out.push_back(t < s.size() ? s[t] : kMissing);
    return out;
}

void check_alignment(const MarketPanel& market, const FeaturePanel& f) {
    if (market.stocks != f.stocks) {
        throw DataError("feature panel tickers differ from the market panel; rerun 'features'");
    }
}

std::vector<std::string> forecast_models(const RunConfig& cfg) {
    std::vector<std::string> m = cfg.models;
    if (cfg.garch_benchmark) m.push_back("GARCH");
    return m;
}

// ---------------------------------------------------------------------------
// stages

void simulate(Context& ctx) {
    if (ctx.cfg().source != DataSource::demo) throw ConfigError("'simulate' needs data.source = demo");
    DemoSpec spec = ctx.cfg().demo;
    spec.seed = ctx.cfg().seed;
    const DemoPanel demo = make_demo_panel(spec);
    const std::string prices = ctx.output(artifact::kPrices);
    const std::string market = ctx.output(artifact::kMarket);
    const std::string sectors = ctx.output(artifact::kSectors);
    write_market_panel(demo.panel, prices, market, sectors);
    log("simulate", to_string(spec.kind) + " panel, " + std::to_string(spec.n_stocks) + " stocks x " +
                        std::to_string(spec.n_days) + " days");
}

void estimate(Context& ctx) {
    const MarketPanel market = ctx.market();
    const VolPanel vol = parkinson_rv(market);
    const MemoryPanel mp = rolling_memory(vol, ctx.cfg().pipeline.rolling);
    write_memory(mp, ctx.output(artifact::kMemory));
    log("estimate", std::to_string(mp.dates.size()) + " stride dates, bandwidth " + std::to_string(mp.bandwidth) +
                        ", " + std::to_string(mp.gap_count) + " gap cells");
}

void figarch(Context& ctx) {
    const RunConfig& cfg = ctx.cfg();
    const MarketPanel market = ctx.market();
    // no winsorization: the likelihood should see the tails
    const ReturnPanel rp = to_log_returns(market, 0.0, 1.0);
    const std::size_t n = std::min(cfg.figarch_stocks, rp.stocks.size());
    std::vector<FigarchFit> fits(n);
    std::vector<std::exception_ptr> errors(n);
    FitOptions opt;
    opt.lags = cfg.figarch_lags;
    parallel_for(n, [&](std::size_t i) {
        std::vector<double> x;
        for (Eigen::Index t = 0; t < rp.r.rows(); ++t) {
            const double v = rp.r(t, static_cast<Eigen::Index>(i));
            if (present(v)) x.push_back(cfg.figarch_scale * v);
        }
        try {
            fits[i] = fit_figarch(x, opt);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i]) continue;
        const std::string who = "FIGARCH fit for " + rp.stocks[i] + ": ";
        try {
            std::rethrow_exception(errors[i]);
        } catch (const ConfigError& e) {
            throw ConfigError(who + e.what());
        } catch (const DataError& e) {
            throw DataError(who + e.what());
        } catch (const EstimationError& e) {
            throw EstimationError(who + e.what());
        }
    }
    csv::Writer w(ctx.output(artifact::kFigarch), header::kFigarch);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& f = fits[i];
        w << rp.stocks[i] << f.omega << f.d << f.phi << f.beta << f.aic << f.bic << (f.converged ? "true" : "false");
        w.end_row();
    }
    log("figarch", std::to_string(n) + " stocks fitted");
}

void features(Context& ctx) {
    const RunConfig& cfg = ctx.cfg();
    const std::string mem_path = ctx.require(artifact::kMemory, "estimate");
    const MarketPanel market = ctx.market();
    const ReturnPanel returns = to_log_returns(market, cfg.pipeline.winsor_lo, cfg.pipeline.winsor_hi);
    const VolPanel vol = parkinson_rv(market);
    const MemoryPanel mp = read_memory(mem_path, vol, cfg.pipeline.rolling);
    const VolPanel target_vol =
        cfg.pipeline.target_proxy == ProxyKind::parkinson ? vol : squared_return_rv(market, returns);
    std::vector<TargetPanel> targets;
    for (int h : cfg.pipeline.horizons) targets.push_back(forecast_target(target_vol, h, cfg.pipeline.target_proxy));
    const FeaturePanel f = assemble_features(market, vol, returns, mp, targets, cfg.pipeline.features);
    write_feature_panel(f, ctx.output(artifact::kFeatures));
    log("features", std::to_string(f.n_rows()) + " rows x " + std::to_string(f.names.size()) + " columns");
}

void forecast(Context& ctx) {
    const RunConfig& cfg = ctx.cfg();
    const FeaturePanel f = read_feature_panel(ctx.require(artifact::kFeatures, "features"));
    const LadderConfig lc = ctx.ladder();
    std::vector<ForecastSet> sets;
    for (int h : cfg.pipeline.horizons) {
        for (const auto& m : cfg.models) {
            const auto t0 = std::chrono::steady_clock::now();
            sets.push_back(walk_forward(f, model_spec(m, lc), h, lc));
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::ostringstream msg;
            msg << m << " h=" << h << ": " << sets.back().cell_count() << " forecasts (" << secs << " s)";
            log("forecast", msg.str());
        }
    }
    if (cfg.garch_benchmark) {
        const MarketPanel market = ctx.market();
        check_alignment(market, f);
        const ReturnPanel returns = to_log_returns(market, cfg.pipeline.winsor_lo, cfg.pipeline.winsor_hi);
        for (auto& g : garch_benchmark(f, returns, cfg.pipeline.horizons, lc)) sets.push_back(std::move(g));
        log("forecast", "GARCH benchmark done");
    }
    csv::Writer diag(ctx.output(artifact::kForecastDiagnostics), header::kForecastDiagnostics);
    for (const auto& s : sets) {
        write_forecast_set(s, ctx.output(artifact::forecast(s.model, s.horizon)));
        for (std::size_t e = 0; e < s.dates.size(); ++e) {
            diag << s.model << static_cast<long long>(s.horizon) << s.dates[e].iso()
                 << (e < s.fit_date.size() ? f.dates[s.fit_date[e]].iso() : std::string())
                 << (e < s.n_train.size() ? static_cast<double>(s.n_train[e]) : kMissing)
                 << (e < s.lambda.size() ? s.lambda[e] : kMissing);
            diag.end_row();
        }
    }
}

struct LoadedForecasts {
    FeaturePanel index;
    std::map<std::pair<std::string, int>, ForecastSet> sets;
};

LoadedForecasts load_forecasts(const Context& ctx, const std::vector<std::string>& models,
                               const std::vector<int>& horizons) {
    LoadedForecasts out;
    out.index = read_feature_panel(ctx.require(artifact::kFeatures, "features"));
    for (int h : horizons) {
        for (const auto& m : models) {
            const std::string p = ctx.require(artifact::forecast(m, h), "forecast");
            out.sets.emplace(std::make_pair(m, h), read_forecast_set(p, m, h, out.index));
        }
    }
    return out;
}

json metrics_json(const DMResult& r) {
    return {{"dm_hln", r.statistic},          {"dm_plain", r.plain},
            {"p_value", r.p_value},            {"pooled_cell_dm_illustrative", r.pooled_cell_statistic},
            {"mean_d", r.mean_differential},   {"T", r.T},
            {"k", r.k},                        {"bandwidth", r.bandwidth},
            {"nw_fallback", r.nw_fallback}};
}

void evaluate(Context& ctx) {
    const RunConfig& cfg = ctx.cfg();
    const auto models = forecast_models(cfg);
    const LoadedForecasts lf = load_forecasts(ctx, models, cfg.pipeline.horizons);
    const MarketPanel market = ctx.market();
    check_alignment(market, lf.index);

    std::map<std::pair<std::string, int>, LossPanel> mse, qlike;
    for (const auto& [key, fs] : lf.sets) {
        mse.emplace(key, compute_losses(fs, LossKind::mse_log));
        qlike.emplace(key, compute_losses(fs, LossKind::qlike));
    }

    json report = json::object();
    report["config_hash"] = cfg.hash();
    report["seed"] = cfg.seed;
    report["config"] = cfg.resolved_ini();
    report["benchmark"] = cfg.benchmark;
    report["conventions"] = {
        {"mse", "mean of (y - yhat)^2 with y, yhat log variances"},
        {"qlike", "yhat + exp(y - yhat) on log variances; smaller is better"},
        {"dm", "positive = challenger beats the benchmark; panel-aware, Newey-West bandwidth ceil(h/5)-1, HLN factor, t(T-1)"},
        {"pooled_cell_dm_illustrative", "treats every (date, stock) cell as independent; for illustration only"},
        {"pct_delta", "100 (L_benchmark - L_model) / L_benchmark on MSE"},
        {"tree_defaults", "n_trees=" + std::to_string(cfg.ladder.trees.n_trees) +
                              " max_depth=" + std::to_string(cfg.ladder.trees.max_depth) +
                              " min_leaf=" + std::to_string(cfg.ladder.trees.min_leaf) +
                              " rounds=" + std::to_string(cfg.ladder.trees.rounds)}};

    // table5.csv and the DM detail
    csv::Writer t5(ctx.output(artifact::kTable5), header::kTable5);
    csv::Writer dd(ctx.output(artifact::kDmDetail), header::kDmDetail);
    json rows = json::array();
    for (int h : cfg.pipeline.horizons) {
        const auto& bm = mse.at({cfg.benchmark, h});
        const auto& bq = qlike.at({cfg.benchmark, h});
        for (const auto& m : models) {
            const auto& lm = mse.at({m, h});
            const auto& lq = qlike.at({m, h});
            const bool is_bench = m == cfg.benchmark;
            DMResult dm_m, dm_q;
            if (!is_bench) {
                dm_m = dm_hln(bm, lm, h, cfg.dm_min_dates);
                dm_q = dm_hln(bq, lq, h, cfg.dm_min_dates);
            }
            const double pct = is_bench ? 0.0 : 100.0 * (bm.pooled_mean() - lm.pooled_mean()) / bm.pooled_mean();
            t5 << m << static_cast<long long>(h) << lm.pooled_mean() << lq.pooled_mean() << pct
               << (is_bench ? kMissing : dm_m.statistic) << (is_bench ? kMissing : dm_m.p_value);
            t5.end_row();
            json row = {{"model", m}, {"h", h}, {"cells", lm.cell_count()}, {"mse", lm.pooled_mean()},
                        {"qlike", lq.pooled_mean()}, {"pct_delta", pct}};
            if (!is_bench) {
                for (const auto& [name, r] : {std::pair<std::string, const DMResult&>{"mse", dm_m}, {"qlike", dm_q}}) {
                    dd << m << static_cast<long long>(h) << name << static_cast<long long>(r.T)
                       << static_cast<long long>(r.k) << static_cast<long long>(r.bandwidth) << r.mean_differential
                       << r.plain << r.statistic << r.p_value << (r.nw_fallback ? "true" : "false")
                       << r.pooled_cell_statistic;
                    dd.end_row();
                }
                row["dm_mse"] = metrics_json(dm_m);
                row["dm_qlike"] = metrics_json(dm_q);
            }
            rows.push_back(row);
        }
    }
    report["table5"] = rows;

    // table7.csv: pooled lasso importance
    if (cfg.importance) {
        const std::size_t first = warmup_dates(lf.index.dates.size(), cfg.ladder.warmup_frac);
        std::vector<ImportanceResult> imp;
        std::vector<std::string> head{"column"};
        for (int h : cfg.pipeline.horizons) {
            CvOptions cv = cfg.ladder.cv;
            cv.rule = CvRule::one_se;
            imp.push_back(pooled_importance(lf.index, h, first, kPredictorColumns, cv));
            head.push_back("h" + std::to_string(h));
        }
        csv::Writer t7(ctx.output(artifact::kTable7), head);
        for (std::size_t c = 0; c < kPredictorColumns.size(); ++c) {
            t7 << kPredictorColumns[c];
            for (const auto& r : imp) t7 << r.coefficients[c];
            t7.end_row();
        }
        json ij = json::array();
        for (std::size_t k = 0; k < imp.size(); ++k) {
            ij.push_back({{"h", cfg.pipeline.horizons[k]}, {"lambda", imp[k].lambda}, {"rows", imp[k].n_rows}});
        }
        report["importance"] = ij;
    }

    // table8.csv (regime and liquidity splits) and sector splits
    const auto& dates = lf.sets.begin()->second.dates;
    const auto& day_index = lf.sets.begin()->second.day_index;
    const std::vector<double> vix = series_on(market, "VIX", day_index);
    const std::vector<double> liq = liquidity_measure(market);
    const std::vector<CellGrouping> regime_groups{vix_quartile_grouping(vix), crisis_grouping(dates),
                                                  liquidity_grouping(liquidity_halves(liq))};
    const CellGrouping sectors = sector_grouping(lf.index.stock_sector);
    csv::Writer t8(ctx.output(artifact::kTable8), header::kSplits);
    csv::Writer ts(ctx.output(artifact::kSectorSplits), header::kSplits);
    json omitted = json::array();
    auto emit = [&](csv::Writer& w, const std::vector<SplitRow>& rs) {
        for (const auto& r : rs) {
            w << r.grouping << r.group << r.model << static_cast<long long>(r.horizon)
              << static_cast<long long>(r.cells) << r.loss_benchmark << r.loss_model << r.improvement_pct;
            w.end_row();
        }
    };
    for (int h : cfg.pipeline.horizons) {
        for (const auto& m : models) {
            if (m == cfg.benchmark) continue;
            const auto& a = mse.at({cfg.benchmark, h});
            const auto& b = mse.at({m, h});
            for (const auto& g : regime_groups) {
                std::vector<std::string> om;
                emit(t8, split_report(a, b, g, &om));
                for (const auto& o : om) omitted.push_back({{"grouping", g.name}, {"group", o}, {"model", m}, {"h", h}});
            }
            std::vector<std::string> om;
            emit(ts, split_report(a, b, sectors, &om));
            for (const auto& o : om) omitted.push_back({{"grouping", sectors.name}, {"group", o}, {"model", m}, {"h", h}});
        }
    }
    report["omitted_groups"] = omitted;

    // cumulative loss differentials
    csv::Writer cw(ctx.output(artifact::kCumulative), header::kCumulative);
    for (int h : cfg.pipeline.horizons) {
        for (const auto& m : models) {
            if (m == cfg.benchmark) continue;
            const auto cd = cumulative_loss_differential(mse.at({cfg.benchmark, h}), mse.at({m, h}));
            for (std::size_t e = 0; e < cd.dates.size(); ++e) {
                cw << m << static_cast<long long>(h) << cd.dates[e].iso() << cd.differential[e] << cd.cumulative[e];
                cw.end_row();
            }
        }
    }
    write_text(ctx.output(artifact::kReportJson), report.dump(2) + "\n");
    log("evaluate", std::to_string(models.size()) + " models x " + std::to_string(cfg.pipeline.horizons.size()) +
                        " horizons evaluated against " + cfg.benchmark);
}

void portfolio(Context& ctx) {
    const RunConfig& cfg = ctx.cfg();
    if (std::find(cfg.pipeline.horizons.begin(), cfg.pipeline.horizons.end(), 5) == cfg.pipeline.horizons.end()) {
        throw ConfigError("'portfolio' needs 5 in ladder.horizons");
    }
    const auto models = forecast_models(cfg);
    const LoadedForecasts lf = load_forecasts(ctx, models, {5});
    const MarketPanel market = ctx.market();
    check_alignment(market, lf.index);
    // realized returns are not winsorized
    const ReturnPanel returns = to_log_returns(market, 0.0, 1.0);
    const ForecastSet& first = lf.sets.at({models.front(), 5});
    const std::vector<double> vix = series_on(market, "VIX", first.day_index);

    std::vector<std::pair<std::string, std::vector<double>>> paths;
    paths.emplace_back("Unmanaged", unmanaged_path(returns, first.day_index));
    csv::Writer notes(ctx.output(artifact::kPortfolioNotes), header::kPortfolioNotes);
    for (const auto& m : models) {
        const ManagedPanel mp = managed_returns(lf.sets.at({m, 5}), returns, cfg.scaling);
        paths.emplace_back("Managed " + m, equal_weight(mp.managed));
        for (const auto& n : mp.notes) {
            notes << "Managed " + m << n;
            notes.end_row();
        }
    }
    std::vector<PortfolioRow> rows;
    for (const auto& [name, path] : paths) {
        for (auto& r : regime_table(name, first.dates, path, vix, cfg.gamma, cfg.min_regime_periods)) {
            rows.push_back(std::move(r));
        }
    }
    // regime-major order, portfolios in ladder order within a regime
    std::stable_sort(rows.begin(), rows.end(), [](const PortfolioRow& a, const PortfolioRow& b) {
        static const std::vector<std::string> order{"Full sample", "Low VIX (Q1)", "High VIX (Q4)", "COVID 2020"};
        const auto ia = std::find(order.begin(), order.end(), a.regime) - order.begin();
        const auto ib = std::find(order.begin(), order.end(), b.regime) - order.begin();
        return ia < ib;
    });
    csv::Writer t9(ctx.output(artifact::kTable9), header::kTable9);
    for (const auto& r : rows) {
        const auto& x = r.metrics;
        t9 << r.regime << r.portfolio << x.ann_return << x.ann_vol << x.sharpe << x.max_drawdown << x.cer;
        t9.end_row();
    }
    csv::Writer pw(ctx.output(artifact::kPortfolioPaths), header::kPortfolioPaths);
    for (const auto& [name, path] : paths) {
        for (std::size_t e = 0; e < path.size(); ++e) {
            pw << first.dates[e].iso() << name << path[e];
            pw.end_row();
        }
    }
    log("portfolio", std::to_string(paths.size()) + " portfolios, " + std::to_string(rows.size()) + " table rows");
}

double correlation(std::span<const double> a, std::span<const double> b) {
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(a.size());
    mb /= static_cast<double>(b.size());
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return saa > 0 && sbb > 0 ? sab / std::sqrt(saa * sbb) : kMissing;
}

void report(Context& ctx) {
    const RunConfig& cfg = ctx.cfg();
    const std::string cum_path = ctx.require(artifact::kCumulative, "evaluate");
    const std::string sec_path = ctx.require(artifact::kSectorSplits, "evaluate");
    const std::string mem_path = ctx.require(artifact::kMemory, "estimate");
    const MarketPanel market = ctx.market();
    const int h_plot = std::find(cfg.pipeline.horizons.begin(), cfg.pipeline.horizons.end(), 5) !=
                               cfg.pipeline.horizons.end()
                           ? 5
                           : cfg.pipeline.horizons.front();

    // cumulative differential per horizon
    {
        std::map<int, std::vector<plot::Series>> by_h;
        std::map<int, std::vector<std::string>> labels;
        csv::Reader in(cum_path, header::kCumulative);
        std::vector<std::string_view> f;
        while (in.next(f)) {
            const int h = static_cast<int>(in.number(f[1]));
            auto& series = by_h[h];
            if (series.empty() || series.back().name != f[0]) {
                series.push_back({std::string(f[0]), {}});
                if (series.size() == 1) labels[h].clear();
            }
            series.back().y.push_back(in.number(f[4]));
            if (series.size() == 1) labels[h].emplace_back(f[2]);
        }
        for (const auto& [h, series] : by_h) {
            plot::write_file(ctx.output("report/cumulative_differential_h" + std::to_string(h) + ".svg"),
                             plot::line_chart("Cumulative MSE differential vs " + cfg.benchmark + ", h = " +
                                                  std::to_string(h) + " (positive = model better)",
                                              labels[h], series));
        }
    }

    // cross-sectional mean persistence against VIX
    {
        const VolPanel vol = parkinson_rv(market);
        const MemoryPanel mp = read_memory(mem_path, vol, cfg.pipeline.rolling);
        const Grid& d = mp.d(cfg.pipeline.features.estimator);
        const std::vector<double> vix = series_on(market, "VIX", mp.day_index);
        std::vector<double> dbar(mp.dates.size(), kMissing), corr(mp.dates.size(), kMissing);
        for (std::size_t s = 0; s < mp.dates.size(); ++s) {
            double sum = 0;
            std::size_t n = 0;
            for (Eigen::Index j = 0; j < d.cols(); ++j) {
                const double v = d(static_cast<Eigen::Index>(s), j);
                if (present(v)) {
                    sum += v;
                    ++n;
                }
            }
            if (n > 0) dbar[s] = sum / static_cast<double>(n);
        }
        for (std::size_t s = kRollingCorrWindow - 1; s < mp.dates.size(); ++s) {
            std::vector<double> a, b;
            for (std::size_t k = s + 1 - kRollingCorrWindow; k <= s; ++k) {
                if (present(dbar[k]) && present(vix[k])) {
                    a.push_back(dbar[k]);
                    b.push_back(vix[k]);
                }
            }
            if (a.size() >= kRollingCorrWindow / 2) corr[s] = correlation(a, b);
        }
        csv::Writer w(ctx.output(artifact::kDbarVix), header::kDbarVix);
        std::vector<std::string> labels;
        for (std::size_t s = 0; s < mp.dates.size(); ++s) {
            w << mp.dates[s].iso() << dbar[s] << vix[s] << corr[s];
            w.end_row();
            labels.push_back(mp.dates[s].iso());
        }
        plot::write_file(ctx.output("report/dbar_vix.svg"),
                         plot::line_chart("Cross-sectional mean memory estimate and VIX", labels,
                                          {{"mean d", dbar}}, {{"VIX", vix}}));
    }

    // sector heatmap data
    {
        csv::Reader in(sec_path, header::kSplits);
        csv::Writer w(ctx.output(artifact::kSectorHeatmap), header::kSectorHeatmap);
        std::vector<std::string> sectors, models;
        std::map<std::pair<std::string, std::string>, double> cell;
        std::vector<std::string_view> f;
        while (in.next(f)) {
            const std::string sector(f[1]), model(f[2]);
            const int h = static_cast<int>(in.number(f[3]));
            const double imp = in.number(f[7]);
            w << sector << model << static_cast<long long>(h) << imp;
            w.end_row();
            if (h != h_plot) continue;
            if (std::find(sectors.begin(), sectors.end(), sector) == sectors.end()) sectors.push_back(sector);
            if (std::find(models.begin(), models.end(), model) == models.end()) models.push_back(model);
            cell[{sector, model}] = imp;
        }
        std::sort(sectors.begin(), sectors.end());
        std::vector<std::vector<double>> values(sectors.size(), std::vector<double>(models.size(), kMissing));
        for (std::size_t i = 0; i < sectors.size(); ++i) {
            for (std::size_t j = 0; j < models.size(); ++j) {
                const auto it = cell.find({sectors[i], models[j]});
                if (it != cell.end()) values[i][j] = it->second;
            }
        }
        plot::write_file(ctx.output("report/sector_heatmap.svg"),
                         plot::heatmap("MSE improvement vs " + cfg.benchmark + " by sector (%), h = " +
                                           std::to_string(h_plot),
                                       sectors, models, values));
    }
    log("report", "plots written");
}

void run_one(Stage stage, Context& ctx) {
    ctx.clear_written();
    try {
        switch (stage) {
            case Stage::simulate: simulate(ctx); break;
            case Stage::estimate: estimate(ctx); break;
            case Stage::figarch: figarch(ctx); break;
            case Stage::features: features(ctx); break;
            case Stage::forecast: forecast(ctx); break;
            case Stage::evaluate: evaluate(ctx); break;
            case Stage::portfolio: portfolio(ctx); break;
            case Stage::report: report(ctx); break;
            case Stage::all: throw InternalError("run_one(all)");
        }
    } catch (const MissingArtifact&) {
        throw;
    } catch (const ParseError&) {
        throw;
    } catch (const ConfigError& e) {
        throw ConfigError(to_string(stage) + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(to_string(stage) + ": " + e.what());
    } catch (const EstimationError& e) {
        throw EstimationError(to_string(stage) + ": " + e.what());
    }
    update_manifest(ctx, stage);
}

}  // namespace

std::string to_string(Stage s) {
    switch (s) {
        case Stage::simulate: return "simulate";
        case Stage::estimate: return "estimate";
        case Stage::figarch: return "figarch";
        case Stage::features: return "features";
        case Stage::forecast: return "forecast";
        case Stage::evaluate: return "evaluate";
        case Stage::portfolio: return "portfolio";
        case Stage::report: return "report";
        case Stage::all: return "all";
    }
    return "?";
}

Stage stage_from_string(const std::string& s) {
    for (Stage st : kGraph) {
        if (to_string(st) == s) return st;
    }
    if (s == "all") return Stage::all;
    throw ConfigError("unknown stage '" + s + "'");
}

void run_stage(Stage stage, const RunConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    fs::create_directories(out_dir);
    Context ctx(cfg, out_dir);
    write_text(ctx.path(artifact::kResolvedConfig), cfg.resolved_ini());
    if (stage != Stage::all) {
        run_one(stage, ctx);
        return;
    }
    for (Stage s : kGraph) {
        if (s == Stage::simulate && cfg.source != DataSource::demo) continue;
        run_one(s, ctx);
    }
}

}  // namespace vplab
