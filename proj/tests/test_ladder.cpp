// test_ladder.cpp

#include "doctest.h"

#include "vplab/demo.hpp"
#include "vplab/ladder.hpp"
#include "vplab/pipeline.hpp"
#include "vplab/rng.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <set>

using namespace vplab;

namespace {

struct Fixture {
    PipelineData data;
};

const Fixture& fixture() {
    static const Fixture fx = [] {
        DemoSpec spec;
        spec.n_stocks = 8;
        spec.n_days = 900;
        spec.seed = 21;
        PipelineConfig cfg;
        cfg.rolling.window = 250;
        return Fixture{build_pipeline(make_demo_panel(spec).panel, cfg)};
    }();
    return fx;
}

LadderConfig quick_config() {
    LadderConfig cfg;
    cfg.trees.n_trees = 15;
    cfg.trees.rounds = 15;
    cfg.cv.grid_points = 12;
    cfg.d_refit_stride = 10;
    return cfg;
}

bool identical(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

/// Rows a fit at stride date s may use for horizon h, in date-major order.
std::vector<std::size_t> eligible_rows(const FeaturePanel& f, const ModelSpec& m, int h, std::size_t s) {
    std::vector<std::size_t> rows;
    for (std::size_t sp = 0; sp <= s; ++sp) {
        if (f.day_index[sp] + static_cast<std::size_t>(h) > f.day_index[s]) continue;
        for (std::size_t i = 0; i < f.stocks.size(); ++i) {
            const auto r = f.row(i, sp);
            bool ok = present(f.col(target_column(h))(static_cast<Eigen::Index>(r)));
            for (const auto& c : m.columns) ok = ok && present(f.col(c)(static_cast<Eigen::Index>(r)));
            if (ok) rows.push_back(r);
        }
    }
    return rows;
}

Eigen::MatrixXd design(const FeaturePanel& f, const std::vector<std::string>& cols, const std::vector<std::size_t>& rows) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            X(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = f.col(cols[j])(static_cast<Eigen::Index>(rows[k]));
        }
    }
    return X;
}

}  // namespace

TEST_CASE("ladder column lists") {
    CHECK(model_spec("A").columns ==
          std::vector<std::string>{"har_d_log", "har_w_log", "har_m_log", "ret_lag1", "ret_lag1_abs"});
    CHECK(model_spec("A1").columns.size() == 7);
    CHECK(model_spec("A2").columns.size() == 11);
    CHECK(model_spec("A3").columns.size() == 7);
    CHECK(model_spec("A4").columns.back() == "sector_mean_d");
    CHECK(model_spec("A5").columns.size() == 10);
    CHECK(model_spec("C").columns == kPredictorColumns);
    // C is the union of the A family
    std::set<std::string> uni;
    for (const char* id : {"A", "A1", "A2", "A3", "A4", "A5"}) {
        for (const auto& c : model_spec(id).columns) uni.insert(c);
    }
    CHECK(uni == std::set<std::string>(kPredictorColumns.begin(), kPredictorColumns.end()));
    LadderConfig cfg;
    cfg.d_refit_stride = 7;
    const auto d = model_spec("D_en", cfg);
    CHECK(d.kind == EstimatorKind::elastic_net);
    CHECK(d.refit_stride == 7);
    CHECK(d.columns == kPredictorColumns);
    CHECK(model_spec("D_gbm").kind == EstimatorKind::gradient_boosting);
    CHECK(model_spec("A").refit_stride == 1);
    CHECK_THROWS_AS(model_spec("B"), ConfigError);
}

TEST_CASE("training eligibility by horizon") {
    std::vector<std::size_t> day{749, 754, 759, 764, 769, 774, 779, 784, 789, 794, 799};
    CHECK(last_trainable(day, 3, 1) == 2);
    CHECK(last_trainable(day, 3, 5) == 2);
    CHECK(last_trainable(day, 10, 22) == 5);
    CHECK(last_trainable(day, 2, 22) == -1);
    CHECK(warmup_dates(100, 0.4) == 40);
    CHECK(warmup_dates(7, 0.4) == 2);
}

TEST_CASE("linear walk-forward equals cold refits") {
    const auto& f = fixture().data.features;
    const auto cfg = quick_config();
    for (int h : {1, 5, 22}) {
        for (const char* id : {"A", "C"}) {
            const auto m = model_spec(id, cfg);
            const auto fs = walk_forward(f, m, h, cfg);
            const std::size_t first = warmup_dates(f.dates.size(), cfg.warmup_frac);
            REQUIRE(fs.dates.size() == f.dates.size() - first);
            CHECK(fs.dates.front() > f.dates[first - 1]);
            for (std::size_t e : {std::size_t{0}, fs.dates.size() / 2, fs.dates.size() - 1}) {
                const std::size_t s = first + e;
                CHECK(fs.fit_date[e] == s);
                const auto rows = eligible_rows(f, m, h, s);
                CHECK(fs.n_train[e] == rows.size());
                // target-overlap audit: every training target ends by the fit date
                for (auto r : rows) CHECK(f.day_index[f.row_date[r]] + static_cast<std::size_t>(h) <= f.day_index[s]);
                std::vector<double> y;
                for (auto r : rows) y.push_back(f.col(target_column(h))(static_cast<Eigen::Index>(r)));
                const auto cold = fit_ols(design(f, m.columns, rows), y);
                for (std::size_t i = 0; i < f.stocks.size(); ++i) {
                    const double p = fs.y_pred(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(i));
                    if (is_missing(p)) continue;
                    const auto X = design(f, m.columns, {f.row(i, s)});
                    const double q = cold.predict_row(X.data(), 1);
                    CHECK(std::abs(p - q) <= 1e-10 * std::max(1.0, std::abs(q)));
                }
            }
            // forecasts exist exactly where the realized target does
            for (Eigen::Index k = 0; k < fs.y_pred.size(); ++k) CHECK(present(fs.y_pred.data()[k]) == present(fs.y_true.data()[k]));
            CHECK(fs.cell_count() > fs.dates.size() * f.stocks.size() / 2);
        }
    }
}

TEST_CASE("nesting: C fits the training window at least as well as A") {
    const auto& f = fixture().data.features;
    const auto a = model_spec("A"), c = model_spec("C");
    const std::size_t s = f.dates.size() / 2;
    // common rows: complete for C implies complete for A
    const auto rows = eligible_rows(f, c, 5, s);
    std::vector<double> y;
    for (auto r : rows) y.push_back(f.col("y_h5")(static_cast<Eigen::Index>(r)));
    const auto Xa = design(f, a.columns, rows), Xc = design(f, c.columns, rows);
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    const double mse_a = (fit_ols(Xa, y).predict(Xa) - yv).squaredNorm();
    const double mse_c = (fit_ols(Xc, y).predict(Xc) - yv).squaredNorm();
    CHECK(mse_c <= mse_a);
}

TEST_CASE("walk-forward never looks ahead") {
    const auto& base = fixture().data.features;
    const auto cfg = quick_config();
    const std::size_t cut = base.dates.size() * 3 / 4;
    FeaturePanel mutated = base;
    Philox rng(5);
    for (std::size_t r = 0; r < mutated.n_rows(); ++r) {
        if (mutated.row_date[r] <= cut) continue;
        for (Eigen::Index c = 0; c < mutated.values.cols(); ++c) {
            double& v = mutated.values(static_cast<Eigen::Index>(r), c);
            if (present(v)) v += 3.0 * rng.normal();
        }
    }
    for (const char* id : {"A2", "D_lasso", "D_rf", "D_gbm"}) {
        const auto m = model_spec(id, cfg);
        const auto a = walk_forward(base, m, 5, cfg);
        const auto b = walk_forward(mutated, m, 5, cfg);
        const std::size_t first = warmup_dates(base.dates.size(), cfg.warmup_frac);
        std::size_t checked = 0;
        bool later_differs = false;
        for (std::size_t e = 0; e < a.dates.size(); ++e) {
            for (Eigen::Index i = 0; i < a.y_pred.cols(); ++i) {
                const auto ei = static_cast<Eigen::Index>(e);
                if (first + e <= cut) {
                    CHECK(identical(a.y_pred(ei, i), b.y_pred(ei, i)));
                    ++checked;
                } else if (!identical(a.y_pred(ei, i), b.y_pred(ei, i))) {
                    later_differs = true;
                }
            }
        }
        INFO(id);
        CHECK(checked > 0);
        CHECK(later_differs);
    }
}

TEST_CASE("D models refit on schedule and are thread-count invariant") {
    const auto& f = fixture().data.features;
    const auto cfg = quick_config();
    const auto before = thread_count();
    for (const char* id : {"D_ridge", "D_en", "D_rf"}) {
        const auto m = model_spec(id, cfg);
        set_thread_count(1);
        const auto a = walk_forward(f, m, 1, cfg);
        set_thread_count(3);
        const auto b = walk_forward(f, m, 1, cfg);
        CHECK(std::memcmp(a.y_pred.data(), b.y_pred.data(), sizeof(double) * static_cast<std::size_t>(a.y_pred.size())) == 0);
        const std::size_t first = warmup_dates(f.dates.size(), cfg.warmup_frac);
        for (std::size_t e = 0; e < a.dates.size(); ++e) CHECK(a.fit_date[e] == first + e - e % cfg.d_refit_stride);
        if (m.kind != EstimatorKind::random_forest) CHECK(present(a.lambda.front()));
    }
    set_thread_count(before);
}

TEST_CASE("walk-forward configuration errors") {
    auto f = fixture().data.features;
    ModelSpec m = model_spec("A");
    m.columns.push_back("no_such_column");
    try {
        walk_forward(f, m, 5);
        FAIL("expected a configuration error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("no_such_column") != std::string::npos);
    }
    CHECK_THROWS_AS(walk_forward(f, model_spec("A"), 3), ConfigError);
    LadderConfig bad;
    bad.warmup_frac = 1.0;
    CHECK_THROWS_AS(walk_forward(f, model_spec("A"), 5, bad), ConfigError);
}

TEST_CASE("GARCH benchmark and forecast files") {
    const auto& fx = fixture();
    const auto& f = fx.data.features;
    const auto sets = garch_benchmark(f, fx.data.returns, {1, 22});
    REQUIRE(sets.size() == 2);
    double sxy = 0, sxx = 0, syy = 0, mx = 0, my = 0;
    std::vector<std::pair<double, double>> pairs;
    for (Eigen::Index k = 0; k < sets[1].y_pred.size(); ++k) {
        const double p = sets[1].y_pred.data()[k], y = sets[1].y_true.data()[k];
        CHECK(present(p) == present(y));
        if (present(p)) pairs.emplace_back(p, y);
    }
    REQUIRE(pairs.size() > 100);
    for (auto [p, y] : pairs) {
        mx += p / static_cast<double>(pairs.size());
        my += y / static_cast<double>(pairs.size());
    }
    for (auto [p, y] : pairs) {
        sxy += (p - mx) * (y - my);
        sxx += (p - mx) * (p - mx);
        syy += (y - my) * (y - my);
    }
    CHECK(sxy / std::sqrt(sxx * syy) > 0.2);

    const auto a = walk_forward(f, model_spec("A"), 5);
    const auto path = std::filesystem::temp_directory_path() / "vplab_forecast_rt.csv";
    write_forecast_set(a, path.string());
    const auto back = read_forecast_set(path.string(), "A", 5, f);
    std::filesystem::remove(path);
    REQUIRE(back.dates == a.dates);
    CHECK(std::memcmp(back.y_pred.data(), a.y_pred.data(), sizeof(double) * static_cast<std::size_t>(a.y_pred.size())) == 0);
}
