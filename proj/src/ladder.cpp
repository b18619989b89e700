// ladder.cpp

#include "vplab/ladder.hpp"

#include "vplab/condvol.hpp"
#include "vplab/csv.hpp"
#include "vplab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace vplab {

namespace {

const std::vector<std::string> kHarCore{"har_d_log", "har_w_log", "har_m_log", "ret_lag1", "ret_lag1_abs"};

std::vector<std::string> with_core(std::initializer_list<const char*> extra) {
    auto cols = kHarCore;
    for (const char* c : extra) cols.emplace_back(c);
    return cols;
}

/// QR factor of [1, X - shift, y - shift] kept up to date one row at a time by
/// Givens rotations. The trailing block below the intercept row is the factor
/// of the centred design, which is all the solver needs.
class RowUpdatedQR {
public:
    explicit RowUpdatedQR(Eigen::Index p) : p_(p), R_(Eigen::MatrixXd::Zero(p + 2, p + 2)), row_(p + 2) {}

    void add(const double* x, Eigen::Index stride, double y) {
        if (n_ == 0) {
            shift_.resize(p_ + 1);
            for (Eigen::Index j = 0; j < p_; ++j) shift_(j) = x[j * stride];
            shift_(p_) = y;
            mean_ = Eigen::VectorXd::Zero(p_ + 1);
            m2_ = Eigen::VectorXd::Zero(p_ + 1);
        }
        ++n_;
        row_(0) = 1.0;
        for (Eigen::Index j = 0; j < p_; ++j) row_(j + 1) = x[j * stride] - shift_(j);
        row_(p_ + 1) = y - shift_(p_);
        // running moments for the standardizer
        const double nn = static_cast<double>(n_);
        for (Eigen::Index j = 0; j <= p_; ++j) {
            const double v = row_(j + 1);
            const double d = v - mean_(j);
            mean_(j) += d / nn;
            m2_(j) += d * (v - mean_(j));
        }
        const Eigen::Index m = p_ + 2;
        for (Eigen::Index k = 0; k < m; ++k) {
            const double b = row_(k);
            if (b == 0.0) continue;
            const double a = R_(k, k);
            const double r = std::hypot(a, b);
            const double c = a / r, s = b / r;
            R_(k, k) = r;
            row_(k) = 0.0;
            for (Eigen::Index j = k + 1; j < m; ++j) {
                const double rj = R_(k, j), xj = row_(j);
                R_(k, j) = c * rj + s * xj;
                row_(j) = -s * rj + c * xj;
            }
        }
    }

    std::size_t size() const { return n_; }

    FitResult solve() const {
        Standardizer st;
        st.center = mean_.head(p_) + shift_.head(p_);
        st.scale.resize(p_);
        for (Eigen::Index j = 0; j < p_; ++j) {
            const double sd = std::sqrt(m2_(j) / static_cast<double>(n_));
            if (!(sd > 0.0)) {
                st.scale(j) = 1.0;
                st.constant.push_back(static_cast<int>(j));
            } else {
                st.scale(j) = sd;
            }
        }
        const Eigen::MatrixXd Rc = R_.block(1, 1, p_, p_).triangularView<Eigen::Upper>();
        const Eigen::VectorXd z = R_.block(1, p_ + 1, p_, 1);
        return ols_from_factor(Rc, z, st, mean_(p_) + shift_(p_), n_);
    }

private:
    Eigen::Index p_;
    Eigen::MatrixXd R_;
    Eigen::VectorXd row_, shift_, mean_, m2_;
    std::size_t n_ = 0;
};

struct PanelView {
    std::vector<Eigen::Index> cols;
    Eigen::Index ycol = -1;
    std::vector<char> complete;  // predictors and target present

    PanelView(const FeaturePanel& f, const std::vector<std::string>& columns, int h) {
        for (const auto& c : columns) {
            if (!f.has_column(c)) throw ConfigError("feature panel is missing model column '" + c + "'");
            cols.push_back(f.column_index(c));
        }
        const auto tc = target_column(h);
        if (!f.has_column(tc)) throw ConfigError("feature panel is missing target column '" + tc + "'");
        ycol = f.column_index(tc);
        complete.resize(f.n_rows());
        for (std::size_t r = 0; r < f.n_rows(); ++r) complete[r] = predictors_present(f, r) && present(f.values(static_cast<Eigen::Index>(r), ycol));
    }

    bool predictors_present(const FeaturePanel& f, std::size_t r) const {
        for (auto c : cols) {
            if (is_missing(f.values(static_cast<Eigen::Index>(r), c))) return false;
        }
        return true;
    }

    void gather(const FeaturePanel& f, std::size_t r, double* out) const {
        for (std::size_t k = 0; k < cols.size(); ++k) out[k] = f.values(static_cast<Eigen::Index>(r), cols[k]);
    }
};

ForecastSet empty_set(const FeaturePanel& f, const std::string& model, int h, std::size_t first) {
    ForecastSet out;
    out.model = model;
    out.horizon = h;
    out.dates.assign(f.dates.begin() + static_cast<long>(first), f.dates.end());
    out.day_index.assign(f.day_index.begin() + static_cast<long>(first), f.day_index.end());
    out.stocks = f.stocks;
    const auto E = static_cast<Eigen::Index>(out.dates.size()), N = static_cast<Eigen::Index>(f.stocks.size());
    out.y_pred = Grid::Constant(E, N, kMissing);
    out.y_true = out.y_pred;
    out.fit_date.assign(out.dates.size(), 0);
    out.n_train.assign(out.dates.size(), 0);
    out.lambda.assign(out.dates.size(), kMissing);
    return out;
}

}  // namespace

void LadderConfig::validate() const {
    if (!(warmup_frac > 0.0 && warmup_frac < 1.0)) throw ConfigError("warm-up fraction must lie in (0, 1)");
    if (d_refit_stride < 1) throw ConfigError("D refit stride must be >= 1");
    if (!(en_alpha >= 0.0 && en_alpha <= 1.0)) throw ConfigError("elastic-net alpha must lie in [0, 1]");
    if (cv.splits < 1 || cv.grid_points < 2 || !(cv.lambda_lo > 0.0) || !(cv.lambda_hi > cv.lambda_lo)) {
        throw ConfigError("invalid cross-validation settings");
    }
    if (trees.n_trees < 1 || trees.rounds < 1 || trees.max_depth < 1 || trees.min_leaf < 1 ||
        !(trees.learning_rate > 0.0)) {
        throw ConfigError("invalid tree settings");
    }
}

ModelSpec model_spec(const std::string& id, const LadderConfig& cfg) {
    ModelSpec m;
    m.id = id;
    m.alpha = cfg.en_alpha;
    if (id == "A") {
        m.columns = kHarCore;
    } else if (id == "A1") {
        m.columns = with_core({"vix", "move"});
    } else if (id == "A2") {
        m.columns = with_core({"d_gph", "delta_d_gph", "vol_d_gph", "trend_d_gph", "h", "delta_h"});
    } else if (id == "A3") {
        m.columns = with_core({"cs_mean_d", "cs_std_d"});
    } else if (id == "A4") {
        m.columns = with_core({"sector_mean_d"});
    } else if (id == "A5") {
        m.columns = with_core({"d_gph", "vix", "move", "d_x_vix", "d_x_move"});
    } else if (id == "C" || id.rfind("D_", 0) == 0) {
        m.columns = kPredictorColumns;
        if (id != "C") {
            m.refit_stride = cfg.d_refit_stride;
            if (id == "D_lasso") m.kind = EstimatorKind::lasso;
            else if (id == "D_ridge") m.kind = EstimatorKind::ridge;
            else if (id == "D_en") m.kind = EstimatorKind::elastic_net;
            else if (id == "D_rf") m.kind = EstimatorKind::random_forest;
            else if (id == "D_gbm") m.kind = EstimatorKind::gradient_boosting;
            else throw ConfigError("unknown model '" + id + "'");
        }
    } else {
        throw ConfigError("unknown model '" + id + "'");
    }
    return m;
}

bool is_linear_ladder_model(const std::string& id) { return id.rfind("D_", 0) != 0; }

std::size_t ForecastSet::cell_count() const {
    std::size_t n = 0;
    for (Eigen::Index i = 0; i < y_pred.size(); ++i) n += present(y_pred.data()[i]);
    return n;
}

std::size_t warmup_dates(std::size_t n_dates, double warmup_frac) {
    return static_cast<std::size_t>(std::floor(warmup_frac * static_cast<double>(n_dates)));
}

long last_trainable(const std::vector<std::size_t>& day_index, std::size_t s, int h) {
    long best = -1;
    for (std::size_t k = 0; k <= s; ++k) {
        if (day_index[k] + static_cast<std::size_t>(h) <= day_index[s]) best = static_cast<long>(k);
    }
    return best;
}

ForecastSet walk_forward(const FeaturePanel& f, const ModelSpec& model, int h, const LadderConfig& cfg) {
    cfg.validate();
    if (h < 1) throw ConfigError("forecast horizon must be >= 1");
    const std::size_t S = f.dates.size(), N = f.stocks.size();
    const std::size_t first = warmup_dates(S, cfg.warmup_frac);
    if (first < 1 || first >= S) throw ConfigError("warm-up leaves no training or no evaluation dates");
    const PanelView view(f, model.columns, h);
    const auto p = static_cast<Eigen::Index>(model.columns.size());
    ForecastSet out = empty_set(f, model.id, h, first);

    const bool incremental = model.kind == EstimatorKind::ols;
    RowUpdatedQR qr(p);
    std::vector<double> xrow(static_cast<std::size_t>(p));
    long added_through = -1;  // stride dates already in the training set
    std::vector<std::size_t> train_rows;  // date-major order
    FitResult fit;
    std::size_t fit_at = 0;

    for (std::size_t e = 0; e < out.dates.size(); ++e) {
        const std::size_t s = first + e;
        const long L = last_trainable(f.day_index, s, h);
        for (long sp = added_through + 1; sp <= L; ++sp) {
            for (std::size_t i = 0; i < N; ++i) {
                const auto r = f.row(i, static_cast<std::size_t>(sp));
                if (!view.complete[r]) {
                    if (present(f.values(static_cast<Eigen::Index>(r), view.ycol))) ++out.excluded_rows;
                    continue;
                }
                if (incremental) {
                    view.gather(f, r, xrow.data());
                    qr.add(xrow.data(), 1, f.values(static_cast<Eigen::Index>(r), view.ycol));
                } else {
                    train_rows.push_back(r);
                }
            }
        }
        added_through = std::max(added_through, L);

        const bool refit = incremental || e % model.refit_stride == 0;
        if (refit) {
            if (incremental) {
                if (qr.size() < static_cast<std::size_t>(p) + 1) {
                    throw EstimationError("model " + model.id + ": too few training rows at " + f.dates[s].iso());
                }
                fit = qr.solve();
            } else {
                Eigen::MatrixXd X(static_cast<Eigen::Index>(train_rows.size()), p);
                std::vector<double> y(train_rows.size()), t(train_rows.size()), end(train_rows.size());
                for (std::size_t k = 0; k < train_rows.size(); ++k) {
                    const auto r = train_rows[k];
                    for (Eigen::Index j = 0; j < p; ++j) X(static_cast<Eigen::Index>(k), j) = f.values(static_cast<Eigen::Index>(r), view.cols[static_cast<std::size_t>(j)]);
                    y[k] = f.values(static_cast<Eigen::Index>(r), view.ycol);
                    t[k] = static_cast<double>(f.day_index[f.row_date[r]]);
                    end[k] = t[k] + h;
                }
                if (model.kind == EstimatorKind::random_forest || model.kind == EstimatorKind::gradient_boosting) {
                    TreeOptions topt = cfg.trees;
                    topt.seed = cfg.seed * 1000003ULL + s;
                    fit = fit_tree_ensemble(X, y, model.kind, topt);
                } else {
                    const auto cv = cross_validate_lambda(X, y, t, end, model.kind, model.alpha, cfg.cv);
                    fit = fit_shrinkage(X, y, model.kind, cv.lambda, model.alpha, cfg.cv.solver);
                }
            }
            fit_at = s;
        }
        out.fit_date[e] = fit_at;
        out.n_train[e] = fit.n_train;
        out.lambda[e] = fit.lambda;

        const auto ei = static_cast<Eigen::Index>(e);
        parallel_for(N, [&](std::size_t i) {
            const auto r = f.row(i, s);
            if (!view.complete[r]) return;
            double x[64];
            std::vector<double> big;
            double* px = x;
            if (p > 64) {
                big.resize(static_cast<std::size_t>(p));
                px = big.data();
            }
            view.gather(f, r, px);
            out.y_pred(ei, static_cast<Eigen::Index>(i)) = fit.predict_row(px, 1);
            out.y_true(ei, static_cast<Eigen::Index>(i)) = f.values(static_cast<Eigen::Index>(r), view.ycol);
        });
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<ForecastSet> garch_benchmark(const FeaturePanel& f, const ReturnPanel& returns,
                                         const std::vector<int>& horizons, const LadderConfig& cfg) {
    cfg.validate();
    const std::size_t S = f.dates.size(), N = f.stocks.size();
    const std::size_t first = warmup_dates(S, cfg.warmup_frac);
    if (first < 1 || first >= S) throw ConfigError("warm-up leaves no training or no evaluation dates");
    if (returns.stocks != f.stocks) throw ConfigError("return panel is not aligned with the feature panel");
    std::vector<ForecastSet> out;
    std::vector<Eigen::Index> ycols;
    for (int h : horizons) {
        const auto tc = target_column(h);
        if (!f.has_column(tc)) throw ConfigError("feature panel is missing target column '" + tc + "'");
        ycols.push_back(f.column_index(tc));
        out.push_back(empty_set(f, "GARCH", h, first));
    }
    constexpr double kScale = 100.0;  // fit on percent returns

    parallel_for(N, [&](std::size_t i) {
        const auto j = static_cast<Eigen::Index>(i);
        GarchFit fit;
        double h0 = 0.0;
        bool have_fit = false;
        for (std::size_t e = 0; e + first < S; ++e) {
            const std::size_t s = first + e;
            const std::size_t t = f.day_index[s];
            // returns observed by day t: rows 0..t-1
            std::vector<double> r;
            for (std::size_t k = 0; k < t; ++k) {
                const double v = returns.r(static_cast<Eigen::Index>(k), j);
                if (present(v)) r.push_back(kScale * v);
            }
            if (e % cfg.d_refit_stride == 0) {
                if (r.size() >= 250) {
                    fit = fit_garch11(r);
                    h0 = sample_variance(r);
                    have_fit = true;
                }
            }
            if (!have_fit) continue;
            std::vector<double> eps(r);
            for (double& v : eps) v -= fit.mu;
            const auto hp = garch_filter(eps, fit.omega, fit.alpha, fit.beta, h0);
            const double next = fit.omega + fit.alpha * eps.back() * eps.back() + fit.beta * hp.back();
            for (std::size_t k = 0; k < horizons.size(); ++k) {
                const double y = f.values(static_cast<Eigen::Index>(f.row(i, s)), ycols[k]);
                if (is_missing(y)) continue;
                const double v = garch_mean_forecast(fit.omega, fit.alpha, fit.beta, next, horizons[k]);
                out[k].y_pred(static_cast<Eigen::Index>(e), j) = std::log(v / (kScale * kScale));
                out[k].y_true(static_cast<Eigen::Index>(e), j) = y;
            }
        }
    });
    return out;
}

// ---------------------------------------------------------------------------

void write_forecast_set(const ForecastSet& fs, const std::string& path) {
    csv::Writer out(path, {"date", "ticker", "y_true", "y_pred"});
    for (std::size_t e = 0; e < fs.dates.size(); ++e) {
        for (std::size_t i = 0; i < fs.stocks.size(); ++i) {
            const double p = fs.y_pred(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(i));
            if (is_missing(p)) continue;
            out << fs.dates[e].iso() << fs.stocks[i]
                << fs.y_true(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(i)) << p;
            out.end_row();
        }
    }
}

ForecastSet read_forecast_set(const std::string& path, const std::string& model, int horizon,
                              const FeaturePanel& index) {
    csv::Reader in(path, {"date", "ticker", "y_true", "y_pred"});
    std::map<std::string, std::size_t> stock_ix;
    for (std::size_t i = 0; i < index.stocks.size(); ++i) stock_ix[index.stocks[i]] = i;
    std::map<Date, std::size_t> date_ix;
    for (std::size_t s = 0; s < index.dates.size(); ++s) date_ix[index.dates[s]] = s;

    struct Cell {
        std::size_t s, i;
        double y, p;
    };
    std::vector<Cell> cells;
    std::vector<std::string_view> fields;
    std::size_t lo = index.dates.size();
    while (in.next(fields)) {
        Date d;
        try {
            d = Date::parse(fields[0]);
        } catch (const DataError& e) {
            in.fail(e.what());
        }
        const auto dit = date_ix.find(d);
        if (dit == date_ix.end()) in.fail("date " + d.iso() + " is not on the feature panel's stride grid");
        const auto sit = stock_ix.find(std::string(fields[1]));
        if (sit == stock_ix.end()) in.fail("unknown ticker '" + std::string(fields[1]) + "'");
        cells.push_back({dit->second, sit->second, in.number(fields[2]), in.number(fields[3])});
        lo = std::min(lo, dit->second);
    }
    if (cells.empty()) throw DataError("forecast file '" + path + "' has no rows");
    ForecastSet out = empty_set(index, model, horizon, lo);
    for (const auto& c : cells) {
        const auto e = static_cast<Eigen::Index>(c.s - lo), i = static_cast<Eigen::Index>(c.i);
        if (present(out.y_pred(e, i))) throw DataError("duplicate forecast row in '" + path + "'");
        out.y_true(e, i) = c.y;
        out.y_pred(e, i) = c.p;
    }
    return out;
}

}  // namespace vplab
