// ingest.hpp
// Loading, validating and transforming raw OHLCV / market / sector files into
// aligned date x stock panels: log returns, Parkinson variance, forecast
// targets and the static liquidity measure.

#pragma once

#include "vplab/core.hpp"

#include <Eigen/Dense>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace vplab {

/// Dates x stocks matrix; NaN marks a missing cell. Column-major, so each
/// stock's history is contiguous.
using Grid = Eigen::MatrixXd;

struct MarketPanel {
    std::vector<Date> dates;
    std::vector<std::string> stocks;
    Grid open, high, low, close, volume;
    /// Named market series (VIX, MOVE, yields) aligned to `dates`.
    std::map<std::string, std::vector<double>> market;
    /// Ticker -> GICS level-1 sector.
    std::map<std::string, std::string> sectors;

    std::size_t n_dates() const { return dates.size(); }
    std::size_t n_stocks() const { return stocks.size(); }
    const std::vector<double>& series(const std::string& name) const;

    /// Throws DataError naming the first violated invariant.
    void validate() const;
};

/// Reads the three CSVs, drops stocks whose close coverage is below
/// `min_coverage`, and aligns market series with a 5-day forward fill.
MarketPanel load_market_panel(const std::string& prices_path, const std::string& market_path,
                              const std::string& sectors_path, double min_coverage);

/// Writes the panel in the formats load_market_panel reads (every date x stock
/// cell is emitted so that the date grid survives a round trip).
void write_market_panel(const MarketPanel& panel, const std::string& prices_path,
                        const std::string& market_path, const std::string& sectors_path);

/// Number of trading days a market observation may be carried forward.
inline constexpr int kMarketFillDays = 5;

// ----------------------------------------------------------------------------

struct ReturnPanel {
    std::vector<Date> dates;  // price dates[1..]
    std::vector<std::string> stocks;
    Grid r;
    std::vector<std::pair<double, double>> winsor_bounds;  // per stock (low, high)
};

/// Clamps the non-missing entries of `values` to their [lo_pct, hi_pct]
/// linear-interpolation percentiles; returns the bounds applied.
std::pair<double, double> winsorize(std::span<double> values, double lo_pct, double hi_pct);

/// r_t = ln(close_t / close_{t-1}) where both closes are present, then
/// per-stock winsorization.
ReturnPanel to_log_returns(const MarketPanel& panel, double lo_pct, double hi_pct);

enum class ProxyKind { parkinson, squared_return };

std::string to_string(ProxyKind k);
ProxyKind proxy_from_string(const std::string& s);

struct VolPanel {
    std::vector<Date> dates;
    std::vector<std::string> stocks;
    Grid rv;
    ProxyKind proxy = ProxyKind::parkinson;
};

/// rv = (ln H - ln L)^2 / (4 ln 2); missing when H or L is missing.
VolPanel parkinson_rv(const MarketPanel& panel);

/// r^2 of winsorized returns on the price-date grid (first row missing).
VolPanel squared_return_rv(const MarketPanel& panel, const ReturnPanel& returns);

struct TargetPanel {
    int horizon = 1;
    ProxyKind proxy = ProxyKind::parkinson;
    std::vector<Date> dates;
    std::vector<std::string> stocks;
    Grid y;                          // log mean of rv over (t, t+h]
    std::size_t zero_mean_count = 0;  // targets dropped because the mean was 0
};

TargetPanel forecast_target(const VolPanel& vol, int h, ProxyKind proxy);

/// Mean over the sample of 1 / (close x volume), skipping zero or missing
/// volume; NaN when a stock has no usable date.
std::vector<double> liquidity_measure(const MarketPanel& panel);

/// Same quantity as an expanding mean up to each date (no look-ahead).
Grid expanding_liquidity(const MarketPanel& panel);

/// 0 = measure at or below the cross-sectional median (more liquid),
/// 1 = above it, -1 = measure missing.
std::vector<int> liquidity_halves(std::span<const double> measure);

}  // namespace vplab
