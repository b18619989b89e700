// runner.hpp
// Batch stages over an output directory. Each stage reads the artifacts of
// the stages before it from that directory and writes its own, and records
// them in manifest.json together with the config hash and seed.

#pragma once

#include "vplab/config.hpp"

#include <string>
#include <vector>

namespace vplab {

enum class Stage { simulate, estimate, figarch, features, forecast, evaluate, portfolio, report, all };

std::string to_string(Stage s);
Stage stage_from_string(const std::string& s);

/// An upstream artifact is absent; the message names the stage that makes it.
class MissingArtifact : public DataError {
public:
    MissingArtifact(const std::string& path, const std::string& stage)
        : DataError("missing '" + path + "'; run the '" + stage + "' stage first"), stage_(stage) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

/// Artifact paths relative to the output directory.
namespace artifact {
inline const std::string kResolvedConfig = "config.resolved.ini";
inline const std::string kManifest = "manifest.json";
inline const std::string kPrices = "data/prices.csv";
inline const std::string kMarket = "data/market.csv";
inline const std::string kSectors = "data/sectors.csv";
inline const std::string kMemory = "estimate/memory.csv";
inline const std::string kFigarch = "figarch/figarch.csv";
inline const std::string kFeatures = "features/features.csv";
inline const std::string kForecastDiagnostics = "forecast/diagnostics.csv";
inline const std::string kTable5 = "evaluate/table5.csv";
inline const std::string kDmDetail = "evaluate/dm_detail.csv";
inline const std::string kTable7 = "evaluate/table7.csv";
inline const std::string kTable8 = "evaluate/table8.csv";
inline const std::string kSectorSplits = "evaluate/sectors.csv";
inline const std::string kCumulative = "evaluate/cumulative_differential.csv";
inline const std::string kReportJson = "evaluate/report.json";
inline const std::string kTable9 = "portfolio/table9.csv";
inline const std::string kPortfolioPaths = "portfolio/paths.csv";
inline const std::string kPortfolioNotes = "portfolio/exclusions.csv";
inline const std::string kDbarVix = "report/dbar_vix.csv";
inline const std::string kSectorHeatmap = "report/sector_heatmap.csv";
std::string forecast(const std::string& model, int horizon);  // forecast/<model>_h<h>.csv
}  // namespace artifact

/// Documented CSV headers, one per table-shaped artifact.
namespace header {
extern const std::vector<std::string> kMemory, kFigarch, kForecast, kForecastDiagnostics, kTable5, kDmDetail,
    kSplits, kCumulative, kTable9, kPortfolioPaths, kPortfolioNotes, kDbarVix, kSectorHeatmap;
}

/// Runs one stage (or the whole graph for Stage::all). Errors propagate as
/// ConfigError / DataError / EstimationError with the stage named.
void run_stage(Stage stage, const RunConfig& cfg, const std::string& out_dir);

}  // namespace vplab
