#pragma once

// The full analysis of one dataset: transform selection, Type III ANOVA,
// regression, residual diagnostics and Scheffe post hoc tests, plus writing
// the results out as a report directory.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "losdoe/anova.hpp"
#include "losdoe/diagnostics.hpp"
#include "losdoe/linmod.hpp"
#include "losdoe/model.hpp"
#include "losdoe/posthoc.hpp"
#include "losdoe/report.hpp"

namespace losdoe {

struct AnalysisOptions {
  /// Empty selects the transform recommended by sd_mean_regression.
  std::optional<Transform> transform;
  double alpha_strict = 0.01;
  double alpha_loose = 0.05;
  double regression_alpha = 0.05;  // coefficient CIs and retained-term cutoff
  double posthoc_alpha = 0.05;
  /// Highest interaction order; 0 means the full factorial.
  std::size_t max_order = 0;
};

struct FactorPosthoc {
  std::size_t factor = 0;
  std::vector<LevelSummary> levels;
  std::vector<ScheffeComparison> comparisons;
  HomogeneousSubsets subsets;
};

struct AnalysisResult {
  AnalysisOptions options;
  std::vector<CellStats> raw_cells;
  /// Absent when fewer than three cells support the regression and the
  /// transform was given explicitly.
  std::optional<TransformRecommendation> recommendation;
  Transform transform = Transform::none;
  bool transform_selected_automatically = false;
  Dataset analyzed;
  FrequencyTable frequencies;
  AnovaTable anova;
  std::vector<Verdict> verdicts;
  FitResult fit;  // full factorial under reference coding
  ReducedModel reduced;
  std::vector<double> residuals;
  HistogramData histogram;
  ResidualFittedData residual_fitted;
  PPPlotData pp;
  std::vector<FactorPosthoc> posthoc;  // factors with three or more levels
};

/// Runs every analysis on a raw-scale dataset.
AnalysisResult analyze(const Dataset& raw, const AnalysisOptions& options = {});

/// Scheffe comparisons and subsets for one factor, using the ANOVA's error
/// mean square and df.
FactorPosthoc posthoc_for(const Dataset& d, std::size_t factor, const AnovaTable& anova,
                          double alpha);

/// Tables in report order: frequency, transform (when available), anova,
/// verdicts, coefficients, then Scheffe and subset tables per factor.
std::vector<ReportTable> report_tables(const AnalysisResult& result);

/// Writes tables/<name>.{txt,csv,json}, plots/*.svg and manifest.json under
/// dir, creating directories as needed. Output depends only on the result.
/// Returns the artifact paths relative to dir.
std::vector<std::string> write_report(const AnalysisResult& result,
                                      const std::filesystem::path& dir);

}  // namespace losdoe
