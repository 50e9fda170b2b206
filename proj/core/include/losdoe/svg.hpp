#pragma once

// Deterministic SVG renderings of diagnostic and post hoc series.

#include <filesystem>
#include <span>
#include <string>

#include "losdoe/diagnostics.hpp"
#include "losdoe/posthoc.hpp"

namespace losdoe {

struct PlotLabels {
  std::string title;
  std::string x_label;
  std::string y_label;
};

/// One <rect class="bar" data-count="..."> per bin, height proportional to
/// the count.
std::string histogram_svg(const HistogramData& h, const PlotLabels& labels);

/// Points as <circle class="point">. Series longer than max_points are
/// thinned by an even stride.
std::string scatter_svg(std::span<const double> x, std::span<const double> y,
                        const PlotLabels& labels, bool identity_line = false,
                        std::size_t max_points = 5000);

/// Scatter of theoretical against empirical probabilities with the identity
/// reference line.
std::string pp_svg(const PPPlotData& pp, const PlotLabels& labels);

/// Level means in ascending order, one <circle class="mean"> per level,
/// with a bracket per homogeneous subset.
std::string subset_means_svg(const HomogeneousSubsets& subsets,
                             std::span<const LevelSummary> levels, const PlotLabels& labels);

/// Writes text to path; InputError when the file cannot be written.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace losdoe
