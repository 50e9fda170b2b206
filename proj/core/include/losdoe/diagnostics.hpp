#pragma once

// Residual diagnostics and variance-stabilizing transform selection.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "losdoe/linmod.hpp"
#include "losdoe/model.hpp"

namespace losdoe {

/// e_i = y_i - fitted_i in observation order.
std::vector<double> residuals(const Dataset& d, const FitResult& fit);

struct HistogramData {
  std::vector<double> edges;  // bins + 1 strictly increasing edges
  std::vector<std::size_t> counts;
};

/// Equal-width bins over [min, max], the last bin closed on the right. When
/// bins is empty, Sturges' rule ceil(1 + log2 N) is used.
HistogramData residual_histogram(std::span<const double> e,
                                 std::optional<std::size_t> bins = std::nullopt);

std::size_t sturges_bins(std::size_t n);

struct ResidualFittedData {
  std::vector<double> fitted;     // ascending
  std::vector<double> residuals;  // paired with fitted
  /// sd of residuals in the top quartile of fitted values over the sd in the
  /// bottom quartile; absent when fitted values are all equal or a quartile
  /// holds fewer than two points.
  std::optional<double> funnel;
};

ResidualFittedData residual_vs_fitted(std::span<const double> e, std::span<const double> fitted);

struct PPPlotData {
  std::vector<double> empirical;    // (i - 0.5) / N
  std::vector<double> theoretical;  // normal_cdf of the i-th standardized residual
  double max_deviation = 0.0;
};

/// Residuals standardized by their own mean and population sd (divisor N).
PPPlotData pp_plot(std::span<const double> e);

struct TransformRecommendation {
  double slope = 0.0;            // fitted exponent of log10 sd on log10 mean
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_through_origin = 0.0;
  double snapped_exponent = 0.0;  // nearest of 0, 0.5, 1, 1.5, 2
  Transform transform = Transform::none;
  bool low_confidence = false;  // slope more than 0.25 from every grid point
  std::size_t cells_used = 0;
  std::size_t cells_excluded = 0;  // n < 2, mean <= 0 or sd = 0
};

/// OLS of log10(sd) on log10(mean) across cells, with intercept.
TransformRecommendation sd_mean_regression(std::span<const CellStats> cells);

/// Applies the transform to one response; throws InputError for a value outside
/// the transform's domain.
double transform_value(double y, Transform t);
double back_transform_value(double y, Transform t);

/// New dataset with transformed responses, named e.g. "log10(los)" and tagged
/// with the transform. Transforming an already transformed dataset is an
/// error unless t is none.
Dataset apply_transform(const Dataset& d, Transform t);

/// Inverse of apply_transform.
Dataset back_transform(const Dataset& d);

}  // namespace losdoe
