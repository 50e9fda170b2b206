#pragma once

// Synthetic length-of-stay cohorts: lognormal responses around a
// log10-scale linear predictor, with cells drawn from a fixed distribution.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "losdoe/model.hpp"

namespace losdoe {

struct CohortSpec {
  FactorLayout layout;
  std::vector<double> cell_probabilities;  // one per cell, layout order, summing to 1
  std::size_t n = 0;
  /// log10-scale coefficients keyed by reference-coding column label, e.g.
  /// "Intercept", "age_group(2)", "age_group(3)*gender(1)". Absent columns are 0.
  std::vector<std::pair<std::string, double>> coefficients;
  double error_sd = 0.0;  // log10 scale; 0 gives noise-free responses
  std::uint64_t seed = 0;
  bool round_to_days = false;  // round LOS to whole days, at least 1

  /// Throws InputError when the spec is unusable.
  void validate() const;
};

/// Cohort matching the reference hospital data: cell probabilities from the
/// observed counts, the eight significant model terms, error sd sqrt(0.216),
/// N = 82718 and seed 0.
CohortSpec default_cohort_spec();

/// log10-scale linear predictor of one cell under the spec's coefficients.
double cohort_eta(const CohortSpec& spec, std::span<const std::size_t> levels);

/// Draws spec.n observations with response "los" on the raw scale. The same
/// spec always yields the same dataset.
Dataset generate(const CohortSpec& spec);

}  // namespace losdoe
