#pragma once

// The hospital length-of-stay layout: age_group (5) x season (4) x gender (2),
// in the factor order used for model terms and table rows.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "losdoe/model.hpp"

namespace losdoe {

inline constexpr std::size_t kAgeGroup = 0;
inline constexpr std::size_t kSeason = 1;
inline constexpr std::size_t kGender = 2;

/// age_group {1..5}, season {spring, summer, autumn, winter},
/// gender {male, female}. The last level of each factor is the reference
/// level under reference coding.
FactorLayout los_layout();

/// Observed admissions per cell of the 82,718-patient Tehran cohort, in
/// los_layout() cell order.
std::vector<std::size_t> los_reference_counts();

/// Significant log10-scale regression terms of the fitted cohort model under
/// reference coding, keyed by coefficient label.
std::vector<std::pair<std::string, double>> los_reference_coefficients();

/// Log10-scale error mean square of the fitted cohort model.
inline constexpr double kLosReferenceErrorMeanSquare = 0.216;

/// Age binning: 1-10, 11-25, 26-40, 41-60, 61+ map to groups 1..5.
/// Ages below 1 are rejected with InputError.
std::size_t age_group_for(long age_years);

}  // namespace losdoe
