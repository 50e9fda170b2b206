#include "losdoe/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "losdoe/error.hpp"
#include "losdoe/linmod.hpp"
#include "losdoe/los.hpp"
#include "losdoe/special.hpp"

namespace losdoe {

namespace {

// Uniform on the open interval (0, 1) from the top 53 bits of one draw.
double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

LinearPredictor cohort_predictor(const CohortSpec& spec) {
  auto model = ModelSpec::factorial(spec.layout, spec.layout.factor_count(), Coding::reference);
  return LinearPredictor::from_labels(std::move(model), spec.coefficients);
}

}  // namespace

void CohortSpec::validate() const {
  if (layout.factor_count() == 0) throw InputError("cohort: layout has no factors");
  if (cell_probabilities.size() != layout.cell_count()) {
    throw InputError(fmt::format("cohort: {} cell probabilities for {} cells",
                                 cell_probabilities.size(), layout.cell_count()));
  }
  double total = 0.0;
  for (double p : cell_probabilities) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InputError("cohort: cell probabilities must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InputError(fmt::format("cohort: cell probabilities sum to {}, not 1", total));
  }
  if (n < layout.cell_count()) {
    throw InputError(
        fmt::format("cohort: n = {} is below the cell count {}", n, layout.cell_count()));
  }
  if (!(error_sd >= 0.0) || !std::isfinite(error_sd)) {
    throw InputError("cohort: error sd must be finite and >= 0");
  }
}

CohortSpec default_cohort_spec() {
  CohortSpec spec;
  spec.layout = los_layout();
  const auto counts = los_reference_counts();
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(),
                                                           std::size_t{0}));
  for (auto c : counts) spec.cell_probabilities.push_back(static_cast<double>(c) / total);
  spec.n = static_cast<std::size_t>(total);
  spec.coefficients = los_reference_coefficients();
  spec.error_sd = std::sqrt(kLosReferenceErrorMeanSquare);
  return spec;
}

double cohort_eta(const CohortSpec& spec, std::span<const std::size_t> levels) {
  return cohort_predictor(spec).predict(levels);
}

Dataset generate(const CohortSpec& spec) {
  spec.validate();
  const auto predictor = cohort_predictor(spec);
  const std::size_t cells = spec.layout.cell_count();

  std::vector<double> cumulative(cells);
  std::partial_sum(spec.cell_probabilities.begin(), spec.cell_probabilities.end(),
                   cumulative.begin());
  std::vector<double> eta(cells);
  std::vector<std::vector<std::size_t>> cell_levels(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    cell_levels[c] = spec.layout.cell_levels(c);
    eta[c] = predictor.predict(cell_levels[c]);
  }

  std::mt19937_64 rng(spec.seed);
  std::vector<Observation> obs;
  obs.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double u = open_uniform(rng) * cumulative.back();
    auto cell = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    cell = std::min(cell, cells - 1);
    const double z = special::normal_quantile(open_uniform(rng));
    double los = std::pow(10.0, eta[cell] + spec.error_sd * z);
    if (spec.round_to_days) los = std::max(1.0, std::round(los));
    obs.push_back({cell_levels[cell], los});
  }
  return Dataset(spec.layout, std::move(obs), "los", true, Transform::none);
}

}  // namespace losdoe
