#pragma once

// Type III sums of squares for crossed fixed-effects factorial designs.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "losdoe/model.hpp"

namespace losdoe {

struct AnovaRow {
  std::string source;
  double ss = 0.0;
  long df = 0;
  std::optional<double> ms;
  std::optional<double> f;
  std::optional<double> p;
};

/// Rows in order: Corrected Model, Intercept, each effect (mains first, then
/// interactions by order), Error, Total, Corrected Total.
struct AnovaTable {
  std::vector<AnovaRow> rows;
  std::string response_name;
  std::size_t max_order = 0;

  /// Throws InputError for an unknown source.
  const AnovaRow& row(std::string_view source) const;
  const AnovaRow& error() const { return row("Error"); }
  /// The effect rows between Intercept and Error.
  std::vector<AnovaRow> effects() const;
};

/// Each effect's SS is SSE(full model without that effect's columns) minus
/// SSE(full model), both under sum-to-zero coding with every other term kept.
/// Requires every cell spanned by a model term to be nonempty and at least
/// one error degree of freedom.
AnovaTable type3_anova(const Dataset& d, std::size_t max_order);

struct DfRow {
  std::string source;
  long df = 0;
};

/// The df column of type3_anova, from cell counts alone.
std::vector<DfRow> df_check(const FrequencyTable& freq, std::size_t max_order);

struct Verdict {
  std::string source;
  double p = 1.0;
  bool significant_strict = false;  // p < alpha_strict
  bool significant_loose = false;   // p < alpha_loose
};

/// Verdicts for every row carrying a p-value.
std::vector<Verdict> significance_summary(const AnovaTable& table, double alpha_strict,
                                          double alpha_loose);

}  // namespace losdoe
