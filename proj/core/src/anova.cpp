#include "losdoe/anova.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "losdoe/error.hpp"
#include "losdoe/linmod.hpp"
#include "losdoe/special.hpp"

namespace losdoe {

namespace {

void check_order(const FactorLayout& layout, std::size_t max_order) {
  if (max_order < 1 || max_order > layout.factor_count()) {
    throw InputError(fmt::format("max_order must be in [1, {}], got {}", layout.factor_count(),
                                 max_order));
  }
}

// Throws when some level combination of a term's factors has no observations.
void require_term_cells(const FrequencyTable& freq, const ModelSpec& spec) {
  const auto& layout = freq.layout();
  for (std::size_t t = 0; t < spec.terms().size(); ++t) {
    const auto& term = spec.terms()[t];
    if (term.empty()) continue;
    const auto margin = freq.margin(term);
    for (std::size_t idx = 0; idx < margin.size(); ++idx) {
      if (margin[idx] != 0) continue;
      // Decode the margin index back to levels of the term's factors.
      std::string cell;
      std::size_t rest = idx;
      std::vector<std::string> parts(term.size());
      for (std::size_t i = term.size(); i-- > 0;) {
        const auto k = layout.level_count(term[i]);
        parts[i] = layout.factor(term[i]).name + "=" + layout.factor(term[i]).levels[rest % k];
        rest /= k;
      }
      for (std::size_t i = 0; i < parts.size(); ++i) cell += (i ? ", " : "") + parts[i];
      throw InputError(fmt::format("empty cell in term '{}': {}", spec.term_label(t), cell));
    }
  }
}

AnovaRow tested_row(std::string source, double ss, long df, double mse, long df_error) {
  AnovaRow row{std::move(source), ss, df, std::nullopt, std::nullopt, std::nullopt};
  if (df <= 0) return row;
  const double ms = ss / static_cast<double>(df);
  row.ms = ms;
  const double f = ms / mse;
  row.f = f;
  row.p = special::f_sf(std::max(f, 0.0), special::FDist(static_cast<double>(df),
                                                         static_cast<double>(df_error)));
  return row;
}

}  // namespace

const AnovaRow& AnovaTable::row(std::string_view source) const {
  for (const auto& r : rows) {
    if (r.source == source) return r;
  }
  throw InputError(fmt::format("ANOVA table has no row '{}'", source));
}

std::vector<AnovaRow> AnovaTable::effects() const {
  std::vector<AnovaRow> out;
  for (const auto& r : rows) {
    if (r.source == "Corrected Model" || r.source == "Intercept" || r.source == "Error" ||
        r.source == "Total" || r.source == "Corrected Total") {
      continue;
    }
    out.push_back(r);
  }
  return out;
}

AnovaTable type3_anova(const Dataset& d, std::size_t max_order) {
  const auto& layout = d.layout();
  check_order(layout, max_order);
  const auto spec = ModelSpec::factorial(layout, max_order, Coding::deviation);
  require_term_cells(frequency_table(d), spec);

  const long n = static_cast<long>(d.size());
  const long p = static_cast<long>(spec.column_count());
  const long df_error = n - p;
  if (df_error < 1) {
    throw InputError(fmt::format("no error degrees of freedom: {} observations for {} model "
                                 "columns",
                                 n, p));
  }

  const auto design = build_design(d, spec);
  const auto y_std = d.responses();
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(y_std.data(), n);
  const auto labels = spec.column_labels();
  const double sse = least_squares(design.values, y, labels, false).sse;
  const double mse = sse / static_cast<double>(df_error);
  if (!(mse > 0.0)) {
    throw NumericalError("error mean square is zero; F statistics are undefined");
  }

  // One reduced fit per term, each dropping only that term's columns.
  std::vector<double> term_ss(spec.terms().size());
  for (std::size_t t = 0; t < spec.terms().size(); ++t) {
    const auto dropped = spec.term_columns(t);
    std::vector<Eigen::Index> kept;
    std::vector<std::string> kept_labels;
    for (long j = 0; j < p; ++j) {
      if (std::find(dropped.begin(), dropped.end(), static_cast<std::size_t>(j)) ==
          dropped.end()) {
        kept.push_back(j);
        kept_labels.push_back(labels[static_cast<std::size_t>(j)]);
      }
    }
    const Eigen::MatrixXd reduced = design.values(Eigen::all, kept);
    const double sse_reduced = least_squares(reduced, y, kept_labels, false).sse;
    term_ss[t] = std::max(0.0, sse_reduced - sse);
  }

  const double mean = y.mean();
  const double total_ss = y.squaredNorm();
  const double corrected_total_ss = (y.array() - mean).square().sum();

  AnovaTable table;
  table.response_name = d.response_name();
  table.max_order = max_order;
  table.rows.push_back(
      tested_row("Corrected Model", corrected_total_ss - sse, p - 1, mse, df_error));
  for (std::size_t t = 0; t < spec.terms().size(); ++t) {
    const long df = static_cast<long>(spec.term_columns(t).size());
    table.rows.push_back(tested_row(spec.term_label(t), term_ss[t], df, mse, df_error));
  }
  table.rows.push_back({"Error", sse, df_error, mse, std::nullopt, std::nullopt});
  table.rows.push_back({"Total", total_ss, n, std::nullopt, std::nullopt, std::nullopt});
  table.rows.push_back(
      {"Corrected Total", corrected_total_ss, n - 1, std::nullopt, std::nullopt, std::nullopt});
  return table;
}

std::vector<DfRow> df_check(const FrequencyTable& freq, std::size_t max_order) {
  const auto& layout = freq.layout();
  check_order(layout, max_order);
  const auto spec = ModelSpec::factorial(layout, max_order, Coding::deviation);
  require_term_cells(freq, spec);

  const long n = static_cast<long>(freq.total());
  const long p = static_cast<long>(spec.column_count());
  std::vector<DfRow> rows;
  rows.push_back({"Corrected Model", p - 1});
  for (std::size_t t = 0; t < spec.terms().size(); ++t) {
    rows.push_back({spec.term_label(t), static_cast<long>(spec.term_columns(t).size())});
  }
  rows.push_back({"Error", n - p});
  rows.push_back({"Total", n});
  rows.push_back({"Corrected Total", n - 1});
  return rows;
}

std::vector<Verdict> significance_summary(const AnovaTable& table, double alpha_strict,
                                          double alpha_loose) {
  if (!(alpha_strict > 0.0 && alpha_strict < 1.0) || !(alpha_loose > 0.0 && alpha_loose < 1.0)) {
    throw InputError("significance levels must be in (0, 1)");
  }
  std::vector<Verdict> out;
  for (const auto& row : table.rows) {
    if (!row.p) continue;
    out.push_back({row.source, *row.p, *row.p < alpha_strict, *row.p < alpha_loose});
  }
  return out;
}

}  // namespace losdoe
