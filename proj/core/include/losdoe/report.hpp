#pragma once

// Tabular reports: builders that lay analysis results out as tables, and
// renderers for text, CSV and JSON.

#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "losdoe/anova.hpp"
#include "losdoe/diagnostics.hpp"
#include "losdoe/linmod.hpp"
#include "losdoe/model.hpp"
#include "losdoe/posthoc.hpp"
#include "losdoe/power.hpp"

namespace losdoe {

enum class NumberStyle {
  fixed,      // "0.216", "-0.037"
  spss,       // leading zero dropped: ".216", "-.037", ".000"
  truncated,  // digits beyond `decimals` cut, not rounded
  integer,
};

/// A numeric cell: the full-precision value plus the rule used to print it.
struct Number {
  double value = 0.0;
  int decimals = 3;
  NumberStyle style = NumberStyle::fixed;
};

using Cell = std::variant<std::string, Number>;

struct ReportTable {
  std::string name;   // file stem, e.g. "anova"
  std::string title;
  std::vector<std::string> headers;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;
};

enum class ReportFormat { text, csv, json };

ReportFormat parse_report_format(std::string_view name);
std::string_view report_format_extension(ReportFormat f);

/// Printed form of a number under its style; NaN prints as "" and a value
/// that rounds to zero never carries a minus sign.
std::string format_number(const Number& n);

/// Text aligns columns and prints the numbers with their styles; CSV and JSON
/// carry every number at full precision.
std::string render_table(const ReportTable& table, ReportFormat format);

/// All tables in one document: text and CSV separate tables by a blank line,
/// JSON wraps them as {"tables": [...]}.
std::string render_report(std::span<const ReportTable> tables, ReportFormat format);

/// Operating-characteristic rows for one effect: n, phi (truncated to 4
/// decimals), NFD, DFD written as "cells*(n-1)=nu2", beta and power.
ReportTable power_report(std::span<const PowerResult> results, const FactorLayout& layout,
                         std::string_view effect_label);

/// Minimum replications per effect.
ReportTable plan_report(const ReplicationPlan& plan, double target_power);

/// Counts with the levels of `column_factor` across and every combination of
/// `row_factors` down, a subtotal row per level of the first row factor when
/// there are two or more, and totals.
ReportTable frequency_report(const FrequencyTable& freq, std::size_t column_factor,
                             std::span<const std::size_t> row_factors);

ReportTable anova_report(const AnovaTable& table);

ReportTable coefficient_report(const CoefficientTable& table, std::string_view response_name);

ReportTable scheffe_report(std::span<const ScheffeComparison> comparisons,
                           std::string_view response_name, double alpha);

ReportTable subsets_report(const HomogeneousSubsets& subsets,
                           std::span<const LevelSummary> levels);

ReportTable transform_report(const TransformRecommendation& rec);

ReportTable verdict_report(std::span<const Verdict> verdicts, double alpha_strict,
                           double alpha_loose);

}  // namespace losdoe
