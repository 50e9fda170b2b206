#include "losdoe/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

#include "losdoe/error.hpp"

namespace losdoe {

namespace {

Number fixed(double v, int decimals) { return {v, decimals, NumberStyle::fixed}; }
Number spss(double v, int decimals) { return {v, decimals, NumberStyle::spss}; }
Number integer(double v) { return {v, 0, NumberStyle::integer}; }

std::string shortest(double v) {
  if (std::isnan(v)) return "";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw NumericalError("cannot format number");
  return std::string(buf.data(), ptr);
}

std::string cell_text(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return format_number(std::get<Number>(c));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render_text(const ReportTable& t) {
  std::vector<std::size_t> width(t.headers.size(), 0);
  std::vector<std::vector<std::string>> cells;
  for (std::size_t c = 0; c < t.headers.size(); ++c) width[c] = t.headers[c].size();
  for (const auto& row : t.rows) {
    std::vector<std::string> texts;
    for (std::size_t c = 0; c < row.size(); ++c) {
      texts.push_back(cell_text(row[c]));
      if (c < width.size()) width[c] = std::max(width[c], texts.back().size());
    }
    cells.push_back(std::move(texts));
  }
  auto line = [&](const std::vector<std::string>& texts, const std::vector<Cell>* row) {
    std::string out;
    for (std::size_t c = 0; c < texts.size() && c < width.size(); ++c) {
      const bool numeric = row && std::holds_alternative<Number>((*row)[c]);
      if (c) out += "  ";
      out += numeric ? fmt::format("{:>{}}", texts[c], width[c])
                     : fmt::format("{:<{}}", texts[c], width[c]);
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::size_t total = 0;
  for (auto w : width) total += w;
  total += width.empty() ? 0 : 2 * (width.size() - 1);

  std::string out = t.title + "\n";
  out += std::string(total, '=') + "\n";
  out += line(t.headers, nullptr);
  out += std::string(total, '-') + "\n";
  for (std::size_t r = 0; r < cells.size(); ++r) out += line(cells[r], &t.rows[r]);
  out += std::string(total, '-') + "\n";
  for (const auto& note : t.notes) out += note + "\n";
  return out;
}

std::string render_csv(const ReportTable& t) {
  std::string out;
  for (std::size_t c = 0; c < t.headers.size(); ++c) {
    out += (c ? "," : "") + csv_field(t.headers[c]);
  }
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ",";
      if (const auto* s = std::get_if<std::string>(&row[c])) {
        out += csv_field(*s);
      } else {
        out += shortest(std::get<Number>(row[c]).value);
      }
    }
    out += "\n";
  }
  return out;
}

nlohmann::ordered_json table_json(const ReportTable& t) {
  nlohmann::ordered_json j;
  j["name"] = t.name;
  j["title"] = t.title;
  j["headers"] = t.headers;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& c : row) {
      if (const auto* s = std::get_if<std::string>(&c)) {
        r.push_back(*s);
      } else {
        const double v = std::get<Number>(c).value;
        if (std::isfinite(v)) {
          r.push_back(v);
        } else {
          r.push_back(nullptr);
        }
      }
    }
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  j["notes"] = t.notes;
  return j;
}

Cell opt_cell(std::optional<double> v, int decimals, NumberStyle style) {
  if (!v) return std::string();
  return Number{*v, decimals, style};
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "text" || name == "txt") return ReportFormat::text;
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw InputError(fmt::format("unknown format '{}' (expected text, csv or json)", name));
}

std::string_view report_format_extension(ReportFormat f) {
  switch (f) {
    case ReportFormat::text: return "txt";
    case ReportFormat::csv: return "csv";
    case ReportFormat::json: return "json";
  }
  return "txt";
}

std::string format_number(const Number& n) {
  if (std::isnan(n.value)) return "";
  if (std::isinf(n.value)) return n.value > 0 ? "inf" : "-inf";
  std::string s;
  switch (n.style) {
    case NumberStyle::integer:
      s = fmt::format("{:.0f}", n.value);
      break;
    case NumberStyle::truncated: {
      const double scale = std::pow(10.0, n.decimals);
      // The small guard keeps values such as 2.3 (stored as 2.29999...) intact.
      const double cut = std::trunc(n.value * scale + std::copysign(1e-9, n.value));
      s = fmt::format("{:.{}f}", cut / scale, n.decimals);
      break;
    }
    case NumberStyle::fixed:
    case NumberStyle::spss:
      s = fmt::format("{:.{}f}", n.value, n.decimals);
      break;
  }
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  if (n.style == NumberStyle::spss) {
    if (s.rfind("0.", 0) == 0) {
      s.erase(0, 1);
    } else if (s.rfind("-0.", 0) == 0) {
      s.erase(1, 1);
    }
  }
  return s;
}

std::string render_table(const ReportTable& table, ReportFormat format) {
  switch (format) {
    case ReportFormat::text: return render_text(table);
    case ReportFormat::csv: return render_csv(table);
    case ReportFormat::json: return table_json(table).dump(2) + "\n";
  }
  return {};
}

std::string render_report(std::span<const ReportTable> tables, ReportFormat format) {
  if (format == ReportFormat::json) {
    nlohmann::ordered_json j;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& t : tables) arr.push_back(table_json(t));
    j["tables"] = std::move(arr);
    return j.dump(2) + "\n";
  }
  std::string out;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i) out += "\n";
    if (format == ReportFormat::csv) out += fmt::format("# {}\n", tables[i].name);
    out += render_table(tables[i], format);
  }
  return out;
}

ReportTable power_report(std::span<const PowerResult> results, const FactorLayout& layout,
                         std::string_view effect_label) {
  ReportTable t;
  t.name = "power";
  t.title = fmt::format("Sample size for the effect of \"{}\"", effect_label);
  t.headers = {"n", "phi^2", "phi", "NFD", "DFD", "beta", "power"};
  const auto cells = layout.cell_count();
  for (const auto& r : results) {
    t.rows.push_back({integer(static_cast<double>(r.replications)), fixed(r.phi2, 4),
                      Number{r.phi, 4, NumberStyle::truncated}, integer(static_cast<double>(r.nu1)),
                      fmt::format("{}*({})={}", cells, r.replications - 1, r.nu2),
                      fixed(r.beta, 2), fixed(r.power, 2)});
  }
  t.notes.push_back("phi is truncated to 4 decimals; beta = P(F' <= F crit) under the "
                    "noncentral F with lambda = (NFD + 1) phi^2.");
  return t;
}

ReportTable plan_report(const ReplicationPlan& plan, double target_power) {
  ReportTable t;
  t.name = "plan";
  t.title = fmt::format("Replications per cell for power >= {}", target_power);
  t.headers = {"Effect", "n", "phi", "NFD", "DFD", "beta", "power"};
  for (const auto& e : plan.effects) {
    t.rows.push_back({e.label, integer(static_cast<double>(e.replications)),
                      Number{e.result.phi, 4, NumberStyle::truncated},
                      integer(static_cast<double>(e.result.nu1)),
                      integer(static_cast<double>(e.result.nu2)), fixed(e.result.beta, 3),
                      fixed(e.result.power, 3)});
  }
  t.notes.push_back(fmt::format("At least {} replications per cell, set by {}.",
                                plan.max_replications, plan.limiting_effect));
  return t;
}

ReportTable frequency_report(const FrequencyTable& freq, std::size_t column_factor,
                             std::span<const std::size_t> row_factors) {
  const auto& layout = freq.layout();
  if (column_factor >= layout.factor_count()) throw InputError("frequency report: bad factor");
  for (auto f : row_factors) {
    if (f >= layout.factor_count() || f == column_factor) {
      throw InputError("frequency report: bad row factor");
    }
  }
  if (row_factors.size() + 1 != layout.factor_count()) {
    throw InputError("frequency report: every factor must be a row or the column factor");
  }

  ReportTable t;
  t.name = "frequency";
  t.title = "Frequency of observations in the levels of the factors";
  for (auto f : row_factors) t.headers.push_back(layout.factor(f).name);
  for (const auto& level : layout.factor(column_factor).levels) {
    t.headers.push_back(fmt::format("{} {}", layout.factor(column_factor).name, level));
  }
  t.headers.push_back("total");

  std::vector<std::size_t> order(row_factors.begin(), row_factors.end());
  order.push_back(column_factor);
  const auto margin = freq.margin(order);
  const std::size_t k = layout.level_count(column_factor);

  std::vector<std::size_t> limits;
  for (auto f : row_factors) limits.push_back(layout.level_count(f));
  std::size_t combos = 1;
  for (auto l : limits) combos *= l;
  const std::size_t inner = combos / (limits.empty() ? 1 : limits.front());

  auto count_row = [&](std::vector<Cell> row, auto&& value) {
    std::size_t total = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const auto v = value(c);
      total += v;
      row.push_back(integer(static_cast<double>(v)));
    }
    row.push_back(integer(static_cast<double>(total)));
    t.rows.push_back(std::move(row));
  };

  for (std::size_t combo = 0; combo < combos; ++combo) {
    std::vector<Cell> labels;
    std::size_t rest = combo;
    std::vector<std::string> parts(row_factors.size());
    for (std::size_t i = row_factors.size(); i-- > 0;) {
      parts[i] = layout.factor(row_factors[i]).levels[rest % limits[i]];
      rest /= limits[i];
    }
    for (auto& p : parts) labels.emplace_back(std::move(p));
    count_row(labels, [&](std::size_t c) { return margin[combo * k + c]; });

    if (row_factors.size() >= 2 && (combo + 1) % inner == 0) {
      const std::size_t outer = combo / inner;
      std::vector<Cell> sub{layout.factor(row_factors[0]).levels[outer]};
      for (std::size_t i = 1; i < row_factors.size(); ++i) sub.emplace_back(i == 1 ? "total" : "");
      count_row(sub, [&](std::size_t c) {
        std::size_t s = 0;
        for (std::size_t m = outer * inner; m < (outer + 1) * inner; ++m) s += margin[m * k + c];
        return s;
      });
    }
  }
  std::vector<Cell> grand{std::string("total")};
  for (std::size_t i = 1; i < row_factors.size(); ++i) grand.emplace_back(std::string());
  const auto col_margin = freq.margin(std::span<const std::size_t>(&column_factor, 1));
  count_row(grand, [&](std::size_t c) { return col_margin[c]; });
  return t;
}

ReportTable anova_report(const AnovaTable& table) {
  ReportTable t;
  t.name = "anova";
  t.title = fmt::format("Tests of between-subjects effects (dependent variable: {})",
                        table.response_name);
  t.headers = {"Source", "Type III Sum of Squares", "df", "Mean Square", "F", "Sig."};
  for (const auto& r : table.rows) {
    t.rows.push_back({r.source, fixed(r.ss, 3), integer(static_cast<double>(r.df)),
                      opt_cell(r.ms, 3, NumberStyle::spss), opt_cell(r.f, 3, NumberStyle::spss),
                      opt_cell(r.p, 3, NumberStyle::spss)});
  }
  return t;
}

ReportTable coefficient_report(const CoefficientTable& table, std::string_view response_name) {
  ReportTable t;
  t.name = "coefficients";
  t.title = fmt::format("Parameter estimates (dependent variable: {})", response_name);
  const auto level = fmt::format("{:g}%", table.confidence * 100.0);
  t.headers = {"Parameter", "B", "Std. Error", "t", "Sig.", level + " Lower Bound",
               level + " Upper Bound"};
  for (const auto& c : table.rows) {
    t.rows.push_back({c.label, spss(c.estimate, 3), spss(c.std_error, 3), spss(c.t, 3),
                      spss(c.p, 3), spss(c.lower, 3), spss(c.upper, 3)});
  }
  t.notes.push_back("Reference coding: the last level of each factor is the reference.");
  return t;
}

ReportTable scheffe_report(std::span<const ScheffeComparison> comparisons,
                           std::string_view response_name, double alpha) {
  ReportTable t;
  const std::string factor = comparisons.empty() ? std::string() : comparisons.front().factor;
  t.name = fmt::format("scheffe_{}", factor);
  t.title = fmt::format("Scheffe comparisons of {} means across {}", response_name, factor);
  const auto level = fmt::format("{:g}%", (1.0 - alpha) * 100.0);
  t.headers = {"(I) " + factor, "(J) " + factor, "Mean Difference (I-J)", "Std. Error", "Sig.",
               level + " Lower Bound", level + " Upper Bound"};
  std::string previous;
  for (const auto& c : comparisons) {
    const std::string first = c.level_i == previous ? std::string() : c.level_i;
    previous = c.level_i;
    t.rows.push_back({first, c.level_j, spss(c.difference, 4), spss(c.std_error, 5),
                      spss(c.p, 3), spss(c.lower, 4), spss(c.upper, 4)});
  }
  return t;
}

ReportTable subsets_report(const HomogeneousSubsets& subsets,
                           std::span<const LevelSummary> levels) {
  ReportTable t;
  t.name = fmt::format("subsets_{}", subsets.factor);
  t.title = fmt::format("Homogeneous subsets for {} (alpha = {:g})", subsets.factor,
                        subsets.alpha);
  t.headers = {subsets.factor, "N"};
  for (std::size_t s = 0; s < subsets.subsets.size(); ++s) {
    t.headers.push_back(fmt::format("subset {}", s + 1));
  }
  for (auto level : subsets.order) {
    std::vector<Cell> row{levels[level].level, integer(static_cast<double>(levels[level].n))};
    for (const auto& sub : subsets.subsets) {
      const auto it = std::find(sub.levels.begin(), sub.levels.end(), level);
      if (it == sub.levels.end()) {
        row.emplace_back(std::string());
      } else {
        row.emplace_back(fixed(levels[level].mean, 3));
      }
    }
    t.rows.push_back(std::move(row));
  }
  std::vector<Cell> sig{std::string("sig."), std::string()};
  for (const auto& sub : subsets.subsets) sig.emplace_back(fixed(sub.significance, 3));
  t.rows.push_back(std::move(sig));
  t.notes.push_back("sig.: " + subsets.significance_convention + ".");
  return t;
}

ReportTable transform_report(const TransformRecommendation& rec) {
  ReportTable t;
  t.name = "transform";
  t.title = "Regression of log10(cell sd) on log10(cell mean)";
  t.headers = {"Quantity", "Value"};
  t.rows = {
      {std::string("slope"), fixed(rec.slope, 4)},
      {std::string("intercept"), fixed(rec.intercept, 4)},
      {std::string("R^2"), fixed(rec.r_squared, 4)},
      {std::string("slope through origin"), fixed(rec.slope_through_origin, 4)},
      {std::string("snapped exponent"), fixed(rec.snapped_exponent, 1)},
      {std::string("transform"), std::string(transform_name(rec.transform))},
      {std::string("low confidence"), std::string(rec.low_confidence ? "yes" : "no")},
      {std::string("cells used"), integer(static_cast<double>(rec.cells_used))},
      {std::string("cells excluded"), integer(static_cast<double>(rec.cells_excluded))},
  };
  return t;
}

ReportTable verdict_report(std::span<const Verdict> verdicts, double alpha_strict,
                           double alpha_loose) {
  ReportTable t;
  t.name = "verdicts";
  t.title = "Significance of model terms";
  t.headers = {"Source", "Sig.", fmt::format("p < {:g}", alpha_strict),
               fmt::format("p < {:g}", alpha_loose)};
  for (const auto& v : verdicts) {
    t.rows.push_back({v.source, spss(v.p, 3), std::string(v.significant_strict ? "yes" : "no"),
                      std::string(v.significant_loose ? "yes" : "no")});
  }
  return t;
}

}  // namespace losdoe
