#include "losdoe/pipeline.hpp"

#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

#include "losdoe/error.hpp"
#include "losdoe/svg.hpp"

namespace losdoe {

namespace {

std::optional<TransformRecommendation> try_recommend(std::span<const CellStats> cells) {
  try {
    return sd_mean_regression(cells);
  } catch (const InputError&) {
    return std::nullopt;
  }
}

std::vector<std::size_t> frequency_rows(const FactorLayout& layout) {
  std::vector<std::size_t> rows;
  for (std::size_t f = layout.factor_count(); f-- > 1;) rows.push_back(f);
  return rows;
}

}  // namespace

FactorPosthoc posthoc_for(const Dataset& d, std::size_t factor, const AnovaTable& anova,
                          double alpha) {
  const auto& error = anova.error();
  const ScheffeSettings settings{*error.ms, error.df, alpha};
  FactorPosthoc out;
  out.factor = factor;
  out.levels = marginal_means(d, factor);
  out.comparisons = scheffe_pairwise(d.layout().factor(factor).name, out.levels, settings);
  out.subsets = homogeneous_subsets(out.comparisons, out.levels, alpha);
  return out;
}

AnalysisResult analyze(const Dataset& raw, const AnalysisOptions& options) {
  if (raw.transform() != Transform::none) {
    throw InputError("analysis expects a dataset on the raw scale");
  }
  const auto& layout = raw.layout();
  const std::size_t order = options.max_order == 0 ? layout.factor_count() : options.max_order;

  auto raw_cells = cell_stats(raw);
  std::optional<TransformRecommendation> rec;
  Transform transform = Transform::none;
  if (options.transform) {
    rec = try_recommend(raw_cells);
    transform = *options.transform;
  } else {
    rec = sd_mean_regression(raw_cells);
    transform = rec->transform;
  }

  Dataset analyzed = apply_transform(raw, transform);
  auto freq = frequency_table(analyzed);
  auto anova = type3_anova(analyzed, order);
  auto verdicts = significance_summary(anova, options.alpha_strict, options.alpha_loose);

  const auto design =
      build_design(analyzed, ModelSpec::factorial(layout, order, Coding::reference));
  const auto y = analyzed.responses();
  auto fit = ols_fit(design, y, options.regression_alpha);
  auto reduced =
      significant_model(fit.coefficients, options.regression_alpha, analyzed.response_name());

  auto e = residuals(analyzed, fit);
  auto histogram = residual_histogram(e);
  auto rvf = residual_vs_fitted(e, fit.fitted);
  auto pp = pp_plot(e);

  std::vector<FactorPosthoc> posthoc;
  for (std::size_t f = 0; f < layout.factor_count(); ++f) {
    if (layout.level_count(f) >= 3) {
      posthoc.push_back(posthoc_for(analyzed, f, anova, options.posthoc_alpha));
    }
  }

  return AnalysisResult{
      .options = options,
      .raw_cells = std::move(raw_cells),
      .recommendation = rec,
      .transform = transform,
      .transform_selected_automatically = !options.transform.has_value(),
      .analyzed = std::move(analyzed),
      .frequencies = std::move(freq),
      .anova = std::move(anova),
      .verdicts = std::move(verdicts),
      .fit = std::move(fit),
      .reduced = std::move(reduced),
      .residuals = std::move(e),
      .histogram = std::move(histogram),
      .residual_fitted = std::move(rvf),
      .pp = std::move(pp),
      .posthoc = std::move(posthoc),
  };
}

std::vector<ReportTable> report_tables(const AnalysisResult& r) {
  const auto& layout = r.analyzed.layout();
  std::vector<ReportTable> tables;
  const auto rows = frequency_rows(layout);
  tables.push_back(frequency_report(r.frequencies, 0, rows));
  if (r.recommendation) {
    auto t = transform_report(*r.recommendation);
    t.notes.push_back(fmt::format("Applied transform: {} ({})", transform_name(r.transform),
                                  r.transform_selected_automatically ? "selected automatically"
                                                                     : "requested"));
    tables.push_back(std::move(t));
  }
  tables.push_back(anova_report(r.anova));
  tables.push_back(verdict_report(r.verdicts, r.options.alpha_strict, r.options.alpha_loose));
  auto coefficients = coefficient_report(r.fit.coefficients, r.analyzed.response_name());
  coefficients.notes.push_back(fmt::format("Retained at alpha = {:g}: {}",
                                           r.options.regression_alpha, r.reduced.formula));
  tables.push_back(std::move(coefficients));
  for (const auto& ph : r.posthoc) {
    tables.push_back(
        scheffe_report(ph.comparisons, r.analyzed.response_name(), r.options.posthoc_alpha));
    tables.push_back(subsets_report(ph.subsets, ph.levels));
  }
  return tables;
}

std::vector<std::string> write_report(const AnalysisResult& r, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir / "tables", ec);
  if (!ec) fs::create_directories(dir / "plots", ec);
  if (ec) throw InputError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));

  std::vector<std::string> artifacts;
  auto emit = [&](const std::string& rel, std::string_view content) {
    write_text_file(dir / rel, content);
    artifacts.push_back(rel);
  };

  const auto tables = report_tables(r);
  for (const auto& t : tables) {
    for (auto f : {ReportFormat::text, ReportFormat::csv, ReportFormat::json}) {
      emit(fmt::format("tables/{}.{}", t.name, report_format_extension(f)), render_table(t, f));
    }
  }
  emit("report.txt", render_report(tables, ReportFormat::text));

  const auto& name = r.analyzed.response_name();
  emit("plots/residual_histogram.svg",
       histogram_svg(r.histogram, {"Histogram of residuals", fmt::format("residual ({})", name),
                                   "frequency"}));
  emit("plots/residual_vs_fitted.svg",
       scatter_svg(r.residual_fitted.fitted, r.residual_fitted.residuals,
                   {"Residuals against fitted values", fmt::format("fitted {}", name),
                    fmt::format("residual ({})", name)}));
  emit("plots/residual_pp.svg",
       pp_svg(r.pp, {"Normal P-P plot of residuals", "observed cumulative probability",
                     "expected cumulative probability"}));

  std::vector<double> log_mean;
  std::vector<double> log_sd;
  for (const auto& c : r.raw_cells) {
    if (c.n >= 2 && c.sd && *c.sd > 0.0 && c.mean > 0.0) {
      log_mean.push_back(std::log10(c.mean));
      log_sd.push_back(std::log10(*c.sd));
    }
  }
  if (!log_mean.empty()) {
    emit("plots/sd_vs_mean.svg",
         scatter_svg(log_mean, log_sd,
                     {"Cell standard deviation against cell mean", "log10 cell mean",
                      "log10 cell sd"}));
  }
  for (const auto& ph : r.posthoc) {
    const auto& factor = r.analyzed.layout().factor(ph.factor).name;
    emit(fmt::format("plots/subsets_{}.svg", factor),
         subset_means_svg(ph.subsets, ph.levels,
                          {fmt::format("Mean {} by {}", name, factor), factor,
                           fmt::format("mean {}", name)}));
  }

  nlohmann::ordered_json m;
  m["response"] = name;
  m["observations"] = r.analyzed.size();
  m["transform"] = std::string(transform_name(r.transform));
  m["transform_selected_automatically"] = r.transform_selected_automatically;
  if (r.recommendation) {
    m["sd_mean_slope"] = r.recommendation->slope;
    m["sd_mean_intercept"] = r.recommendation->intercept;
    m["sd_mean_r_squared"] = r.recommendation->r_squared;
    m["sd_mean_low_confidence"] = r.recommendation->low_confidence;
  }
  m["max_order"] = r.anova.max_order;
  m["alpha_strict"] = r.options.alpha_strict;
  m["alpha_loose"] = r.options.alpha_loose;
  m["regression_alpha"] = r.options.regression_alpha;
  m["posthoc_alpha"] = r.options.posthoc_alpha;
  m["error_mean_square"] = *r.anova.error().ms;
  m["error_df"] = r.anova.error().df;
  m["model_formula"] = r.reduced.formula;
  artifacts.push_back("manifest.json");
  m["artifacts"] = artifacts;
  write_text_file(dir / "manifest.json", m.dump(2) + "\n");
  return artifacts;
}

}  // namespace losdoe
