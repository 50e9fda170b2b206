#include "cli.hpp"

#include <chrono>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "losdoe/anova.hpp"
#include "losdoe/csv.hpp"
#include "losdoe/diagnostics.hpp"
#include "losdoe/error.hpp"
#include "losdoe/los.hpp"
#include "losdoe/pipeline.hpp"
#include "losdoe/posthoc.hpp"
#include "losdoe/power.hpp"
#include "losdoe/report.hpp"
#include "losdoe/synth.hpp"

namespace losdoe::cli {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto end = s.find(sep, start);
    out.push_back(s.substr(start, end == std::string::npos ? std::string::npos : end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

long parse_long(const std::string& text, std::string_view what) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw InputError(fmt::format("{}: '{}' is not a whole number", what, text));
  }
  return v;
}

// "4,2,5" or "season=4,gender=2,age_group=5". Bare counts take names from
// `names`, or season, gender, age_group for three factors.
FactorLayout parse_levels(const std::string& levels, const std::string& names) {
  std::vector<std::string> factor_names;
  std::vector<std::size_t> counts;
  for (const auto& item : split(levels, ',')) {
    const auto eq = item.find('=');
    const auto count_text = eq == std::string::npos ? item : item.substr(eq + 1);
    const long count = parse_long(count_text, "--levels");
    if (count < 2) throw InputError(fmt::format("--levels: factor with {} levels", count));
    counts.push_back(static_cast<std::size_t>(count));
    if (eq != std::string::npos) factor_names.push_back(item.substr(0, eq));
  }
  if (!factor_names.empty() && factor_names.size() != counts.size()) {
    throw InputError("--levels: name every factor or none");
  }
  if (!names.empty()) {
    if (!factor_names.empty()) throw InputError("--names conflicts with named --levels");
    factor_names = split(names, ',');
    if (factor_names.size() != counts.size()) {
      throw InputError("--names must list one name per --levels entry");
    }
  }
  if (factor_names.empty()) {
    if (counts.size() == 3) {
      factor_names = {"season", "gender", "age_group"};
    } else {
      for (std::size_t i = 0; i < counts.size(); ++i) factor_names.push_back(fmt::format("f{}", i + 1));
    }
  }
  return FactorLayout::from_counts(factor_names, counts);
}

std::optional<Transform> parse_transform_choice(const std::string& text) {
  if (text == "auto") return std::nullopt;
  return parse_transform(text);
}

struct DataOptions {
  std::string input;
  std::string transform = "auto";
  bool season_from_date = false;
  std::string date_column = "admission_date";
  std::string format = "text";
};

void add_data_options(CLI::App* cmd, DataOptions& o) {
  cmd->add_option("--input", o.input, "CSV file with gender, season, age or age_group, los")
      ->required();
  cmd->add_option("--transform", o.transform, "auto, log10, none, sqrt, reciprocal_sqrt or reciprocal")
      ->capture_default_str();
  cmd->add_flag("--season-from-date", o.season_from_date,
                "derive season from a yyyy-mm-dd date column");
  cmd->add_option("--date-column", o.date_column, "date column used with --season-from-date")
      ->capture_default_str();
  cmd->add_option("--format", o.format, "text, csv or json")->capture_default_str();
}

Dataset load(const DataOptions& o) {
  IngestOptions io;
  io.season_from_date = o.season_from_date;
  io.date_column = o.date_column;
  return ingest_csv(o.input, io);
}

void print_tables(std::ostream& out, std::span<const ReportTable> tables,
                  const std::string& format) {
  out << render_report(tables, parse_report_format(format));
}

struct PowerArgs {
  std::string levels;
  std::string names;
  double min_diff = 1.0;
  double sigma2 = 1.0;
  double alpha = 0.05;
  double target_power = 0.95;
  std::string effect;
  bool all_effects = false;
  std::string n_list;
  long n_max = 100000;
  bool exact_phi = false;
  std::string format = "text";
};

int run_power(const PowerArgs& a, std::ostream& out) {
  const auto layout = parse_levels(a.levels, a.names);
  const std::optional<int> decimals = a.exact_phi ? std::nullopt : std::optional<int>(4);
  if (a.all_effects == !a.effect.empty()) {
    throw InputError("power: give exactly one of --effect or --all-effects");
  }
  std::vector<ReportTable> tables;
  if (a.all_effects) {
    if (!a.n_list.empty()) throw InputError("power: --n applies to --effect only");
    PlanOptions po{a.min_diff, a.sigma2, a.alpha, a.target_power, a.n_max, decimals};
    tables.push_back(plan_report(plan_all_effects(layout, po), a.target_power));
  } else {
    PowerSpec spec{layout, EffectId::parse(layout, a.effect), a.min_diff, a.sigma2, a.alpha, 2,
                   decimals};
    spec.validate();
    std::vector<long> ns;
    std::optional<long> minimum;
    if (a.n_list.empty()) {
      minimum = min_replications(spec, a.target_power, a.n_max);
      ns.push_back(*minimum);
    } else {
      for (const auto& item : split(a.n_list, ',')) ns.push_back(parse_long(item, "--n"));
    }
    const auto label = spec.effect.label(layout);
    auto table = power_report(oc_table(spec, ns), layout, label);
    if (minimum) {
      table.notes.push_back(fmt::format("Minimum replications for power >= {}: {}",
                                        a.target_power, *minimum));
    }
    if (decimals) {
      table.notes.push_back(fmt::format(
          "phi^2 coefficient rounded to {} decimals before scaling by n (--exact-phi disables).",
          *decimals));
    }
    tables.push_back(std::move(table));
  }
  print_tables(out, tables, a.format);
  return 0;
}

struct AnalysisArgs {
  DataOptions data;
  double alpha = 0.01;
  double alpha_loose = 0.05;
  double posthoc_alpha = 0.05;
  std::size_t max_order = 0;
  std::string factor;
  std::optional<std::size_t> bins;
  std::string out_dir = "losdoe_report";
};

AnalysisOptions analysis_options(const AnalysisArgs& a) {
  AnalysisOptions o;
  o.transform = parse_transform_choice(a.data.transform);
  o.alpha_strict = a.alpha;
  o.alpha_loose = a.alpha_loose;
  o.posthoc_alpha = a.posthoc_alpha;
  o.max_order = a.max_order;
  return o;
}

// Transform selection shared by the single-analysis commands.
Dataset prepared(const Dataset& raw, const std::optional<Transform>& t,
                 std::optional<TransformRecommendation>& rec) {
  if (t) return apply_transform(raw, *t);
  rec = sd_mean_regression(cell_stats(raw));
  return apply_transform(raw, rec->transform);
}

int run_anova(const AnalysisArgs& a, std::ostream& out) {
  const auto raw = load(a.data);
  std::optional<TransformRecommendation> rec;
  const auto d = prepared(raw, parse_transform_choice(a.data.transform), rec);
  const std::size_t order = a.max_order == 0 ? d.layout().factor_count() : a.max_order;
  const auto table = type3_anova(d, order);
  std::vector<ReportTable> tables;
  if (rec) tables.push_back(transform_report(*rec));
  tables.push_back(anova_report(table));
  tables.push_back(verdict_report(significance_summary(table, a.alpha, a.alpha_loose), a.alpha,
                                  a.alpha_loose));
  print_tables(out, tables, a.data.format);
  return 0;
}

int run_posthoc(const AnalysisArgs& a, std::ostream& out) {
  const auto raw = load(a.data);
  std::optional<TransformRecommendation> rec;
  const auto d = prepared(raw, parse_transform_choice(a.data.transform), rec);
  const std::size_t order = a.max_order == 0 ? d.layout().factor_count() : a.max_order;
  const auto anova = type3_anova(d, order);
  std::vector<std::size_t> factors;
  if (a.factor.empty()) {
    for (std::size_t f = 0; f < d.layout().factor_count(); ++f) {
      if (d.layout().level_count(f) >= 3) factors.push_back(f);
    }
  } else {
    factors.push_back(d.layout().factor_index(a.factor));
  }
  std::vector<ReportTable> tables;
  for (auto f : factors) {
    const auto ph = posthoc_for(d, f, anova, a.posthoc_alpha);
    tables.push_back(scheffe_report(ph.comparisons, d.response_name(), a.posthoc_alpha));
    tables.push_back(subsets_report(ph.subsets, ph.levels));
  }
  print_tables(out, tables, a.data.format);
  return 0;
}

int run_diagnose(const AnalysisArgs& a, std::ostream& out) {
  const auto raw = load(a.data);
  const auto cells = cell_stats(raw);
  const auto rec = sd_mean_regression(cells);
  const auto requested = parse_transform_choice(a.data.transform);
  const Transform t = requested ? *requested : rec.transform;
  const auto d = apply_transform(raw, t);
  const std::size_t order = a.max_order == 0 ? d.layout().factor_count() : a.max_order;
  const auto spec = ModelSpec::factorial(d.layout(), order, Coding::reference);
  const auto y = d.responses();
  const auto fit = ols_fit(build_design(d, spec), y);
  const auto e = residuals(d, fit);
  const auto hist = residual_histogram(e, a.bins);
  const auto rvf = residual_vs_fitted(e, fit.fitted);
  const auto pp = pp_plot(e);

  ReportTable summary;
  summary.name = "residuals";
  summary.title = fmt::format("Residual diagnostics ({})", d.response_name());
  summary.headers = {"Quantity", "Value"};
  summary.rows.push_back({std::string("observations"),
                          Number{static_cast<double>(e.size()), 0, NumberStyle::integer}});
  summary.rows.push_back({std::string("transform"), std::string(transform_name(t))});
  summary.rows.push_back({std::string("funnel ratio (top/bottom quartile sd)"),
                          rvf.funnel ? Cell(Number{*rvf.funnel, 3, NumberStyle::fixed})
                                     : Cell(std::string("undefined"))});
  summary.rows.push_back(
      {std::string("P-P max deviation"), Number{pp.max_deviation, 4, NumberStyle::fixed}});

  ReportTable histogram;
  histogram.name = "histogram";
  histogram.title = "Residual histogram";
  histogram.headers = {"lower", "upper", "count"};
  for (std::size_t b = 0; b < hist.counts.size(); ++b) {
    histogram.rows.push_back({Number{hist.edges[b], 4, NumberStyle::fixed},
                              Number{hist.edges[b + 1], 4, NumberStyle::fixed},
                              Number{static_cast<double>(hist.counts[b]), 0, NumberStyle::integer}});
  }
  const std::vector<ReportTable> tables{transform_report(rec), summary, histogram};
  print_tables(out, tables, a.data.format);
  return 0;
}

int run_report(const AnalysisArgs& a, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const auto raw = load(a.data);
  const auto result = analyze(raw, analysis_options(a));
  const auto artifacts = write_report(result, a.out_dir);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out << fmt::format("transform: {} ({})\n", transform_name(result.transform),
                     result.transform_selected_automatically ? "auto" : "requested");
  if (result.recommendation) {
    out << fmt::format("sd-mean slope: {:.4f}\n", result.recommendation->slope);
  }
  out << fmt::format("wrote {} artifacts to {} in {:.2f} s\n", artifacts.size(), a.out_dir,
                     seconds);
  return 0;
}

struct SynthArgs {
  std::size_t n = 82718;
  std::uint64_t seed = 0;
  std::string out;
  bool round_days = false;
  std::optional<double> error_sd;
};

int run_synth(const SynthArgs& a, std::ostream& out) {
  auto spec = default_cohort_spec();
  spec.n = a.n;
  spec.seed = a.seed;
  spec.round_to_days = a.round_days;
  if (a.error_sd) spec.error_sd = *a.error_sd;
  const auto d = generate(spec);
  write_csv(d, a.out);
  out << fmt::format("wrote {} rows to {}\n", d.size(), a.out);
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Planning and analysis of unbalanced factorial length-of-stay studies", "losdoe"};
  app.require_subcommand(1);

  PowerArgs power;
  auto* power_cmd = app.add_subcommand("power", "replications needed to detect a difference");
  power_cmd->add_option("--levels", power.levels, "level counts, e.g. 4,2,5 or season=4,...")
      ->required();
  power_cmd->add_option("--names", power.names, "factor names for bare --levels counts");
  power_cmd->add_option("--min-diff", power.min_diff, "smallest difference to detect (D)")
      ->required();
  power_cmd->add_option("--sigma2", power.sigma2, "error variance estimate")->required();
  power_cmd->add_option("--alpha", power.alpha, "test size")->capture_default_str();
  power_cmd->add_option("--target-power", power.target_power, "required power")
      ->capture_default_str();
  power_cmd->add_option("--effect", power.effect, "effect such as season or season*gender");
  power_cmd->add_flag("--all-effects", power.all_effects, "plan every main effect and interaction");
  power_cmd->add_option("--n", power.n_list, "replication counts to tabulate, e.g. 10,20,30");
  power_cmd->add_option("--n-max", power.n_max, "search limit for replications")
      ->capture_default_str();
  power_cmd->add_flag("--exact-phi", power.exact_phi,
                      "do not round the phi^2 coefficient to 4 decimals");
  power_cmd->add_option("--format", power.format, "text, csv or json")->capture_default_str();

  AnalysisArgs anova;
  auto* anova_cmd = app.add_subcommand("anova", "Type III tests of between-subjects effects");
  add_data_options(anova_cmd, anova.data);
  anova_cmd->add_option("--alpha", anova.alpha, "strict significance level")->capture_default_str();
  anova_cmd->add_option("--alpha-loose", anova.alpha_loose, "loose significance level")
      ->capture_default_str();
  anova_cmd->add_option("--max-order", anova.max_order, "highest interaction order (0 = all)");

  AnalysisArgs posthoc;
  auto* posthoc_cmd = app.add_subcommand("posthoc", "Scheffe comparisons and homogeneous subsets");
  add_data_options(posthoc_cmd, posthoc.data);
  posthoc_cmd->add_option("--factor", posthoc.factor, "factor to compare (default: all with 3+ levels)");
  posthoc_cmd->add_option("--alpha", posthoc.posthoc_alpha, "family-wise level")
      ->capture_default_str();
  posthoc_cmd->add_option("--max-order", posthoc.max_order, "highest interaction order (0 = all)");

  AnalysisArgs diagnose;
  auto* diagnose_cmd =
      app.add_subcommand("diagnose", "residual checks and transform recommendation");
  add_data_options(diagnose_cmd, diagnose.data);
  diagnose_cmd->add_option("--bins", diagnose.bins, "histogram bins (default Sturges)");
  diagnose_cmd->add_option("--max-order", diagnose.max_order, "highest interaction order (0 = all)");

  AnalysisArgs report;
  auto* report_cmd = app.add_subcommand("report", "full pipeline written to a directory");
  add_data_options(report_cmd, report.data);
  report_cmd->add_option("--out", report.out_dir, "output directory")->capture_default_str();
  report_cmd->add_option("--alpha", report.alpha, "strict significance level")
      ->capture_default_str();
  report_cmd->add_option("--alpha-loose", report.alpha_loose, "loose significance level")
      ->capture_default_str();
  report_cmd->add_option("--posthoc-alpha", report.posthoc_alpha, "Scheffe family-wise level")
      ->capture_default_str();
  report_cmd->add_option("--max-order", report.max_order, "highest interaction order (0 = all)");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "synthetic cohort CSV");
  synth_cmd->add_option("--n", synth.n, "observations")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "random seed")->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "output CSV path")->required();
  synth_cmd->add_flag("--round-days", synth.round_days, "round LOS to whole days");
  synth_cmd->add_option("--error-sd", synth.error_sd, "log10-scale error sd");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*power_cmd) return run_power(power, out);
    if (*anova_cmd) return run_anova(anova, out);
    if (*posthoc_cmd) return run_posthoc(posthoc, out);
    if (*diagnose_cmd) return run_diagnose(diagnose, out);
    if (*report_cmd) return run_report(report, out);
    if (*synth_cmd) return run_synth(synth, out);
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << app.help();
  return 1;
}

}  // namespace losdoe::cli
