// Acceptance suite: one PASS/FAIL line per criterion.
//
//   losdoe_acceptance                 run every criterion
//   losdoe_acceptance --criterion 4   run one; exit status 0 only on PASS

#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "cli.hpp"
#include "losdoe/anova.hpp"
#include "losdoe/los.hpp"
#include "losdoe/posthoc.hpp"
#include "losdoe/power.hpp"
#include "losdoe/report.hpp"
#include "losdoe/special.hpp"
#include "oracles.hpp"

namespace {

using namespace losdoe;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Marginal (level count, printed mean) summaries over the reference counts.
std::vector<LevelSummary> reference_levels(std::size_t factor, std::span<const double> means) {
  const auto layout = los_layout();
  const FrequencyTable freq(layout, los_reference_counts());
  const auto margin = freq.margin(std::span<const std::size_t>(&factor, 1));
  const auto& names = layout.factor(factor).levels;
  std::vector<LevelSummary> out;
  for (std::size_t l = 0; l < names.size(); ++l) {
    out.push_back({names[l], margin[l], means.empty() ? 0.0 : means[l]});
  }
  return out;
}

constexpr double kPrintedErrorSS = 17897.142;
constexpr long kPrintedErrorDf = 82678;

ScheffeSettings reference_settings(double alpha = 0.05) {
  return {kPrintedErrorSS / static_cast<double>(kPrintedErrorDf), kPrintedErrorDf, alpha};
}

PowerSpec season_spec() {
  const std::array<std::string, 3> names{"season", "gender", "age_group"};
  const std::array<std::size_t, 3> counts{4, 2, 5};
  auto layout = FactorLayout::from_counts(names, counts);
  auto effect = EffectId::parse(layout, "season");
  return PowerSpec{std::move(layout), std::move(effect), 1.0, 9.41, 0.01, 2, 4};
}

const std::array<long, 5> kTableNs{10, 20, 30, 40, 43};

Outcome phi_column() {
  const auto start = Clock::now();
  const auto rows = oc_table(season_spec(), kTableNs);
  const std::array<const char*, 5> expected{"1.1523", "1.6297", "1.9959", "2.3047", "2.3896"};
  bool ok = true;
  std::string got;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto text = format_number({rows[i].phi, 4, NumberStyle::truncated});
    ok = ok && text == expected[i];
    got += (i ? " " : "") + text;
  }
  const double t = seconds_since(start);
  ok = ok && t < 1.0;
  return {ok, fmt::format("phi = {} ({:.3f} s)", got, t)};
}

Outcome beta_column() {
  const auto start = Clock::now();
  const auto rows = oc_table(season_spec(), kTableNs);
  const std::array<double, 5> chart{0.80, 0.31, 0.20, 0.06, 0.04};
  bool ok = true;
  std::string got;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const bool within = std::abs(rows[i].beta - chart[i]) <= 0.06;
    ok = ok && within;
    got += fmt::format("{}n={}: {:.3f} vs {:.2f}", i ? ", " : "", rows[i].replications,
                       rows[i].beta, chart[i]);
    if (!within) got += " (out of band)";
  }
  const double power43 = rows.back().power;
  ok = ok && std::abs(power43 - 0.96) <= 0.03;
  const double t = seconds_since(start);
  ok = ok && t < 1.0;
  return {ok, fmt::format("beta {}; power(43) = {:.3f} ({:.3f} s)", got, power43, t)};
}

Outcome df_column() {
  const FrequencyTable freq(los_layout(), los_reference_counts());
  const auto rows = df_check(freq, 3);
  const std::vector<long> expected{39, 1, 4, 3, 1, 12, 4, 3, 12, 82678, 82718, 82717};
  std::vector<long> got;
  for (const auto& r : rows) got.push_back(r.df);
  return {got == expected, fmt::format("df = {}", fmt::join(got, ","))};
}

Outcome anova_consistency() {
  const double mse = kPrintedErrorSS / static_cast<double>(kPrintedErrorDf);
  const std::array<double, 9> ms{13.176, 21676.552, 75.183, 4.055, 46.741,
                                 .371,   12.600,    .594,   .196};
  const std::array<double, 9> f{60.866, 100137.437, 347.319, 18.733, 215.926,
                                1.715,  58.209,     2.745,   0.906};
  bool ok = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const double rel = std::abs(ms[i] / mse - f[i]) / f[i];
    worst = std::max(worst, rel);
    ok = ok && rel <= 0.005;
  }
  const bool printed_sum = std::abs(513.847 + kPrintedErrorSS - 18410.989) / 18410.989 <= 1e-8;
  ok = ok && printed_sum;

  // The engine's model SS plus error SS must reproduce the corrected total.
  std::mt19937_64 rng(20240611);
  double worst_identity = 0.0;
  const std::array<std::string, 3> names{"a", "b", "c"};
  for (int trial = 0; trial < 50; ++trial) {
    const std::array<std::size_t, 3> counts{2, 3, 2};
    const auto d = testing::random_dataset(FactorLayout::from_counts(names, counts), rng, 2, 8);
    const auto t = type3_anova(d, 3);
    const double lhs = t.row("Corrected Model").ss + t.error().ss;
    const double rhs = t.row("Corrected Total").ss;
    worst_identity = std::max(worst_identity, std::abs(lhs - rhs) / rhs);
  }
  ok = ok && worst_identity <= 1e-8;
  return {ok, fmt::format("max |MS/MSE - F|/F = {:.2e}; printed SS sum {}; engine additivity "
                          "max rel err {:.1e}",
                          worst, printed_sum ? "holds" : "fails", worst_identity)};
}

Outcome scheffe_std_errors() {
  struct Pair {
    std::size_t factor, i, j;
    double printed;
  };
  const std::vector<Pair> pairs{
      {kAgeGroup, 0, 1, .00782}, {kAgeGroup, 0, 2, .00729}, {kAgeGroup, 0, 3, .00644},
      {kAgeGroup, 0, 4, .00640}, {kAgeGroup, 1, 2, .00686}, {kAgeGroup, 1, 3, .00594},
      {kAgeGroup, 1, 4, .00590}, {kAgeGroup, 2, 3, .00523}, {kAgeGroup, 2, 4, .00519},
      {kAgeGroup, 3, 4, .00389}, {kSeason, 0, 1, .00446},   {kSeason, 0, 2, .00459},
      {kSeason, 0, 3, .00456},   {kSeason, 1, 2, .00461},   {kSeason, 1, 3, .00458},
      {kSeason, 2, 3, .00470},
  };
  bool ok = true;
  double worst = 0.0;
  for (const auto& p : pairs) {
    const auto levels = reference_levels(p.factor, {});
    const auto c = scheffe_compare(los_layout().factor(p.factor).name, levels, p.i, p.j,
                                   reference_settings());
    worst = std::max(worst, std::abs(c.std_error - p.printed));
    ok = ok && std::abs(c.std_error - p.printed) <= 0.0001;
  }
  return {ok, fmt::format("{} pairs, max |SE - printed| = {:.2e}", pairs.size(), worst)};
}

Outcome scheffe_inference() {
  // Only the difference enters; the other level means are irrelevant.
  std::vector<double> age_means(5, 0.0);
  age_means[4] = 0.0199;
  const auto ages = reference_levels(kAgeGroup, age_means);
  const auto c15 = scheffe_compare("age_group", ages, 0, 4, reference_settings());

  std::vector<double> season_means(4, 0.0);
  season_means[2] = 0.0089;
  const auto seasons = reference_levels(kSeason, season_means);
  const auto caw = scheffe_compare("season", seasons, 2, 3, reference_settings());

  const bool ok = std::abs(c15.p - 0.047) <= 0.005 && std::abs(c15.lower + 0.0396) <= 0.0005 &&
                  std::abs(c15.upper + 0.0002) <= 0.0005 && std::abs(caw.p - 0.306) <= 0.01;
  return {ok, fmt::format("age 1-5: p = {:.4f}, CI = ({:.5f}, {:.5f}); autumn-winter: p = {:.4f}",
                          c15.p, c15.lower, c15.upper, caw.p)};
}

std::string describe(const HomogeneousSubsets& h, std::span<const LevelSummary> levels) {
  std::string out;
  for (const auto& s : h.subsets) {
    out += "{";
    for (std::size_t i = 0; i < s.levels.size(); ++i) out += (i ? "," : "") + levels[s.levels[i]].level;
    out += "}";
  }
  return out;
}

Outcome subset_structure() {
  const std::array<double, 5> age_means{0.547, 0.706, 0.749, 0.618, 0.567};
  const auto ages = reference_levels(kAgeGroup, age_means);
  const auto age_sets =
      homogeneous_subsets(scheffe_pairwise("age_group", ages, reference_settings()), ages, 0.05);

  const std::array<double, 4> season_means{0.593, 0.616, 0.642, 0.633};
  const auto seasons = reference_levels(kSeason, season_means);
  const auto season_sets = homogeneous_subsets(
      scheffe_pairwise("season", seasons, reference_settings()), seasons, 0.05);

  const auto a = describe(age_sets, ages);
  const auto s = describe(season_sets, seasons);
  const bool ok = a == "{1}{5}{4}{2}{3}" && s == "{spring}{summer}{winter,autumn}";
  return {ok, fmt::format("age groups {}; seasons {}", a, s)};
}

Outcome type3_oracle() {
  std::mt19937_64 rng(7031);
  double worst = 0.0;
  int datasets = 0;
  auto check = [&](const FactorLayout& layout, std::size_t lo, std::size_t hi) {
    const auto d = testing::random_dataset(layout, rng, lo, hi);
    const auto table = type3_anova(d, layout.factor_count());
    const auto terms = testing::hierarchy_terms(layout.factor_count());
    const auto spec = ModelSpec::factorial(layout, layout.factor_count(), Coding::deviation);
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const double oracle = testing::brute_force_type3(d, terms, t);
      const double ss = table.row(spec.term_label(t)).ss;
      worst = std::max(worst, std::abs(ss - oracle) / std::max(std::abs(oracle), 1e-12));
    }
    ++datasets;
  };
  const std::array<std::string, 2> n2{"a", "b"};
  const std::array<std::size_t, 2> c2{2, 2};
  const std::array<std::string, 3> n3{"a", "b", "c"};
  const std::array<std::size_t, 3> c3{2, 3, 2};
  for (int i = 0; i < 100; ++i) check(FactorLayout::from_counts(n2, c2), 2, 15);
  for (int i = 0; i < 100; ++i) check(FactorLayout::from_counts(n3, c3), 2, 5);

  double worst_balanced = 0.0;
  for (int i = 0; i < 40; ++i) {
    const auto layout = i % 2 ? FactorLayout::from_counts(n2, c2) : FactorLayout::from_counts(n3, c3);
    const auto d = testing::balanced_dataset(layout, rng, 3 + static_cast<std::size_t>(i % 3));
    const auto table = type3_anova(d, layout.factor_count());
    const auto terms = testing::hierarchy_terms(layout.factor_count());
    const auto spec = ModelSpec::factorial(layout, layout.factor_count(), Coding::deviation);
    const double scale = table.row("Corrected Total").ss;
    for (std::size_t t = 1; t < terms.size(); ++t) {
      const double seq = testing::sequential_ss(d, terms, t);
      worst_balanced =
          std::max(worst_balanced, std::abs(table.row(spec.term_label(t)).ss - seq) / scale);
    }
  }
  const bool ok = worst <= 1e-8 && worst_balanced <= 1e-10;
  return {ok, fmt::format("{} unbalanced datasets, max rel err {:.1e}; balanced Type III vs "
                          "sequential max rel err {:.1e}",
                          datasets, worst, worst_balanced)};
}

Outcome distribution_suite() {
  using namespace special;
  double symmetry = 0.0;
  for (double a : {0.5, 1.0, 2.5, 7.0, 40.0}) {
    for (double b : {0.7, 1.5, 3.0, 12.0, 180.0}) {
      for (double x : {0.01, 0.2, 0.5, 0.77, 0.99}) {
        symmetry = std::max(symmetry,
                            std::abs(reg_inc_beta(x, a, b) - (1.0 - reg_inc_beta(1.0 - x, b, a))));
      }
    }
  }

  double round_trip = 0.0;
  for (double p : {1e-4, 0.01, 0.05, 0.3, 0.5, 0.8, 0.95, 0.99, 0.9999}) {
    for (auto [n1, n2] : std::vector<std::pair<double, double>>{{1, 5}, {3, 360}, {4, 82678},
                                                               {12, 40}, {39, 82678}}) {
      round_trip = std::max(round_trip, std::abs(f_cdf(f_quantile(p, FDist(n1, n2)), FDist(n1, n2)) - p));
    }
    for (double nu : {1.0, 4.0, 30.0, 1e4}) {
      round_trip = std::max(round_trip, std::abs(t_cdf(t_quantile(p, nu), nu) - p));
    }
    round_trip = std::max(round_trip, std::abs(normal_cdf(normal_quantile(p)) - p));
  }

  double reduction = 0.0;
  for (auto [n1, n2] : std::vector<std::pair<double, double>>{{3, 360}, {1, 10}, {12, 1680}}) {
    for (double x : {0.1, 1.0, 2.5, 6.0}) {
      reduction = std::max(reduction,
                           std::abs(noncentral_f_cdf(x, FDist(n1, n2, 0.0)) - f_cdf(x, FDist(n1, n2))));
    }
  }

  struct McCase {
    double nu1, nu2, lambda, x;
  };
  const std::vector<McCase> cases{
      {3, 360, 0.0, 2.5},
      {3, 360, 4 * 1.328, f_quantile(0.99, FDist(3, 360))},
      {3, 1680, 4 * 5.7104, f_quantile(0.99, FDist(3, 1680))},
      {4, 120, 12.0, 3.0},
  };
  double worst_z = 0.0;
  std::uint64_t seed = 99;
  for (const auto& c : cases) {
    testing::FSampler sampler(c.nu1, c.nu2, c.lambda, seed++);
    const auto mc = testing::monte_carlo_cdf(sampler, c.x, 10'000'000);
    const double exact = c.lambda == 0.0 ? f_cdf(c.x, FDist(c.nu1, c.nu2))
                                         : noncentral_f_cdf(c.x, FDist(c.nu1, c.nu2, c.lambda));
    worst_z = std::max(worst_z, std::abs(mc.p - exact) / mc.se);
  }

  const bool ok = symmetry <= 1e-10 && round_trip <= 1e-7 && reduction <= 1e-12 && worst_z <= 3.0;
  return {ok, fmt::format("beta symmetry {:.1e}; round trip {:.1e}; lambda=0 reduction {:.1e}; "
                          "Monte Carlo max |z| {:.2f} over {} cases",
                          symmetry, round_trip, reduction, worst_z, cases.size())};
}

int run_cli(const std::vector<std::string>& args, std::string& out, std::string& err) {
  std::vector<const char*> argv{"losdoe"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int rc = cli::cli_main(static_cast<int>(argv.size()), argv.data(), o, e);
  out = o.str();
  err = e.str();
  return rc;
}

std::map<std::string, double> verdict_p_values(const nlohmann::json& doc) {
  std::map<std::string, double> p;
  for (const auto& table : doc["tables"]) {
    if (table["name"] != "verdicts") continue;
    for (const auto& row : table["rows"]) p[row[0].get<std::string>()] = row[1].get<double>();
  }
  return p;
}

// Each seeded run: synth, then the auto-transform report (timed), then the
// Type III ANOVA of the same cohort on the log10 scale.
Outcome end_to_end() {
  const fs::path root = fs::temp_directory_path() / "losdoe_acceptance_e2e";
  fs::remove_all(root);
  fs::create_directories(root);

  constexpr int kRuns = 20;
  constexpr std::uint64_t kExampleSeed = 7;
  const std::array<const char*, 4> kEffects{"age_group", "season", "gender", "age_group * gender"};
  std::array<int, 4> effect_hits{};
  int all_four = 0;
  int log_runs = 0;
  int slope_runs = 0;
  double slowest = 0.0;
  bool all_completed = true;
  bool example_ok = false;
  std::string example = fmt::format("seed {}: did not complete", kExampleSeed);
  std::string slopes;
  for (int run = 0; run < kRuns; ++run) {
    const std::uint64_t seed = static_cast<std::uint64_t>(run) + 1;
    const auto csv = (root / fmt::format("cohort_{}.csv", seed)).string();
    const auto dir = (root / fmt::format("report_{}", seed)).string();
    std::string out, err;
    const auto start = Clock::now();
    int rc = run_cli({"synth", "--n", "8000", "--seed", std::to_string(seed), "--out", csv}, out,
                     err);
    if (rc == 0) rc = run_cli({"report", "--input", csv, "--transform", "auto", "--out", dir}, out, err);
    const double t = seconds_since(start);
    slowest = std::max(slowest, t);
    if (rc != 0 || t >= 10.0) {
      all_completed = false;
      continue;
    }

    std::ifstream mf(fs::path(dir) / "manifest.json");
    const auto manifest = nlohmann::json::parse(mf);
    const bool is_log = manifest["transform"] == "log10";
    const double slope = manifest["sd_mean_slope"].get<double>();
    const bool slope_ok = std::abs(slope - 1.0) <= 0.1;
    log_runs += is_log;
    slope_runs += slope_ok;
    slopes += fmt::format("{}{:.2f}", run ? " " : "", slope);
    if (seed == kExampleSeed) {
      example_ok = is_log && slope_ok;
      example = fmt::format("seed {}: transform {}, slope {:.3f}", seed,
                            manifest["transform"].get<std::string>(), slope);
    }

    if (run_cli({"anova", "--input", csv, "--transform", "log10", "--format", "json"}, out, err) != 0) {
      all_completed = false;
      continue;
    }
    auto p = verdict_p_values(nlohmann::json::parse(out));
    bool every = true;
    for (std::size_t e = 0; e < kEffects.size(); ++e) {
      const bool sig = p.count(kEffects[e]) && p[kEffects[e]] < 0.01;
      effect_hits[e] += sig;
      every = every && sig;
    }
    all_four += every;
  }
  fs::remove_all(root);

  const bool significance_ok = all_four * 100 >= 95 * kRuns;
  const bool ok = all_completed && example_ok && significance_ok;
  return {ok, fmt::format("{}{}; auto chose log10 in {}/{} runs, slope within 1.0+-0.1 in {}/{}; "
                          "log10 ANOVA p < 0.01 for all four effects in {}/{} runs (age_group {}, "
                          "season {}, gender {}, age_group*gender {}); slowest run {:.2f} s; "
                          "slopes [{}]",
                          example, example_ok ? "" : " (out of band)", log_runs, kRuns, slope_runs,
                          kRuns, all_four, kRuns, effect_hits[0], effect_hits[1], effect_hits[2],
                          effect_hits[3], slowest, slopes)};
}

struct Criterion {
  const char* title;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"planning table phi column", phi_column},
      {"planning table beta column and power at n=43", beta_column},
      {"ANOVA df column from cell counts", df_column},
      {"ANOVA F column consistency and SS additivity", anova_consistency},
      {"Scheffe standard errors from marginal counts", scheffe_std_errors},
      {"Scheffe p-values and simultaneous intervals", scheffe_inference},
      {"homogeneous subset structure", subset_structure},
      {"Type III SS against brute-force least squares", type3_oracle},
      {"distribution property suite", distribution_suite},
      {"end-to-end synthetic replication", end_to_end},
  };
  return all;
}

bool report(std::size_t index) {
  const auto& c = criteria()[index];
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o = {false, fmt::format("exception: {}", e.what())};
  }
  std::cout << fmt::format("{} c{:02} {}: {}\n", o.pass ? "PASS" : "FAIL", index + 1, c.title,
                           o.detail)
            << std::flush;
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc == 3 && std::string(argv[1]) == "--criterion") {
    const long n = std::strtol(argv[2], nullptr, 10);
    if (n < 1 || n > static_cast<long>(criteria().size())) {
      std::cerr << "criterion must be 1.." << criteria().size() << "\n";
      return 2;
    }
    return report(static_cast<std::size_t>(n - 1)) ? 0 : 1;
  }
  if (argc != 1) {
    std::cerr << "usage: losdoe_acceptance [--criterion N]\n";
    return 2;
  }
  bool all = true;
  for (std::size_t i = 0; i < criteria().size(); ++i) all = report(i) && all;
  return all ? 0 : 1;
}
