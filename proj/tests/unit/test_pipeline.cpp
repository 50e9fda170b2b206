#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "losdoe/error.hpp"
#include "losdoe/los.hpp"
#include "losdoe/pipeline.hpp"
#include "losdoe/synth.hpp"

namespace losdoe {
namespace {

namespace fs = std::filesystem;

Dataset cohort(std::size_t n, std::uint64_t seed) {
  auto spec = default_cohort_spec();
  spec.n = n;
  spec.seed = seed;
  return generate(spec);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Analyze, LogTransformPipeline) {
  AnalysisOptions options;
  options.transform = Transform::log10;
  const auto r = analyze(cohort(4000, 3), options);
  EXPECT_EQ(r.transform, Transform::log10);
  EXPECT_FALSE(r.transform_selected_automatically);
  ASSERT_TRUE(r.recommendation);
  EXPECT_EQ(r.analyzed.response_name(), "log10(los)");
  EXPECT_EQ(r.anova.error().df, 4000 - 40);
  EXPECT_EQ(r.fit.coefficients.rows.size(), 40u);
  EXPECT_EQ(r.residuals.size(), 4000u);
  ASSERT_EQ(r.posthoc.size(), 2u);
  EXPECT_EQ(r.posthoc[0].factor, kAgeGroup);
  EXPECT_EQ(r.posthoc[1].factor, kSeason);
  EXPECT_EQ(r.posthoc[0].comparisons.size(), 20u);
  EXPECT_NEAR(*r.anova.error().ms, 0.216, 0.02);
}

TEST(Analyze, AutomaticSelection) {
  const auto r = analyze(cohort(4000, 4));
  EXPECT_TRUE(r.transform_selected_automatically);
  ASSERT_TRUE(r.recommendation);
  EXPECT_EQ(r.transform, r.recommendation->transform);
}

TEST(Analyze, MainEffectsOnly) {
  AnalysisOptions options;
  options.transform = Transform::log10;
  options.max_order = 1;
  const auto r = analyze(cohort(2000, 5), options);
  EXPECT_EQ(r.anova.effects().size(), 3u);
  EXPECT_EQ(r.anova.error().df, 2000 - 9);
}

TEST(Analyze, RejectsTransformedInput) {
  const auto d = apply_transform(cohort(500, 6), Transform::log10);
  EXPECT_THROW(analyze(d), InputError);
}

TEST(ReportTables, Order) {
  AnalysisOptions options;
  options.transform = Transform::log10;
  const auto tables = report_tables(analyze(cohort(3000, 7), options));
  std::vector<std::string> names;
  for (const auto& t : tables) names.push_back(t.name);
  EXPECT_EQ(names, (std::vector<std::string>{"frequency", "transform", "anova", "verdicts",
                                             "coefficients", "scheffe_age_group",
                                             "subsets_age_group", "scheffe_season",
                                             "subsets_season"}));
}

TEST(WriteReport, BundleIsCompleteAndDeterministic) {
  AnalysisOptions options;
  options.transform = Transform::log10;
  const auto r = analyze(cohort(3000, 8), options);
  const auto a = fs::temp_directory_path() / "losdoe_report_a";
  const auto b = fs::temp_directory_path() / "losdoe_report_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const auto artifacts = write_report(r, a);
  write_report(r, b);
  EXPECT_EQ(artifacts.size(), 9u * 3 + 1 + 6 + 1);
  for (const auto& rel : artifacts) {
    ASSERT_TRUE(fs::exists(a / rel)) << rel;
    EXPECT_EQ(slurp(a / rel), slurp(b / rel)) << rel;
  }
  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  EXPECT_EQ(manifest["transform"], "log10");
  EXPECT_EQ(manifest["observations"], 3000);
  EXPECT_EQ(manifest["error_df"], 2960);
  EXPECT_EQ(manifest["artifacts"].size(), artifacts.size());
  EXPECT_NE(slurp(a / "plots" / "residual_pp.svg").find("class=\"identity\""), std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

}  // namespace
}  // namespace losdoe
