#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "losdoe/error.hpp"
#include "losdoe/los.hpp"
#include "losdoe/model.hpp"

namespace losdoe {
namespace {

std::vector<RawRow> reference_rows() {
  const auto layout = los_layout();
  const auto counts = los_reference_counts();
  std::vector<RawRow> rows;
  for (std::size_t c = 0; c < layout.cell_count(); ++c) {
    const auto levels = layout.cell_levels(c);
    RawRow r;
    for (std::size_t f = 0; f < levels.size(); ++f) r.levels.push_back(layout.factor(f).levels[levels[f]]);
    r.response = 1.0;
    rows.insert(rows.end(), counts[c], r);
  }
  return rows;
}

TEST(FactorLayout, CellIndexRoundTrip) {
  const auto layout = los_layout();
  EXPECT_EQ(layout.cell_count(), 40u);
  for (std::size_t c = 0; c < layout.cell_count(); ++c) {
    EXPECT_EQ(layout.cell_index(layout.cell_levels(c)), c);
  }
}

TEST(FactorLayout, LastFactorVariesFastest) {
  const auto layout = los_layout();
  EXPECT_EQ(layout.cell_levels(1), (std::vector<std::size_t>{0, 0, 1}));
  EXPECT_EQ(layout.cell_levels(2), (std::vector<std::size_t>{0, 1, 0}));
}

TEST(FactorLayout, RejectsBadFactors) {
  EXPECT_THROW(FactorLayout(std::vector<Factor>{{"a", {"x"}}}), InputError);
  EXPECT_THROW(FactorLayout(std::vector<Factor>{{"a", {"x", "y"}}, {"a", {"p", "q"}}}), InputError);
  EXPECT_THROW(FactorLayout(std::vector<Factor>{{"a", {"x", "x"}}}), InputError);
  EXPECT_THROW(los_layout().factor_index("ward"), InputError);
}

TEST(BuildDataset, MinimalConstruction) {
  const std::vector<RawRow> rows{{{"1", "spring", "male"}, 3.0}, {{"5", "winter", "female"}, 7.0}};
  const auto d = build_dataset(los_layout(), rows);
  EXPECT_EQ(d.size(), 2u);
  EXPECT_EQ(d.observation(1).levels, (std::vector<std::size_t>{4, 3, 1}));
}

TEST(BuildDataset, UnknownLevelIsRejected) {
  const std::vector<RawRow> rows{{{"1", "fall", "male"}, 3.0}};
  try {
    build_dataset(los_layout(), rows);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("fall"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
  }
}

TEST(BuildDataset, RejectsEmptyAndNonPositive) {
  EXPECT_THROW(build_dataset(los_layout(), std::vector<RawRow>{}), InputError);
  const std::vector<RawRow> zero{{{"1", "spring", "male"}, 0.0}};
  EXPECT_THROW(build_dataset(los_layout(), zero), InputError);
  const std::vector<RawRow> nan{{{"1", "spring", "male"}, std::nan("")}};
  EXPECT_THROW(build_dataset(los_layout(), nan), InputError);
  DatasetOptions transformed;
  transformed.raw_scale = false;
  EXPECT_NO_THROW(build_dataset(los_layout(), zero, transformed));
}

TEST(BuildDataset, PreservesRowOrder) {
  std::vector<RawRow> rows;
  for (int i = 0; i < 10; ++i) rows.push_back({{"2", "summer", "female"}, 1.0 + i});
  const auto d = build_dataset(los_layout(), rows);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(d.observation(i).response, 1.0 + i);
}

TEST(CellStats, ConstantCellHasZeroSd) {
  const std::vector<RawRow> rows(3, RawRow{{"1", "spring", "male"}, 2.0});
  const auto stats = cell_stats(build_dataset(los_layout(), rows));
  ASSERT_EQ(stats.size(), 1u);
  EXPECT_EQ(stats[0].mean, 2.0);
  ASSERT_TRUE(stats[0].sd);
  EXPECT_EQ(*stats[0].sd, 0.0);
}

TEST(CellStats, TwoPointCell) {
  const std::vector<RawRow> rows{{{"1", "spring", "male"}, 1.0}, {{"1", "spring", "male"}, 3.0}};
  const auto stats = cell_stats(build_dataset(los_layout(), rows));
  ASSERT_EQ(stats.size(), 1u);
  EXPECT_DOUBLE_EQ(stats[0].mean, 2.0);
  EXPECT_NEAR(*stats[0].sd, std::sqrt(2.0), 1e-15);
}

TEST(CellStats, SingletonHasNoSd) {
  const std::vector<RawRow> rows{{{"1", "spring", "male"}, 1.0}};
  EXPECT_FALSE(cell_stats(build_dataset(los_layout(), rows))[0].sd);
}

TEST(CellStats, FortyCellsOnFullLayout) {
  const auto d = build_dataset(los_layout(), reference_rows());
  const auto stats = cell_stats(d);
  EXPECT_EQ(stats.size(), 40u);
  for (std::size_t i = 1; i < stats.size(); ++i) {
    EXPECT_LT(los_layout().cell_index(stats[i - 1].cell), los_layout().cell_index(stats[i].cell));
  }
}

TEST(FrequencyTable, ReferenceCohortMarginals) {
  const auto freq = frequency_table(build_dataset(los_layout(), reference_rows()));
  const std::size_t gender = kGender;
  const auto by_gender = freq.margin(std::span<const std::size_t>(&gender, 1));
  EXPECT_EQ(by_gender, (std::vector<std::size_t>{46510, 36208}));
  EXPECT_EQ(freq.total(), 82718u);
  EXPECT_EQ(freq.empty_cells(), 0u);
}

TEST(FrequencyTable, MinimumCellIsWinterFemaleGroup1) {
  const FrequencyTable freq(los_layout(), los_reference_counts());
  const std::vector<std::size_t> cell{0, 3, 1};
  EXPECT_EQ(freq.count(cell), 609u);
  const auto counts = freq.cell_counts();
  EXPECT_EQ(*std::min_element(counts.begin(), counts.end()), 609u);
}

TEST(FrequencyTable, SingleObservation) {
  const std::vector<RawRow> rows{{{"3", "autumn", "female"}, 4.0}};
  const auto freq = frequency_table(build_dataset(los_layout(), rows));
  for (std::size_t f = 0; f < 3; ++f) {
    const auto m = freq.margin(std::span<const std::size_t>(&f, 1));
    EXPECT_EQ(std::accumulate(m.begin(), m.end(), std::size_t{0}), 1u);
    EXPECT_EQ(*std::max_element(m.begin(), m.end()), 1u);
  }
}

TEST(FrequencyTable, MatchesRecount) {
  std::mt19937_64 rng(5);
  const auto layout = los_layout();
  std::uniform_int_distribution<std::size_t> cell(0, layout.cell_count() - 1);
  std::vector<Observation> obs;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> oracle;  // (age, season)
  for (int i = 0; i < 100; ++i) {
    const auto levels = layout.cell_levels(cell(rng));
    ++oracle[{levels[0], levels[1]}];
    obs.push_back({levels, 1.0});
  }
  const auto freq = frequency_table(Dataset(layout, obs, "y"));
  const std::vector<std::size_t> factors{kAgeGroup, kSeason};
  const auto m = freq.margin(factors);
  for (std::size_t a = 0; a < 5; ++a) {
    for (std::size_t s = 0; s < 4; ++s) {
      const auto it = oracle.find({a, s});
      EXPECT_EQ(m[a * 4 + s], it == oracle.end() ? 0u : it->second);
    }
  }
  EXPECT_EQ(freq.margin({}), (std::vector<std::size_t>{100}));
}

TEST(Transform, NamesRoundTrip) {
  for (auto t : {Transform::none, Transform::square_root, Transform::log10,
                 Transform::reciprocal_sqrt, Transform::reciprocal}) {
    EXPECT_EQ(parse_transform(transform_name(t)), t);
  }
  EXPECT_EQ(parse_transform("log"), Transform::log10);
  EXPECT_THROW(parse_transform("cube"), InputError);
}

TEST(AgeGroups, Binning) {
  EXPECT_EQ(age_group_for(1), 0u);
  EXPECT_EQ(age_group_for(10), 0u);
  EXPECT_EQ(age_group_for(11), 1u);
  EXPECT_EQ(age_group_for(25), 1u);
  EXPECT_EQ(age_group_for(26), 2u);
  EXPECT_EQ(age_group_for(40), 2u);
  EXPECT_EQ(age_group_for(60), 3u);
  EXPECT_EQ(age_group_for(61), 4u);
  EXPECT_EQ(age_group_for(104), 4u);
  EXPECT_THROW(age_group_for(0), InputError);
}

}  // namespace
}  // namespace losdoe
