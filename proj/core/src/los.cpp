#include "losdoe/los.hpp"

#include <array>

#include <fmt/format.h>

#include "losdoe/error.hpp"

namespace losdoe {

FactorLayout los_layout() {
  return FactorLayout({
      {"age_group", {"1", "2", "3", "4", "5"}},
      {"season", {"spring", "summer", "autumn", "winter"}},
      {"gender", {"male", "female"}},
  });
}

std::vector<std::size_t> los_reference_counts() {
  // [gender][season][age_group], as tabulated by gender and season rows.
  constexpr std::array<std::array<std::array<std::size_t, 5>, 4>, 2> table{{
      {{{964, 1120, 1519, 4073, 4782},
        {1018, 1369, 1748, 4083, 3850},
        {934, 1235, 1578, 3710, 3382},
        {776, 1233, 1638, 3856, 3642}}},
      {{{735, 644, 993, 3055, 4078},
        {718, 868, 1284, 3215, 3411},
        {679, 673, 1135, 2941, 3107},
        {609, 733, 1169, 2957, 3204}}},
  }};
  const auto layout = los_layout();
  std::vector<std::size_t> counts(layout.cell_count());
  for (std::size_t g = 0; g < 2; ++g) {
    for (std::size_t s = 0; s < 4; ++s) {
      for (std::size_t a = 0; a < 5; ++a) {
        const std::array<std::size_t, 3> levels{a, s, g};
        counts[layout.cell_index(levels)] = table[g][s][a];
      }
    }
  }
  return counts;
}

std::vector<std::pair<std::string, double>> los_reference_coefficients() {
  // No gender main term: the gender effect is carried by the interactions.
  return {
      {"Intercept", 0.573},
      {"age_group(2)", 0.161},
      {"age_group(3)", 0.091},
      {"season(1)", -0.037},
      {"season(2)", -0.032},
      {"age_group(2)*season(2)", -0.056},
      {"age_group(3)*gender(1)", 0.133},
      {"age_group(4)*gender(1)", 0.053},
  };
}

std::size_t age_group_for(long age_years) {
  if (age_years < 1) {
    throw InputError(fmt::format("age {} is below the first age group (1-10)", age_years));
  }
  if (age_years <= 10) return 0;
  if (age_years <= 25) return 1;
  if (age_years <= 40) return 2;
  if (age_years <= 60) return 3;
  return 4;
}

}  // namespace losdoe
