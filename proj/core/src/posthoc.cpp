#include "losdoe/posthoc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include <fmt/format.h>

#include "losdoe/error.hpp"
#include "losdoe/special.hpp"

namespace losdoe {

namespace {

void check_settings(const ScheffeSettings& s) {
  if (!(s.mse > 0.0) || !std::isfinite(s.mse)) throw InputError("Scheffe: mse must be positive");
  if (s.df_error < 1) throw InputError("Scheffe: df_error must be at least 1");
  if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw InputError("Scheffe: alpha must be in (0, 1)");
}

}  // namespace

std::vector<LevelSummary> marginal_means(const Dataset& d, std::size_t factor) {
  const auto& f = d.layout().factor(factor);
  std::vector<LevelSummary> out;
  std::vector<double> sums(f.levels.size(), 0.0);
  for (const auto& level : f.levels) out.push_back({level, 0, 0.0});
  for (const auto& o : d.observations()) {
    ++out[o.levels[factor]].n;
    sums[o.levels[factor]] += o.response;
  }
  for (std::size_t l = 0; l < out.size(); ++l) {
    if (out[l].n > 0) out[l].mean = sums[l] / static_cast<double>(out[l].n);
  }
  return out;
}

ScheffeComparison scheffe_compare(std::string factor, std::span<const LevelSummary> levels,
                                  std::size_t i, std::size_t j, const ScheffeSettings& s) {
  check_settings(s);
  const std::size_t k = levels.size();
  if (k < 2) throw InputError(fmt::format("factor '{}' needs at least 2 levels", factor));
  if (i >= k || j >= k) throw InputError("Scheffe: level index out of range");
  for (auto l : {i, j}) {
    if (levels[l].n == 0) {
      throw InputError(
          fmt::format("factor '{}' level '{}' has no observations", factor, levels[l].level));
    }
  }
  const double q = static_cast<double>(k - 1);
  const special::FDist dist(q, static_cast<double>(s.df_error));

  ScheffeComparison c;
  c.factor = std::move(factor);
  c.i = i;
  c.j = j;
  c.level_i = levels[i].level;
  c.level_j = levels[j].level;
  c.difference = levels[i].mean - levels[j].mean;
  c.std_error = std::sqrt(s.mse * (1.0 / static_cast<double>(levels[i].n) +
                                   1.0 / static_cast<double>(levels[j].n)));
  const double stat = c.difference * c.difference / (q * c.std_error * c.std_error);
  c.p = i == j ? 1.0 : special::f_sf(stat, dist);
  const double half = std::sqrt(q * special::f_quantile(1.0 - s.alpha, dist)) * c.std_error;
  c.lower = c.difference - half;
  c.upper = c.difference + half;
  return c;
}

std::vector<ScheffeComparison> scheffe_pairwise(std::string factor,
                                                std::span<const LevelSummary> levels,
                                                const ScheffeSettings& s) {
  if (levels.size() < 2) {
    throw InputError(fmt::format("factor '{}' needs at least 2 levels", factor));
  }
  std::vector<ScheffeComparison> out;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    for (std::size_t j = 0; j < levels.size(); ++j) {
      if (i != j) out.push_back(scheffe_compare(factor, levels, i, j, s));
    }
  }
  return out;
}

std::vector<ScheffeComparison> scheffe_pairwise(const Dataset& d, std::size_t factor,
                                                const ScheffeSettings& s) {
  const auto levels = marginal_means(d, factor);
  return scheffe_pairwise(d.layout().factor(factor).name, levels, s);
}

HomogeneousSubsets homogeneous_subsets(std::span<const ScheffeComparison> comparisons,
                                       std::span<const LevelSummary> levels, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("subsets: alpha must be in (0, 1)");
  const std::size_t k = levels.size();
  if (k == 0) throw InputError("subsets: no levels");

  std::vector<std::vector<std::optional<double>>> p(k, std::vector<std::optional<double>>(k));
  std::string factor;
  for (const auto& c : comparisons) {
    if (c.i >= k || c.j >= k) throw InputError("subsets: comparison level index out of range");
    p[c.i][c.j] = c.p;
    p[c.j][c.i] = c.p;
    factor = c.factor;
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      if (!p[a][b]) {
        throw InputError(fmt::format("subsets: no comparison for levels '{}' and '{}'",
                                     levels[a].level, levels[b].level));
      }
    }
  }

  HomogeneousSubsets out;
  out.factor = factor;
  out.alpha = alpha;
  out.significance_convention = "minimum pairwise Scheffe p within the subset; 1 for singletons";
  out.order.resize(k);
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) {
    return levels[a].mean < levels[b].mean;
  });

  // end[s]: last sorted position reachable from s with every pair homogeneous.
  std::vector<std::size_t> end(k);
  for (std::size_t s = 0; s < k; ++s) {
    std::size_t e = s;
    while (e + 1 < k) {
      bool ok = true;
      for (std::size_t m = s; m <= e && ok; ++m) ok = *p[out.order[m]][out.order[e + 1]] > alpha;
      if (!ok) break;
      ++e;
    }
    end[s] = e;
  }
  for (std::size_t s = 0; s < k; ++s) {
    if (s > 0 && end[s] <= end[s - 1]) continue;
    Subset sub;
    for (std::size_t m = s; m <= end[s]; ++m) {
      sub.levels.push_back(out.order[m]);
      sub.means.push_back(levels[out.order[m]].mean);
      for (std::size_t r = s; r < m; ++r) {
        sub.significance = std::min(sub.significance, *p[out.order[r]][out.order[m]]);
      }
    }
    out.subsets.push_back(std::move(sub));
  }
  return out;
}

}  // namespace losdoe
