#include "losdoe/power.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "losdoe/special.hpp"

namespace losdoe {

namespace {

std::string trim_copy(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

EffectKind EffectId::kind() const {
  switch (factors.size()) {
    case 1: return EffectKind::main;
    case 2: return EffectKind::two_way;
    case 3: return EffectKind::three_way;
    default: return EffectKind::higher;
  }
}

std::string EffectId::label(const FactorLayout& layout) const {
  std::string out;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) out += " * ";
    out += layout.factor(factors[i]).name;
  }
  return out;
}

EffectId EffectId::parse(const FactorLayout& layout, std::string_view text) {
  EffectId id;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find_first_of("*:", start);
    const auto piece = trim_copy(text.substr(start, end == std::string_view::npos
                                                        ? std::string_view::npos
                                                        : end - start));
    if (piece.empty()) throw InputError(fmt::format("malformed effect '{}'", text));
    id.factors.push_back(layout.factor_index(piece));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  std::sort(id.factors.begin(), id.factors.end());
  if (std::adjacent_find(id.factors.begin(), id.factors.end()) != id.factors.end()) {
    throw InputError(fmt::format("effect '{}' repeats a factor", text));
  }
  return id;
}

std::vector<EffectId> all_effects(const FactorLayout& layout, std::size_t max_order) {
  const std::size_t f = layout.factor_count();
  std::vector<EffectId> out;
  for (std::size_t order = 1; order <= std::min(max_order, f); ++order) {
    // Subsets of size `order` in lexicographic order.
    std::vector<std::size_t> pick(order);
    for (std::size_t i = 0; i < order; ++i) pick[i] = i;
    while (true) {
      out.push_back(EffectId{pick});
      std::size_t i = order;
      while (i > 0 && pick[i - 1] == f - order + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < order; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return out;
}

void PowerSpec::validate() const {
  if (layout.factor_count() == 0) throw InputError("power: layout has no factors");
  if (effect.factors.empty()) throw InputError("power: effect names no factors");
  for (std::size_t i = 0; i < effect.factors.size(); ++i) {
    if (effect.factors[i] >= layout.factor_count()) {
      throw InputError("power: effect factor index out of range");
    }
    if (i && effect.factors[i] <= effect.factors[i - 1]) {
      throw InputError("power: effect factor indices must be sorted and distinct");
    }
  }
  if (!(min_difference >= 0.0) || !std::isfinite(min_difference)) {
    throw InputError(fmt::format("power: minimum difference must be >= 0, got {}", min_difference));
  }
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw InputError(fmt::format("power: sigma2 must be positive, got {}", sigma2));
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InputError(fmt::format("power: alpha must be in (0, 1), got {}", alpha));
  }
  if (replications < 2) {
    throw InputError(fmt::format("power: need at least 2 replications, got {}", replications));
  }
  if (phi2_coefficient_decimals && (*phi2_coefficient_decimals < 0 ||
                                    *phi2_coefficient_decimals > 15)) {
    throw InputError("power: phi^2 coefficient decimals must be in [0, 15]");
  }
}

EffectDf effect_dfs(const FactorLayout& layout, const EffectId& effect, long n) {
  long nu1 = 1;
  for (auto f : effect.factors) nu1 *= static_cast<long>(layout.level_count(f)) - 1;
  const long cells = static_cast<long>(layout.cell_count());
  return {nu1, cells * (n - 1)};
}

double phi_squared(const PowerSpec& spec) {
  spec.validate();
  double others = 1.0;
  for (std::size_t f = 0; f < spec.layout.factor_count(); ++f) {
    if (std::find(spec.effect.factors.begin(), spec.effect.factors.end(), f) ==
        spec.effect.factors.end()) {
      others *= static_cast<double>(spec.layout.level_count(f));
    }
  }
  const auto df = effect_dfs(spec.layout, spec.effect, spec.replications);
  double coefficient = others * spec.min_difference * spec.min_difference /
                       (2.0 * spec.sigma2 * static_cast<double>(df.nu1 + 1));
  if (spec.phi2_coefficient_decimals) {
    const double scale = std::pow(10.0, *spec.phi2_coefficient_decimals);
    coefficient = std::round(coefficient * scale) / scale;
  }
  return coefficient * static_cast<double>(spec.replications);
}

PowerResult power_of_test(const PowerSpec& spec) {
  const double phi2 = phi_squared(spec);
  const auto df = effect_dfs(spec.layout, spec.effect, spec.replications);
  PowerResult r;
  r.replications = spec.replications;
  r.phi2 = phi2;
  r.phi = std::sqrt(phi2);
  r.nu1 = df.nu1;
  r.nu2 = df.nu2;
  r.lambda = static_cast<double>(df.nu1 + 1) * phi2;
  const auto nu1 = static_cast<double>(df.nu1);
  const auto nu2 = static_cast<double>(df.nu2);
  r.critical_value = special::f_quantile(1.0 - spec.alpha, special::FDist(nu1, nu2));
  r.beta = special::noncentral_f_cdf(r.critical_value, special::FDist(nu1, nu2, r.lambda));
  r.power = 1.0 - r.beta;
  return r;
}

TargetNotReached::TargetNotReached(long n_max, double best_power)
    : InputError(fmt::format("no replication count up to {} reaches the target power "
                             "(best achieved {:.4f})",
                             n_max, best_power)),
      n_max_(n_max),
      best_power_(best_power) {}

long min_replications(const PowerSpec& spec, double target_power, long n_max) {
  if (!(target_power > 0.0 && target_power < 1.0)) {
    throw InputError(fmt::format("target power must be in (0, 1), got {}", target_power));
  }
  if (n_max < 2) throw InputError(fmt::format("n_max must be at least 2, got {}", n_max));
  auto power_at = [&](long n) {
    PowerSpec s = spec;
    s.replications = n;
    return power_of_test(s).power;
  };

  // Power is nondecreasing in n: gallop to a bracket, then bisect.
  if (power_at(2) >= target_power) return 2;
  long lo = 2;  // power(lo) < target
  long hi = 2;
  while (true) {
    if (hi == n_max) throw TargetNotReached(n_max, power_at(n_max));
    hi = std::min(n_max, hi * 2);
    if (power_at(hi) >= target_power) break;
    lo = hi;
  }
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (power_at(mid) >= target_power) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

ReplicationPlan plan_all_effects(const FactorLayout& layout, const PlanOptions& options) {
  ReplicationPlan plan;
  for (auto& effect : all_effects(layout, layout.factor_count())) {
    PowerSpec spec{layout,          effect,        options.min_difference, options.sigma2,
                   options.alpha,   2,             options.phi2_coefficient_decimals};
    EffectPlan row;
    row.label = effect.label(layout);
    row.replications = min_replications(spec, options.target_power, options.n_max);
    spec.replications = row.replications;
    row.result = power_of_test(spec);
    row.effect = std::move(effect);
    if (row.replications > plan.max_replications) {
      plan.max_replications = row.replications;
      plan.limiting_effect = row.label;
    }
    plan.effects.push_back(std::move(row));
  }
  return plan;
}

std::vector<PowerResult> oc_table(const PowerSpec& spec, std::span<const long> replications) {
  std::vector<PowerResult> rows;
  rows.reserve(replications.size());
  for (long n : replications) {
    PowerSpec s = spec;
    s.replications = n;
    rows.push_back(power_of_test(s));
  }
  return rows;
}

}  // namespace losdoe
