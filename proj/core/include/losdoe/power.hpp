#pragma once

// Power of the fixed-effects F test and replication-count planning for
// balanced factorial layouts.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "losdoe/error.hpp"
#include "losdoe/model.hpp"

namespace losdoe {

enum class EffectKind { main, two_way, three_way, higher };

/// A main effect or interaction, identified by its (sorted, distinct) factor
/// indices.
struct EffectId {
  std::vector<std::size_t> factors;

  EffectKind kind() const;
  std::string label(const FactorLayout& layout) const;  // "season * gender"
  /// Parses "season", "season*gender" or "season:gender".
  static EffectId parse(const FactorLayout& layout, std::string_view text);

  bool operator==(const EffectId&) const = default;
};

/// Every effect up to max_order, mains first, then by order and factor index.
std::vector<EffectId> all_effects(const FactorLayout& layout, std::size_t max_order);

struct PowerSpec {
  FactorLayout layout;
  EffectId effect;
  double min_difference = 1.0;  // D, response units
  double sigma2 = 1.0;          // error variance estimate
  double alpha = 0.05;
  long replications = 2;  // n per cell
  /// When set, the per-replication phi^2 coefficient is rounded to this many
  /// decimals before multiplying by n, as done when tabulating by hand.
  std::optional<int> phi2_coefficient_decimals;

  /// Throws InputError when any field is out of range.
  void validate() const;
};

struct EffectDf {
  long nu1 = 0;
  long nu2 = 0;
};

struct PowerResult {
  long replications = 0;
  double phi2 = 0.0;
  double phi = 0.0;
  long nu1 = 0;
  long nu2 = 0;
  double lambda = 0.0;
  double critical_value = 0.0;
  double beta = 0.0;
  double power = 0.0;
};

/// phi^2 = n m' D^2 / (2 sigma^2 (nu1 + 1)), m' the product of the level
/// counts of factors outside the effect. For a main effect nu1 + 1 is the
/// effect's level count.
double phi_squared(const PowerSpec& spec);

/// nu1 = product of (levels - 1) over the effect; nu2 = cells (n - 1).
EffectDf effect_dfs(const FactorLayout& layout, const EffectId& effect, long n);

/// beta = P(F' <= F_{1-alpha}(nu1, nu2)) with lambda = (nu1 + 1) phi^2.
PowerResult power_of_test(const PowerSpec& spec);

/// Raised when no replication count up to the limit reaches the target.
class TargetNotReached : public InputError {
 public:
  TargetNotReached(long n_max, double best_power);
  long n_max() const { return n_max_; }
  double best_power() const { return best_power_; }

 private:
  long n_max_;
  double best_power_;
};

/// Smallest n in [2, n_max] with power >= target_power. spec.replications is
/// ignored.
long min_replications(const PowerSpec& spec, double target_power, long n_max);

struct EffectPlan {
  EffectId effect;
  std::string label;
  long replications = 0;
  PowerResult result;  // evaluated at `replications`
};

struct ReplicationPlan {
  std::vector<EffectPlan> effects;
  long max_replications = 0;
  std::string limiting_effect;
};

struct PlanOptions {
  double min_difference = 1.0;
  double sigma2 = 1.0;
  double alpha = 0.05;
  double target_power = 0.95;
  long n_max = 100000;
  std::optional<int> phi2_coefficient_decimals;
};

/// min_replications for every effect of the full factorial.
ReplicationPlan plan_all_effects(const FactorLayout& layout, const PlanOptions& options);

/// One PowerResult per replication count, evaluated with spec's other fields.
std::vector<PowerResult> oc_table(const PowerSpec& spec, std::span<const long> replications);

}  // namespace losdoe
