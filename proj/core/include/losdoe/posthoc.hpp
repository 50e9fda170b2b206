#pragma once

// Scheffe pairwise comparisons of factor level means and the homogeneous
// subsets they induce.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "losdoe/model.hpp"

namespace losdoe {

struct LevelSummary {
  std::string level;
  std::size_t n = 0;
  double mean = 0.0;
};

/// Plain observation mean per level of one factor, in level order.
std::vector<LevelSummary> marginal_means(const Dataset& d, std::size_t factor);

struct ScheffeComparison {
  std::string factor;
  std::size_t i = 0;  // level indices into the summaries the comparison came from
  std::size_t j = 0;
  std::string level_i;
  std::string level_j;
  double difference = 0.0;  // mean_i - mean_j
  double std_error = 0.0;
  double p = 1.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Error mean square and df shared by every comparison of one analysis.
struct ScheffeSettings {
  double mse = 0.0;
  long df_error = 0;
  double alpha = 0.05;
};

/// One comparison of level i against level j among k levels:
/// SE = sqrt(mse (1/n_i + 1/n_j)), p = P(F(k-1, df) > diff^2 / ((k-1) SE^2)),
/// CI = diff -/+ sqrt((k-1) F_{1-alpha}(k-1, df)) SE.
ScheffeComparison scheffe_compare(std::string factor, std::span<const LevelSummary> levels,
                                  std::size_t i, std::size_t j, const ScheffeSettings& s);

/// Every ordered pair (i, j), i != j, in row-major order.
std::vector<ScheffeComparison> scheffe_pairwise(std::string factor,
                                                std::span<const LevelSummary> levels,
                                                const ScheffeSettings& s);
std::vector<ScheffeComparison> scheffe_pairwise(const Dataset& d, std::size_t factor,
                                                const ScheffeSettings& s);

struct Subset {
  std::vector<std::size_t> levels;  // indices, ascending by mean
  std::vector<double> means;
  double significance = 1.0;        // minimum within-subset pairwise p; 1 for singletons
};

struct HomogeneousSubsets {
  std::string factor;
  std::vector<std::size_t> order;  // level indices sorted ascending by mean
  std::vector<Subset> subsets;
  double alpha = 0.05;
  std::string significance_convention;
};

/// Maximal runs of the mean-sorted levels in which every pair has p > alpha.
/// `comparisons` must cover every pair of the given levels in at least one
/// direction.
HomogeneousSubsets homogeneous_subsets(std::span<const ScheffeComparison> comparisons,
                                       std::span<const LevelSummary> levels, double alpha);

}  // namespace losdoe
