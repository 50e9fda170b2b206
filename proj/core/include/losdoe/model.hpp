#pragma once

// Domain types shared by every analysis: factor layouts, observations,
// datasets, per-cell summaries and frequency tables.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace losdoe {

/// A categorical factor with an ordered list of level names.
struct Factor {
  std::string name;
  std::vector<std::string> levels;

  bool operator==(const Factor&) const = default;
};

/// Ordered set of crossed factors. Factor order fixes cell indexing: cells
/// are numbered row-major with the last factor varying fastest.
class FactorLayout {
 public:
  FactorLayout() = default;
  explicit FactorLayout(std::vector<Factor> factors);

  /// Layout whose levels are named "1".."k" for each count.
  static FactorLayout from_counts(std::span<const std::string> names,
                                  std::span<const std::size_t> level_counts);

  std::size_t factor_count() const { return factors_.size(); }
  const Factor& factor(std::size_t f) const { return factors_.at(f); }
  std::span<const Factor> factors() const { return factors_; }
  std::size_t level_count(std::size_t f) const { return factors_.at(f).levels.size(); }
  std::vector<std::size_t> level_counts() const;

  std::optional<std::size_t> find_factor(std::string_view name) const;
  /// Throws InputError for an unknown name.
  std::size_t factor_index(std::string_view name) const;
  std::optional<std::size_t> find_level(std::size_t f, std::string_view level) const;

  std::size_t cell_count() const;
  std::size_t cell_index(std::span<const std::size_t> levels) const;
  std::vector<std::size_t> cell_levels(std::size_t cell) const;
  /// "age_group=1, season=winter, gender=female"
  std::string cell_label(std::span<const std::size_t> levels) const;

  bool operator==(const FactorLayout&) const = default;

 private:
  std::vector<Factor> factors_;
};

/// Response transformations applied to a dataset. The enumerators follow the
/// power-law exponent ladder 0, 0.5, 1, 1.5, 2.
enum class Transform { none, square_root, log10, reciprocal_sqrt, reciprocal };

std::string_view transform_name(Transform t);
/// Accepts the names produced by transform_name plus "log".
Transform parse_transform(std::string_view name);

struct Observation {
  std::vector<std::size_t> levels;  // one index per factor
  double response = 0.0;

  bool operator==(const Observation&) const = default;
};

/// Immutable table of observations over a factor layout.
class Dataset {
 public:
  /// Validates level bounds and response finiteness. A raw-scale dataset
  /// additionally requires strictly positive responses.
  Dataset(FactorLayout layout, std::vector<Observation> observations,
          std::string response_name, bool raw_scale = true,
          Transform transform = Transform::none);

  const FactorLayout& layout() const { return layout_; }
  std::span<const Observation> observations() const { return observations_; }
  const Observation& observation(std::size_t i) const { return observations_.at(i); }
  std::size_t size() const { return observations_.size(); }
  const std::string& response_name() const { return response_name_; }
  bool raw_scale() const { return raw_scale_; }
  /// Transform already applied to the responses, relative to the raw scale.
  Transform transform() const { return transform_; }

  std::vector<double> responses() const;
  double grand_mean() const;

  bool operator==(const Dataset&) const = default;

 private:
  FactorLayout layout_;
  std::vector<Observation> observations_;
  std::string response_name_;
  bool raw_scale_ = true;
  Transform transform_ = Transform::none;
};

/// One input row: a level name per factor, in layout order.
struct RawRow {
  std::vector<std::string> levels;
  double response = 0.0;
};

struct DatasetOptions {
  std::string response_name = "response";
  bool raw_scale = true;
};

/// Resolves level names (exact, case-sensitive) and builds a Dataset.
/// Errors name the offending row (1-based). Empty input is rejected.
Dataset build_dataset(const FactorLayout& layout, std::span<const RawRow> rows,
                      const DatasetOptions& options = {});

struct CellStats {
  std::vector<std::size_t> cell;
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> sd;  // sample sd (n - 1 divisor), present when n >= 2
};

/// One entry per nonempty cell, ordered by cell index. Two-pass mean/sd.
std::vector<CellStats> cell_stats(const Dataset& d);

/// Cell counts over a layout together with marginal totals over any subset of
/// factors.
class FrequencyTable {
 public:
  FrequencyTable(FactorLayout layout, std::vector<std::size_t> cell_counts);

  const FactorLayout& layout() const { return layout_; }
  std::span<const std::size_t> cell_counts() const { return counts_; }
  std::size_t count(std::span<const std::size_t> levels) const;

  /// Marginal totals over the listed factors (in the given order), indexed
  /// row-major with the last listed factor fastest. An empty list yields the
  /// grand total.
  std::vector<std::size_t> margin(std::span<const std::size_t> factors) const;
  std::size_t total() const;
  std::size_t empty_cells() const;

 private:
  FactorLayout layout_;
  std::vector<std::size_t> counts_;
};

FrequencyTable frequency_table(const Dataset& d);

}  // namespace losdoe
