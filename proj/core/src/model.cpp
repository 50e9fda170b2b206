#include "losdoe/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "losdoe/error.hpp"

namespace losdoe {

FactorLayout::FactorLayout(std::vector<Factor> factors) : factors_(std::move(factors)) {
  std::set<std::string> names;
  for (const auto& f : factors_) {
    if (f.name.empty()) throw InputError("factor name must not be empty");
    if (!names.insert(f.name).second) {
      throw InputError(fmt::format("duplicate factor name '{}'", f.name));
    }
    if (f.levels.size() < 2) {
      throw InputError(fmt::format("factor '{}' needs at least 2 levels", f.name));
    }
    std::set<std::string> levels(f.levels.begin(), f.levels.end());
    if (levels.size() != f.levels.size()) {
      throw InputError(fmt::format("factor '{}' has duplicate level names", f.name));
    }
  }
}

FactorLayout FactorLayout::from_counts(std::span<const std::string> names,
                                       std::span<const std::size_t> level_counts) {
  if (names.size() != level_counts.size()) {
    throw InputError("factor names and level counts differ in length");
  }
  std::vector<Factor> factors;
  for (std::size_t i = 0; i < names.size(); ++i) {
    Factor f{names[i], {}};
    for (std::size_t l = 1; l <= level_counts[i]; ++l) f.levels.push_back(std::to_string(l));
    factors.push_back(std::move(f));
  }
  return FactorLayout(std::move(factors));
}

std::vector<std::size_t> FactorLayout::level_counts() const {
  std::vector<std::size_t> out;
  for (const auto& f : factors_) out.push_back(f.levels.size());
  return out;
}

std::optional<std::size_t> FactorLayout::find_factor(std::string_view name) const {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t FactorLayout::factor_index(std::string_view name) const {
  if (auto i = find_factor(name)) return *i;
  throw InputError(fmt::format("unknown factor '{}'", name));
}

std::optional<std::size_t> FactorLayout::find_level(std::size_t f,
                                                    std::string_view level) const {
  const auto& levels = factors_.at(f).levels;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] == level) return i;
  }
  return std::nullopt;
}

std::size_t FactorLayout::cell_count() const {
  if (factors_.empty()) return 0;
  std::size_t n = 1;
  for (const auto& f : factors_) n *= f.levels.size();
  return n;
}

std::size_t FactorLayout::cell_index(std::span<const std::size_t> levels) const {
  if (levels.size() != factors_.size()) {
    throw InputError("level tuple length does not match the factor count");
  }
  std::size_t index = 0;
  for (std::size_t f = 0; f < factors_.size(); ++f) {
    if (levels[f] >= factors_[f].levels.size()) {
      throw InputError(fmt::format("level index {} out of range for factor '{}'", levels[f],
                                   factors_[f].name));
    }
    index = index * factors_[f].levels.size() + levels[f];
  }
  return index;
}

std::vector<std::size_t> FactorLayout::cell_levels(std::size_t cell) const {
  std::vector<std::size_t> levels(factors_.size());
  for (std::size_t f = factors_.size(); f-- > 0;) {
    const auto k = factors_[f].levels.size();
    levels[f] = cell % k;
    cell /= k;
  }
  return levels;
}

std::string FactorLayout::cell_label(std::span<const std::size_t> levels) const {
  std::string out;
  for (std::size_t f = 0; f < factors_.size() && f < levels.size(); ++f) {
    if (f) out += ", ";
    out += factors_[f].name + "=" + factors_[f].levels.at(levels[f]);
  }
  return out;
}

std::string_view transform_name(Transform t) {
  switch (t) {
    case Transform::none: return "none";
    case Transform::square_root: return "square_root";
    case Transform::log10: return "log10";
    case Transform::reciprocal_sqrt: return "reciprocal_sqrt";
    case Transform::reciprocal: return "reciprocal";
  }
  return "none";
}

Transform parse_transform(std::string_view name) {
  if (name == "none") return Transform::none;
  if (name == "square_root" || name == "sqrt") return Transform::square_root;
  if (name == "log10" || name == "log") return Transform::log10;
  if (name == "reciprocal_sqrt") return Transform::reciprocal_sqrt;
  if (name == "reciprocal") return Transform::reciprocal;
  throw InputError(fmt::format("unknown transform '{}'", name));
}

Dataset::Dataset(FactorLayout layout, std::vector<Observation> observations,
                 std::string response_name, bool raw_scale, Transform transform)
    : layout_(std::move(layout)),
      observations_(std::move(observations)),
      response_name_(std::move(response_name)),
      raw_scale_(raw_scale),
      transform_(transform) {
  if (layout_.factor_count() == 0) throw InputError("dataset layout has no factors");
  for (std::size_t i = 0; i < observations_.size(); ++i) {
    const auto& obs = observations_[i];
    if (obs.levels.size() != layout_.factor_count()) {
      throw InputError(fmt::format("observation {}: expected {} level indices, got {}", i + 1,
                                   layout_.factor_count(), obs.levels.size()));
    }
    for (std::size_t f = 0; f < obs.levels.size(); ++f) {
      if (obs.levels[f] >= layout_.level_count(f)) {
        throw InputError(fmt::format("observation {}: level index {} out of range for '{}'",
                                     i + 1, obs.levels[f], layout_.factor(f).name));
      }
    }
    if (!std::isfinite(obs.response)) {
      throw InputError(fmt::format("observation {}: response is not finite", i + 1));
    }
    if (raw_scale_ && obs.response <= 0.0) {
      throw InputError(fmt::format("observation {}: raw response must be positive, got {}",
                                   i + 1, obs.response));
    }
  }
}

std::vector<double> Dataset::responses() const {
  std::vector<double> y;
  y.reserve(observations_.size());
  for (const auto& o : observations_) y.push_back(o.response);
  return y;
}

double Dataset::grand_mean() const {
  if (observations_.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& o : observations_) sum += o.response;
  return sum / static_cast<double>(observations_.size());
}

Dataset build_dataset(const FactorLayout& layout, std::span<const RawRow> rows,
                      const DatasetOptions& options) {
  if (rows.empty()) throw InputError("no rows to build a dataset from");
  std::vector<Observation> observations;
  observations.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.levels.size() != layout.factor_count()) {
      throw InputError(fmt::format("row {}: expected {} level names, got {}", r + 1,
                                   layout.factor_count(), row.levels.size()));
    }
    Observation obs;
    obs.levels.reserve(row.levels.size());
    for (std::size_t f = 0; f < row.levels.size(); ++f) {
      auto level = layout.find_level(f, row.levels[f]);
      if (!level) {
        throw InputError(fmt::format("row {}: unknown level '{}' for factor '{}'", r + 1,
                                     row.levels[f], layout.factor(f).name));
      }
      obs.levels.push_back(*level);
    }
    if (!std::isfinite(row.response)) {
      throw InputError(fmt::format("row {}: response is not finite", r + 1));
    }
    if (options.raw_scale && row.response <= 0.0) {
      throw InputError(fmt::format("row {}: response must be positive, got {}", r + 1,
                                   row.response));
    }
    obs.response = row.response;
    observations.push_back(std::move(obs));
  }
  return Dataset(layout, std::move(observations), options.response_name, options.raw_scale);
}

std::vector<CellStats> cell_stats(const Dataset& d) {
  const auto& layout = d.layout();
  const std::size_t cells = layout.cell_count();
  std::vector<std::size_t> n(cells, 0);
  std::vector<double> sum(cells, 0.0);
  std::vector<std::size_t> index(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& obs = d.observation(i);
    index[i] = layout.cell_index(obs.levels);
    ++n[index[i]];
    sum[index[i]] += obs.response;
  }
  std::vector<double> mean(cells, 0.0);
  for (std::size_t c = 0; c < cells; ++c) {
    if (n[c]) mean[c] = sum[c] / static_cast<double>(n[c]);
  }
  std::vector<double> ss(cells, 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double dev = d.observation(i).response - mean[index[i]];
    ss[index[i]] += dev * dev;
  }

  std::vector<CellStats> out;
  for (std::size_t c = 0; c < cells; ++c) {
    if (!n[c]) continue;
    CellStats s{layout.cell_levels(c), n[c], mean[c], std::nullopt};
    if (n[c] >= 2) s.sd = std::sqrt(ss[c] / static_cast<double>(n[c] - 1));
    out.push_back(std::move(s));
  }
  return out;
}

FrequencyTable::FrequencyTable(FactorLayout layout, std::vector<std::size_t> cell_counts)
    : layout_(std::move(layout)), counts_(std::move(cell_counts)) {
  if (counts_.size() != layout_.cell_count()) {
    throw InputError(fmt::format("frequency table needs {} cell counts, got {}",
                                 layout_.cell_count(), counts_.size()));
  }
}

std::size_t FrequencyTable::count(std::span<const std::size_t> levels) const {
  return counts_[layout_.cell_index(levels)];
}

std::vector<std::size_t> FrequencyTable::margin(std::span<const std::size_t> factors) const {
  std::size_t size = 1;
  for (auto f : factors) {
    if (f >= layout_.factor_count()) throw InputError("margin factor index out of range");
    size *= layout_.level_count(f);
  }
  std::vector<std::size_t> out(size, 0);
  for (std::size_t c = 0; c < counts_.size(); ++c) {
    const auto levels = layout_.cell_levels(c);
    std::size_t idx = 0;
    for (auto f : factors) idx = idx * layout_.level_count(f) + levels[f];
    out[idx] += counts_[c];
  }
  return out;
}

std::size_t FrequencyTable::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

std::size_t FrequencyTable::empty_cells() const {
  return static_cast<std::size_t>(std::count(counts_.begin(), counts_.end(), std::size_t{0}));
}

FrequencyTable frequency_table(const Dataset& d) {
  std::vector<std::size_t> counts(d.layout().cell_count(), 0);
  for (const auto& obs : d.observations()) ++counts[d.layout().cell_index(obs.levels)];
  return FrequencyTable(d.layout(), std::move(counts));
}

}  // namespace losdoe
