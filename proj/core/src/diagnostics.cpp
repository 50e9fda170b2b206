#include "losdoe/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "losdoe/error.hpp"
#include "losdoe/special.hpp"

namespace losdoe {

namespace {

double sample_sd(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n - 1.0));
}

struct TransformInfo {
  double exponent;
  Transform transform;
};

constexpr std::array<TransformInfo, 5> kLadder{{
    {0.0, Transform::none},
    {0.5, Transform::square_root},
    {1.0, Transform::log10},
    {1.5, Transform::reciprocal_sqrt},
    {2.0, Transform::reciprocal},
}};

std::string transformed_name(std::string_view name, Transform t) {
  switch (t) {
    case Transform::none: return std::string(name);
    case Transform::square_root: return fmt::format("sqrt({})", name);
    case Transform::log10: return fmt::format("log10({})", name);
    case Transform::reciprocal_sqrt: return fmt::format("1/sqrt({})", name);
    case Transform::reciprocal: return fmt::format("1/({})", name);
  }
  return std::string(name);
}

std::string untransformed_name(std::string_view name) {
  const auto open = name.find('(');
  if (open == std::string_view::npos || name.back() != ')') return std::string(name);
  return std::string(name.substr(open + 1, name.size() - open - 2));
}

}  // namespace

std::vector<double> residuals(const Dataset& d, const FitResult& fit) {
  if (fit.fitted.size() != d.size()) {
    throw InputError(fmt::format("fit has {} fitted values for {} observations",
                                 fit.fitted.size(), d.size()));
  }
  std::vector<double> e(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) e[i] = d.observation(i).response - fit.fitted[i];
  return e;
}

std::size_t sturges_bins(std::size_t n) {
  if (n == 0) throw InputError("histogram of an empty series");
  return static_cast<std::size_t>(std::ceil(1.0 + std::log2(static_cast<double>(n))));
}

HistogramData residual_histogram(std::span<const double> e, std::optional<std::size_t> bins) {
  if (e.empty()) throw InputError("histogram of an empty series");
  const std::size_t b = bins ? *bins : sturges_bins(e.size());
  if (b == 0) throw InputError("histogram needs at least one bin");
  auto [lo_it, hi_it] = std::minmax_element(e.begin(), e.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw InputError("histogram of non-finite values");
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  HistogramData h;
  const double width = (hi - lo) / static_cast<double>(b);
  for (std::size_t i = 0; i < b; ++i) h.edges.push_back(lo + width * static_cast<double>(i));
  h.edges.push_back(hi);
  h.counts.assign(b, 0);
  for (double v : e) {
    auto bin = static_cast<std::size_t>(std::floor((v - lo) / width));
    ++h.counts[std::min(bin, b - 1)];
  }
  return h;
}

ResidualFittedData residual_vs_fitted(std::span<const double> e, std::span<const double> fitted) {
  if (e.size() != fitted.size()) throw InputError("residuals and fitted values differ in length");
  if (e.empty()) throw InputError("residual-vs-fitted of an empty series");
  std::vector<std::size_t> order(e.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fitted[a] < fitted[b]; });
  ResidualFittedData out;
  for (auto i : order) {
    out.fitted.push_back(fitted[i]);
    out.residuals.push_back(e[i]);
  }
  const std::size_t q = e.size() / 4;
  if (out.fitted.front() == out.fitted.back() || q < 2) return out;
  const std::span<const double> sorted(out.residuals);
  const double bottom = sample_sd(sorted.first(q));
  const double top = sample_sd(sorted.last(q));
  if (bottom > 0.0) out.funnel = top / bottom;
  return out;
}

PPPlotData pp_plot(std::span<const double> e) {
  if (e.empty()) throw InputError("P-P plot of an empty series");
  const double n = static_cast<double>(e.size());
  const double mean = std::accumulate(e.begin(), e.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : e) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  if (!(sd > 0.0)) throw InputError("P-P plot of a constant series");

  std::vector<double> sorted(e.begin(), e.end());
  std::sort(sorted.begin(), sorted.end());
  PPPlotData pp;
  pp.empirical.reserve(sorted.size());
  pp.theoretical.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double emp = (static_cast<double>(i) + 0.5) / n;
    const double theo = special::normal_cdf((sorted[i] - mean) / sd);
    pp.empirical.push_back(emp);
    pp.theoretical.push_back(theo);
    pp.max_deviation = std::max(pp.max_deviation, std::abs(emp - theo));
  }
  return pp;
}

TransformRecommendation sd_mean_regression(std::span<const CellStats> cells) {
  std::vector<double> x;
  std::vector<double> y;
  TransformRecommendation rec;
  for (const auto& c : cells) {
    if (c.n < 2 || !c.sd || !(*c.sd > 0.0) || !(c.mean > 0.0)) {
      ++rec.cells_excluded;
      continue;
    }
    x.push_back(std::log10(c.mean));
    y.push_back(std::log10(*c.sd));
  }
  rec.cells_used = x.size();
  if (x.size() < 3) {
    throw InputError(fmt::format(
        "sd-mean regression needs at least 3 cells with n >= 2, positive mean and sd; got {}",
        x.size()));
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0, xx = 0.0, xy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
    xx += x[i] * x[i];
    xy += x[i] * y[i];
  }
  if (!(sxx > 0.0)) throw InputError("sd-mean regression: all cell means are equal");
  rec.slope = sxy / sxx;
  rec.intercept = my - rec.slope * mx;
  rec.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  rec.slope_through_origin = xy / xx;

  double best = std::abs(rec.slope - kLadder[0].exponent);
  auto choice = kLadder[0];
  for (const auto& step : kLadder) {
    const double dist = std::abs(rec.slope - step.exponent);
    if (dist < best) {
      best = dist;
      choice = step;
    }
  }
  rec.snapped_exponent = choice.exponent;
  rec.transform = choice.transform;
  rec.low_confidence = best > 0.25;
  return rec;
}

double transform_value(double y, Transform t) {
  switch (t) {
    case Transform::none: return y;
    case Transform::square_root:
      if (y < 0.0) throw InputError(fmt::format("square root of negative response {}", y));
      return std::sqrt(y);
    case Transform::log10:
      if (!(y > 0.0)) throw InputError(fmt::format("log of non-positive response {}", y));
      return std::log10(y);
    case Transform::reciprocal_sqrt:
      if (!(y > 0.0)) throw InputError(fmt::format("reciprocal sqrt of non-positive response {}", y));
      return 1.0 / std::sqrt(y);
    case Transform::reciprocal:
      if (!(y > 0.0)) throw InputError(fmt::format("reciprocal of non-positive response {}", y));
      return 1.0 / y;
  }
  return y;
}

double back_transform_value(double y, Transform t) {
  switch (t) {
    case Transform::none: return y;
    case Transform::square_root: return y * y;
    case Transform::log10: return std::pow(10.0, y);
    case Transform::reciprocal_sqrt: return 1.0 / (y * y);
    case Transform::reciprocal: return 1.0 / y;
  }
  return y;
}

Dataset apply_transform(const Dataset& d, Transform t) {
  if (t == Transform::none) return d;
  if (d.transform() != Transform::none) {
    throw InputError(fmt::format("dataset is already on the {} scale",
                                 transform_name(d.transform())));
  }
  std::vector<Observation> obs(d.observations().begin(), d.observations().end());
  for (auto& o : obs) o.response = transform_value(o.response, t);
  return Dataset(d.layout(), std::move(obs), transformed_name(d.response_name(), t), false, t);
}

Dataset back_transform(const Dataset& d) {
  if (d.transform() == Transform::none) return d;
  std::vector<Observation> obs(d.observations().begin(), d.observations().end());
  for (auto& o : obs) o.response = back_transform_value(o.response, d.transform());
  return Dataset(d.layout(), std::move(obs), untransformed_name(d.response_name()), true,
                 Transform::none);
}

}  // namespace losdoe
