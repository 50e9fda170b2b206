#include "losdoe/linmod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "losdoe/power.hpp"
#include "losdoe/special.hpp"

namespace losdoe {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kRankTolerance = 1e-10;

double contrast_value(Coding coding, std::size_t level, std::size_t column, std::size_t k) {
  if (level == column) return 1.0;
  if (coding == Coding::deviation && level == k - 1) return -1.0;
  return 0.0;
}

// Increments a mixed-radix counter, last digit fastest. False on wrap-around.
bool advance_odometer(std::vector<std::size_t>& digits, const std::vector<std::size_t>& limits) {
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (++digits[i] < limits[i]) return true;
    digits[i] = 0;
  }
  return false;
}

}  // namespace

std::vector<Term> factorial_terms(const FactorLayout& layout, std::size_t max_order) {
  std::vector<Term> terms{Term{}};
  for (auto& effect : all_effects(layout, max_order)) terms.push_back(std::move(effect.factors));
  return terms;
}

ModelSpec::ModelSpec(FactorLayout layout, std::vector<Term> terms, Coding coding)
    : layout_(std::move(layout)), terms_(std::move(terms)), coding_(coding) {
  std::set<Term> seen;
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    const auto& term = terms_[t];
    for (std::size_t i = 0; i < term.size(); ++i) {
      if (term[i] >= layout_.factor_count()) throw InputError("model term factor out of range");
      if (i && term[i] <= term[i - 1]) {
        throw InputError("model term factors must be sorted and distinct");
      }
    }
    if (!seen.insert(term).second) {
      throw InputError(fmt::format("duplicate model term '{}'", term_label(t)));
    }

    if (term.empty()) {
      columns_.push_back({t, {}, "Intercept"});
      continue;
    }
    std::vector<std::size_t> limits;
    for (auto f : term) limits.push_back(layout_.level_count(f) - 1);
    std::vector<std::size_t> contrast(term.size(), 0);
    do {
      std::string label;
      for (std::size_t i = 0; i < term.size(); ++i) {
        if (i) label += "*";
        label += fmt::format("{}({})", layout_.factor(term[i]).name, contrast[i] + 1);
      }
      columns_.push_back({t, contrast, std::move(label)});
    } while (advance_odometer(contrast, limits));
  }
}

ModelSpec ModelSpec::factorial(FactorLayout layout, std::size_t max_order, Coding coding) {
  auto terms = factorial_terms(layout, max_order);
  return ModelSpec(std::move(layout), std::move(terms), coding);
}

std::vector<std::string> ModelSpec::column_labels() const {
  std::vector<std::string> labels;
  labels.reserve(columns_.size());
  for (const auto& c : columns_) labels.push_back(c.label);
  return labels;
}

std::vector<std::size_t> ModelSpec::term_columns(std::size_t term) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].term == term) out.push_back(j);
  }
  return out;
}

std::string ModelSpec::term_label(std::size_t term) const {
  const auto& factors = terms_.at(term);
  if (factors.empty()) return "Intercept";
  std::string out;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) out += " * ";
    out += layout_.factor(factors[i]).name;
  }
  return out;
}

void ModelSpec::encode(std::span<const std::size_t> levels, std::span<double> row) const {
  if (row.size() != columns_.size()) throw InputError("encode: row size mismatch");
  if (levels.size() != layout_.factor_count()) throw InputError("encode: level tuple size mismatch");
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    const auto& col = columns_[j];
    const auto& term = terms_[col.term];
    double v = 1.0;
    for (std::size_t i = 0; i < term.size() && v != 0.0; ++i) {
      const auto f = term[i];
      v *= contrast_value(coding_, levels[f], col.contrast[i], layout_.level_count(f));
    }
    row[j] = v;
  }
}

DesignMatrix build_design(const Dataset& d, const ModelSpec& spec) {
  if (!(d.layout() == spec.layout())) throw InputError("design: dataset layout differs from model");
  const auto n = static_cast<Eigen::Index>(d.size());
  const auto p = static_cast<Eigen::Index>(spec.column_count());
  DesignMatrix out{spec, Eigen::MatrixXd(n, p)};
  std::vector<double> row(spec.column_count());
  for (Eigen::Index i = 0; i < n; ++i) {
    spec.encode(d.observation(static_cast<std::size_t>(i)).levels, row);
    for (Eigen::Index j = 0; j < p; ++j) out.values(i, j) = row[static_cast<std::size_t>(j)];
  }
  return out;
}

DesignMatrix build_design(const Dataset& d, std::vector<Term> terms, Coding coding) {
  return build_design(d, ModelSpec(d.layout(), std::move(terms), coding));
}

RankDeficientError::RankDeficientError(std::vector<std::string> dependent_columns, long rank)
    : InputError(fmt::format(
          "design matrix is rank deficient (rank {}); linearly dependent columns: {}", rank,
          fmt::join(dependent_columns, ", "))),
      columns_(std::move(dependent_columns)),
      rank_(rank) {}

LeastSquares least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           std::span<const std::string> column_labels, bool with_covariance) {
  if (x.rows() != y.size()) {
    throw InputError(fmt::format("least squares: {} rows but {} responses", x.rows(), y.size()));
  }
  if (x.cols() == 0) {
    LeastSquares out;
    out.coefficients = Eigen::VectorXd(0);
    out.residuals = y;
    out.sse = y.squaredNorm();
    return out;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x.rows(), x.cols());
  qr.setThreshold(kRankTolerance);
  qr.compute(x);
  const auto rank = qr.rank();
  if (rank < x.cols()) {
    std::vector<std::string> dependent;
    for (Eigen::Index i = rank; i < x.cols(); ++i) {
      const auto j = static_cast<std::size_t>(qr.colsPermutation().indices()(i));
      dependent.push_back(j < column_labels.size() ? column_labels[j] : fmt::format("#{}", j));
    }
    throw RankDeficientError(std::move(dependent), static_cast<long>(rank));
  }
  LeastSquares out;
  out.coefficients = qr.solve(y);
  out.residuals = y - x * out.coefficients;
  out.sse = out.residuals.squaredNorm();
  if (with_covariance) {
    const auto p = x.cols();
    const Eigen::MatrixXd r =
        qr.matrixR().topLeftCorner(p, p).template triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(
        Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd permuted = r_inv * r_inv.transpose();
    out.unscaled_covariance =
        qr.colsPermutation() * permuted * qr.colsPermutation().transpose();
  }
  return out;
}

LinearPredictor::LinearPredictor(ModelSpec spec, std::vector<double> coefficients)
    : spec_(std::move(spec)), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != spec_.column_count()) {
    throw InputError(fmt::format("predictor needs {} coefficients, got {}", spec_.column_count(),
                                 coefficients_.size()));
  }
}

LinearPredictor LinearPredictor::from_labels(
    ModelSpec spec, std::span<const std::pair<std::string, double>> values) {
  std::vector<double> coefficients(spec.column_count(), 0.0);
  const auto labels = spec.column_labels();
  for (const auto& [label, value] : values) {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
      throw InputError(fmt::format("coefficient '{}' does not name a model column", label));
    }
    coefficients[static_cast<std::size_t>(it - labels.begin())] = value;
  }
  return LinearPredictor(std::move(spec), std::move(coefficients));
}

double LinearPredictor::predict(std::span<const std::size_t> levels) const {
  std::vector<double> row(spec_.column_count());
  spec_.encode(levels, row);
  double sum = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) sum += row[j] * coefficients_[j];
  return sum;
}

FitResult ols_fit(const DesignMatrix& x, std::span<const double> y, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("ols_fit: alpha must be in (0, 1)");
  if (static_cast<std::size_t>(x.values.rows()) != y.size()) {
    throw InputError(fmt::format("ols_fit: design has {} rows but {} responses", x.values.rows(),
                                 y.size()));
  }
  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(),
                                                               static_cast<Eigen::Index>(y.size()));
  const auto labels = x.spec.column_labels();
  const auto ls = least_squares(x.values, yv, labels, true);

  const long n = static_cast<long>(y.size());
  const long p = static_cast<long>(x.values.cols());
  const long df = n - p;
  const double mse = df > 0 ? ls.sse / static_cast<double>(df) : kNaN;
  const double t_crit = df > 0 ? special::t_quantile(1.0 - alpha / 2.0, static_cast<double>(df))
                               : kNaN;

  CoefficientTable table;
  table.confidence = 1.0 - alpha;
  table.df_error = df;
  std::vector<double> coefficients(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    Coefficient c;
    c.label = labels[static_cast<std::size_t>(j)];
    c.estimate = ls.coefficients(j);
    coefficients[static_cast<std::size_t>(j)] = c.estimate;
    if (df > 0) {
      c.std_error = std::sqrt(mse * ls.unscaled_covariance(j, j));
      c.t = c.estimate / c.std_error;
      c.p = c.std_error > 0.0 ? special::t_two_sided_p(c.t, static_cast<double>(df))
                              : (c.estimate == 0.0 ? 1.0 : 0.0);
      c.lower = c.estimate - t_crit * c.std_error;
      c.upper = c.estimate + t_crit * c.std_error;
    } else {
      c.std_error = c.t = c.p = c.lower = c.upper = kNaN;
    }
    table.rows.push_back(std::move(c));
  }

  FitResult fit{LinearPredictor(x.spec, std::move(coefficients)), std::move(table), {}, {},
                ls.sse, df, mse};
  fit.residuals.assign(ls.residuals.data(), ls.residuals.data() + ls.residuals.size());
  fit.fitted.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) fit.fitted[i] = y[i] - fit.residuals[i];
  return fit;
}

double predict(const FitResult& fit, std::span<const std::size_t> levels) {
  return fit.model.predict(levels);
}

ReducedModel significant_model(const CoefficientTable& table, double alpha,
                               std::string_view response_name) {
  ReducedModel out;
  for (const auto& row : table.rows) {
    if (row.label == "Intercept" || row.p <= alpha) out.terms.push_back(row);
  }
  std::string formula = fmt::format("{} =", response_name);
  bool first = true;
  for (const auto& term : out.terms) {
    const bool intercept = term.label == "Intercept";
    const double magnitude = std::abs(term.estimate);
    const char* sign = term.estimate < 0.0 ? "-" : "+";
    const std::string body =
        intercept ? fmt::format("{:.3f}", magnitude) : fmt::format("{:.3f}[{}]", magnitude, term.label);
    if (first) {
      formula += fmt::format(" {}{}", term.estimate < 0.0 ? "-" : "", body);
    } else {
      formula += fmt::format(" {} {}", sign, body);
    }
    first = false;
  }
  if (first) formula += " 0";
  out.formula = std::move(formula);
  return out;
}

}  // namespace losdoe
