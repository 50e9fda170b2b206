#pragma once

// Ordinary least squares on dummy-coded factorial designs.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "losdoe/error.hpp"
#include "losdoe/model.hpp"

namespace losdoe {

/// Contrast coding for a k-level factor; both emit k - 1 columns.
///   reference: indicator of levels 1..k-1, the last level is the baseline.
///   deviation: like reference, but the last level is coded -1 everywhere
///              (sum-to-zero).
enum class Coding { reference, deviation };

/// Sorted factor indices; the empty term is the intercept.
using Term = std::vector<std::size_t>;

/// Intercept followed by every main effect and interaction up to max_order.
std::vector<Term> factorial_terms(const FactorLayout& layout, std::size_t max_order);

/// Terms and coding over a layout, with the resulting column structure.
/// Interaction columns are products of their factors' contrast columns, the
/// first factor varying slowest.
class ModelSpec {
 public:
  ModelSpec(FactorLayout layout, std::vector<Term> terms, Coding coding);

  static ModelSpec factorial(FactorLayout layout, std::size_t max_order, Coding coding);

  const FactorLayout& layout() const { return layout_; }
  std::span<const Term> terms() const { return terms_; }
  Coding coding() const { return coding_; }

  std::size_t column_count() const { return columns_.size(); }
  const std::string& column_label(std::size_t j) const { return columns_.at(j).label; }
  std::vector<std::string> column_labels() const;
  std::size_t column_term(std::size_t j) const { return columns_.at(j).term; }
  std::vector<std::size_t> term_columns(std::size_t term) const;
  /// "Intercept", "season", "age_group * gender".
  std::string term_label(std::size_t term) const;

  /// Writes the coded row for one level tuple into `row` (size column_count).
  void encode(std::span<const std::size_t> levels, std::span<double> row) const;

 private:
  struct Column {
    std::size_t term;
    std::vector<std::size_t> contrast;  // contrast column per factor of the term
    std::string label;
  };

  FactorLayout layout_;
  std::vector<Term> terms_;
  Coding coding_;
  std::vector<Column> columns_;
};

struct DesignMatrix {
  ModelSpec spec;
  Eigen::MatrixXd values;  // observations x columns
};

DesignMatrix build_design(const Dataset& d, const ModelSpec& spec);
DesignMatrix build_design(const Dataset& d, std::vector<Term> terms, Coding coding);

/// The design has linearly dependent columns at the rank tolerance.
class RankDeficientError : public InputError {
 public:
  RankDeficientError(std::vector<std::string> dependent_columns, long rank);
  const std::vector<std::string>& dependent_columns() const { return columns_; }
  long rank() const { return rank_; }

 private:
  std::vector<std::string> columns_;
  long rank_;
};

/// Column-pivoted Householder least squares. Rank is decided at relative
/// tolerance 1e-10 of the largest pivot; a deficient design throws
/// RankDeficientError naming the columns pivoted past the rank.
struct LeastSquares {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd residuals;
  double sse = 0.0;
  Eigen::MatrixXd unscaled_covariance;  // (X'X)^-1, only when requested
};

LeastSquares least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           std::span<const std::string> column_labels,
                           bool with_covariance);

/// Coefficient vector bound to the model spec it was estimated under, so a
/// prediction always uses the matching coding.
class LinearPredictor {
 public:
  LinearPredictor(ModelSpec spec, std::vector<double> coefficients);

  /// Coefficients given by column label; unlisted columns are zero, unknown
  /// labels throw InputError.
  static LinearPredictor from_labels(ModelSpec spec,
                                     std::span<const std::pair<std::string, double>> values);

  const ModelSpec& spec() const { return spec_; }
  std::span<const double> coefficients() const { return coefficients_; }
  double predict(std::span<const std::size_t> levels) const;

 private:
  ModelSpec spec_;
  std::vector<double> coefficients_;
};

struct Coefficient {
  std::string label;
  double estimate = 0.0;
  double std_error = 0.0;
  double t = 0.0;
  double p = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct CoefficientTable {
  std::vector<Coefficient> rows;
  double confidence = 0.95;
  long df_error = 0;
};

struct FitResult {
  LinearPredictor model;
  CoefficientTable coefficients;
  std::vector<double> fitted;
  std::vector<double> residuals;
  double sse = 0.0;
  long df_error = 0;
  double mse = 0.0;  // NaN when df_error == 0
};

/// Fits y on the design. Standard errors, t, p and CI bounds are NaN when
/// df_error is 0. CI level is 1 - alpha.
FitResult ols_fit(const DesignMatrix& x, std::span<const double> y, double alpha = 0.05);

double predict(const FitResult& fit, std::span<const std::size_t> levels);

struct ReducedModel {
  std::vector<Coefficient> terms;  // intercept (when present) plus retained terms
  std::string formula;
};

/// Keeps the intercept and every term with p <= alpha, rendered as
/// "logstay = 0.573 + 0.161[age_group(2)] - 0.037[season(1)]".
ReducedModel significant_model(const CoefficientTable& table, double alpha,
                               std::string_view response_name);

}  // namespace losdoe
