#pragma once

// Special functions and distributions: log-gamma, regularized incomplete
// beta, normal, Student t, central and noncentral F.
//
// All functions are pure. Precondition violations throw InputError; failure
// of an iterative routine to converge throws NumericalError.

namespace losdoe::special {

/// F distribution with numerator/denominator degrees of freedom and
/// noncentrality lambda (0 = central).
class FDist {
 public:
  FDist(double nu1, double nu2, double lambda = 0.0);

  double nu1() const { return nu1_; }
  double nu2() const { return nu2_; }
  double lambda() const { return lambda_; }
  bool central() const { return lambda_ == 0.0; }

 private:
  double nu1_;
  double nu2_;
  double lambda_;
};

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// ln B(a, b).
double log_beta(double a, double b);

/// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double x, double a, double b);

/// 1 - I_x(a, b), evaluated without cancellation in the upper tail.
double reg_inc_beta_complement(double x, double a, double b);

/// P(F <= x) for a central F distribution.
double f_cdf(double x, const FDist& d);

/// P(F > x) for a central F distribution; accurate for tiny p-values.
double f_sf(double x, const FDist& d);

/// Inverse of f_cdf for p in (0, 1).
double f_quantile(double p, const FDist& d);

/// P(F <= x) for a noncentral F distribution, summed as a Poisson(lambda/2)
/// mixture of central incomplete-beta terms until the unvisited Poisson mass
/// drops below 1e-12.
double noncentral_f_cdf(double x, const FDist& d);

double t_cdf(double t, double nu);

/// Two-sided p-value 2 * P(T > |t|).
double t_two_sided_p(double t, double nu);

double t_quantile(double p, double nu);

double normal_cdf(double z);

double normal_quantile(double p);

}  // namespace losdoe::special
