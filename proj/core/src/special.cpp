#include "losdoe/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "losdoe/error.hpp"

namespace losdoe::special {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

void require_probability_open(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InputError(fmt::format("{}: probability {} is outside (0, 1)", what, p));
  }
}

// ln Gamma(x) - [(x - 1/2) ln x - x + ln sqrt(2 pi)] for x >= 10, from the
// Stirling series truncated after the x^-13 term.
double stirling_correction(double x) {
  const double r = 1.0 / x;
  const double r2 = r * r;
  return r * (1.0 / 12 + r2 * (-1.0 / 360 + r2 * (1.0 / 1260 + r2 * (-1.0 / 1680 +
         r2 * (1.0 / 1188 + r2 * (-691.0 / 360360 + r2 * (1.0 / 156)))))));
}

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_continued_fraction(double x, double a, double b) {
  constexpr int kMaxIterations = 50000;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 2.0 * kEps) return h;
  }
  throw NumericalError(
      fmt::format("incomplete beta continued fraction did not converge (x={}, a={}, b={})", x,
                  a, b));
}

struct BetaPair {
  double lower;  // I_x(a, b)
  double upper;  // 1 - I_x(a, b)
};

BetaPair inc_beta_pair(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw InputError(fmt::format("incomplete beta: x={} is outside [0, 1]", x));
  }
  if (!(a > 0.0) || !(b > 0.0)) {
    throw InputError(fmt::format("incomplete beta: shape parameters must be positive (a={}, b={})",
                                 a, b));
  }
  if (x == 0.0) return {0.0, 1.0};
  if (x == 1.0) return {1.0, 0.0};
  const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  const double front = std::exp(log_front);
  // The fraction converges fastest below the mean-like switch point; above it
  // evaluate the mirrored tail directly.
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double lower = front * beta_continued_fraction(x, a, b) / a;
    return {lower, 1.0 - lower};
  }
  const double upper = front * beta_continued_fraction(1.0 - x, b, a) / b;
  return {1.0 - upper, upper};
}

// Bracketed root of an increasing function: secant steps kept inside the
// bracket, with a forced bisection every third step.
template <class Fn>
double invert_increasing(Fn&& cdf, double target, double lo, double hi) {
  double flo = cdf(lo) - target;
  double fhi = cdf(hi) - target;
  for (int iter = 0; iter < 2000; ++iter) {
    const double width = hi - lo;
    if (width <= 4.0 * kEps * std::max(std::abs(hi), kTiny)) return 0.5 * (lo + hi);
    double x = 0.5 * (lo + hi);
    if (iter % 3 != 2 && fhi != flo) {
      const double secant = lo - flo * width / (fhi - flo);
      if (secant > lo + 1e-3 * width && secant < hi - 1e-3 * width) x = secant;
    }
    const double fx = cdf(x) - target;
    if (fx == 0.0) return x;
    if (fx < 0.0) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
  }
  throw NumericalError(fmt::format("quantile search did not converge for p={}", target));
}

double central_f_argument(double x, const FDist& d) {
  return d.nu1() * x / (d.nu1() * x + d.nu2());
}

}  // namespace

FDist::FDist(double nu1, double nu2, double lambda) : nu1_(nu1), nu2_(nu2), lambda_(lambda) {
  if (!(nu1 > 0.0) || !(nu2 > 0.0) || !std::isfinite(nu1) || !std::isfinite(nu2)) {
    throw InputError(fmt::format("F distribution needs positive finite df (got {}, {})", nu1, nu2));
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InputError(fmt::format("noncentrality must be nonnegative and finite (got {})", lambda));
  }
}

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw InputError(fmt::format("log_gamma: argument must be positive and finite, got {}", x));
  }
  if (x >= 10.0) {
    return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) +
           stirling_correction(x);
  }
  // Lanczos approximation, g = 7, n = 9. std::lgamma is avoided because it
  // writes the global signgam.
  static constexpr std::array<double, 9> kCoefficients{
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) return log_gamma(x + 1.0) - std::log(x);
  const double z = x - 1.0;
  double series = kCoefficients[0];
  for (std::size_t i = 1; i < kCoefficients.size(); ++i) {
    series += kCoefficients[i] / (z + static_cast<double>(i));
  }
  const double t = z + 7.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t +
         std::log(series);
}

double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw InputError(fmt::format("log_beta: arguments must be positive (a={}, b={})", a, b));
  }
  const double p = std::min(a, b);
  const double q = std::max(a, b);
  // Large arguments: combine the Stirling corrections directly so the
  // O(q log q) parts of the three log-gammas never cancel numerically.
  if (p >= 10.0) {
    const double corr = stirling_correction(p) + stirling_correction(q) - stirling_correction(p + q);
    return -0.5 * std::log(q) + 0.5 * std::log(2.0 * std::numbers::pi) + corr +
           (p - 0.5) * std::log(p / (p + q)) + q * std::log1p(-p / (p + q));
  }
  if (q >= 10.0) {
    const double corr = stirling_correction(q) - stirling_correction(p + q);
    return log_gamma(p) + corr + p - p * std::log(p + q) + (q - 0.5) * std::log1p(-p / (p + q));
  }
  return log_gamma(p) + log_gamma(q) - log_gamma(p + q);
}

double reg_inc_beta(double x, double a, double b) { return inc_beta_pair(x, a, b).lower; }

double reg_inc_beta_complement(double x, double a, double b) {
  return inc_beta_pair(x, a, b).upper;
}

double f_cdf(double x, const FDist& d) {
  if (!d.central()) throw InputError("f_cdf requires a central F distribution");
  if (std::isnan(x)) throw InputError("f_cdf: x is NaN");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return reg_inc_beta(central_f_argument(x, d), 0.5 * d.nu1(), 0.5 * d.nu2());
}

double f_sf(double x, const FDist& d) {
  if (!d.central()) throw InputError("f_sf requires a central F distribution");
  if (std::isnan(x)) throw InputError("f_sf: x is NaN");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  // P(F > x) = I_{nu2/(nu2 + nu1 x)}(nu2/2, nu1/2), no subtraction from 1.
  const double y = d.nu2() / (d.nu2() + d.nu1() * x);
  return reg_inc_beta(y, 0.5 * d.nu2(), 0.5 * d.nu1());
}

double f_quantile(double p, const FDist& d) {
  if (!d.central()) throw InputError("f_quantile requires a central F distribution");
  require_probability_open(p, "f_quantile");
  auto cdf = [&](double x) { return f_cdf(x, d); };
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; cdf(hi) < p; ++i) {
    if (i > 2000) throw NumericalError("f_quantile: could not bracket the quantile");
    lo = hi;
    hi *= 2.0;
  }
  return invert_increasing(cdf, p, lo, hi);
}

double noncentral_f_cdf(double x, const FDist& d) {
  if (std::isnan(x)) throw InputError("noncentral_f_cdf: x is NaN");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (d.central()) return f_cdf(x, FDist(d.nu1(), d.nu2()));

  constexpr double kTailMass = 1e-12;
  const double y = central_f_argument(x, d);
  const double a = 0.5 * d.nu1();
  const double b = 0.5 * d.nu2();
  const double half = 0.5 * d.lambda();

  // Start at the Poisson mode and grow the index window toward whichever
  // neighbour carries more weight.
  const double mode = std::floor(half);
  const double w_mode = std::exp(-half + mode * std::log(half) - log_gamma(mode + 1.0));
  double lo = mode;
  double hi = mode;
  double w_lo = w_mode;
  double w_hi = w_mode;
  double mass = w_mode;
  double sum = w_mode * reg_inc_beta(y, a + mode, b);

  // w_mode carries the rounding of its log-space evaluation, which at large
  // lambda keeps the summed mass short of 1; the sum is therefore normalized
  // by the mass actually visited and the walk also stops once the next
  // weights are negligible against it.
  const double max_terms = 1000.0 + 50.0 * (half + std::sqrt(half));
  for (double terms = 1.0; 1.0 - mass >= kTailMass; terms += 1.0) {
    if (terms > max_terms) {
      throw NumericalError(fmt::format(
          "noncentral F series did not converge (x={}, nu1={}, nu2={}, lambda={})", x, d.nu1(),
          d.nu2(), d.lambda()));
    }
    const double next_lo = lo > 0.0 ? w_lo * lo / half : 0.0;
    const double next_hi = w_hi * half / (hi + 1.0);
    if (std::max(next_lo, next_hi) < 1e-3 * kEps * mass) break;
    if (lo > 0.0 && next_lo >= next_hi) {
      lo -= 1.0;
      w_lo = next_lo;
      mass += w_lo;
      sum += w_lo * reg_inc_beta(y, a + lo, b);
    } else {
      hi += 1.0;
      w_hi = next_hi;
      mass += w_hi;
      sum += w_hi * reg_inc_beta(y, a + hi, b);
    }
  }
  if (!(mass > 0.0)) throw NumericalError("noncentral F series: Poisson weights underflowed");
  sum /= mass;
  if (!std::isfinite(sum)) throw NumericalError("noncentral F series produced a non-finite sum");
  return std::clamp(sum, 0.0, 1.0);
}

double t_cdf(double t, double nu) {
  if (!(nu > 0.0)) throw InputError(fmt::format("t_cdf: df must be positive, got {}", nu));
  if (std::isnan(t)) throw InputError("t_cdf: t is NaN");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * reg_inc_beta(nu / (nu + t * t), 0.5 * nu, 0.5);
  return t > 0.0 ? 1.0 - tail : tail;
}

double t_two_sided_p(double t, double nu) {
  if (!(nu > 0.0)) throw InputError(fmt::format("t_two_sided_p: df must be positive, got {}", nu));
  if (std::isnan(t)) throw InputError("t_two_sided_p: t is NaN");
  if (std::isinf(t)) return 0.0;
  return reg_inc_beta(nu / (nu + t * t), 0.5 * nu, 0.5);
}

double t_quantile(double p, double nu) {
  require_probability_open(p, "t_quantile");
  if (!(nu > 0.0)) throw InputError(fmt::format("t_quantile: df must be positive, got {}", nu));
  if (p == 0.5) return 0.0;
  // T^2 ~ F(1, nu): the |t| quantile at two-sided mass |2p - 1|.
  const double magnitude = std::sqrt(f_quantile(std::abs(2.0 * p - 1.0), FDist(1.0, nu)));
  return p > 0.5 ? magnitude : -magnitude;
}

double normal_cdf(double z) {
  if (std::isnan(z)) throw InputError("normal_cdf: z is NaN");
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_quantile(double p) {
  require_probability_open(p, "normal_quantile");
  // Acklam's rational approximation followed by one Halley step.
  static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02,
                                           -2.759285104469687e+02, 1.383577518672690e+02,
                                           -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02,
                                           -1.556989798598866e+02, 6.680131188771972e+01,
                                           -1.328068155288572e+01};
  static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01,
                                           -2.400758277161838e+00, -2.549732539343734e+00,
                                           4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01,
                                           2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;

  double x;
  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - kLow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace losdoe::special
