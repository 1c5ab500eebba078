#include "locfit/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "locfit/errors.hpp"

namespace locfit::special {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr double kLogFloor = 1e-280;

using Policy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;
constexpr int kMaxSeriesTerms = 1000000;

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// log of the common factor z^k e^{-z} / Γ(k).
double log_gamma_prefactor(double k, double z) { return k * std::log(z) - z - log_gamma(k); }

// Σ z^n / ((k)(k+1)...(k+n)), so that P = prefactor * sum.
double lower_series(double k, double z) {
  double ap = k;
  double del = 1.0 / k;
  double sum = del;
  for (int n = 0; n < kMaxSeriesTerms; ++n) {
    ap += 1.0;
    del *= z / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  return sum;
}

// Modified Lentz continued fraction so that Q = prefactor * cf.
double upper_fraction(double k, double z) {
  double b = z + 1.0 - k;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxSeriesTerms; ++i) {
    const double an = -i * (i - k);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

void check_inc_gamma_args(double k, double z) {
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("incomplete gamma: shape must be positive");
  if (!(z >= 0.0)) throw DomainError("incomplete gamma: argument must be non-negative");
}

double beta_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxSeriesTerms; ++m) {
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
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
  if (std::isinf(x)) return kInf;
  if (x < 0.5) return log_gamma(x + 1.0) - std::log(x);
  const double xm1 = x - 1.0;
  double a = kLanczos[0];
  const double t = xm1 + kLanczosG + 0.5;
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (xm1 + static_cast<double>(i));
  return 0.5 * std::log(2.0 * std::numbers::pi) + (xm1 + 0.5) * std::log(t) - t + std::log(a);
}

double gamma_fn(double x) {
  if (!(x > 0.0)) throw DomainError("gamma_fn: argument must be positive");
  // Small integers are exact factorials.
  if (x <= 20.0 && x == std::floor(x)) {
    double f = 1.0;
    for (int i = 2; i < static_cast<int>(x); ++i) f *= i;
    return f;
  }
  return std::exp(log_gamma(x));
}

double inc_gamma_ratio(double k, double z) {
  check_inc_gamma_args(k, z);
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return 1.0;
  return boost::math::gamma_p(k, z, Policy());
}

double inc_gamma_upper(double k, double z) {
  check_inc_gamma_args(k, z);
  if (z == 0.0) return 1.0;
  if (std::isinf(z)) return 0.0;
  return boost::math::gamma_q(k, z, Policy());
}

// Below kLogFloor the tail is rebuilt in log space; there z is far from k and
// the series or fraction converges quickly.
double log_inc_gamma_lower(double k, double z) {
  check_inc_gamma_args(k, z);
  if (z == 0.0) return -kInf;
  if (std::isinf(z)) return 0.0;
  if (z >= k + 1.0) return std::log1p(-boost::math::gamma_q(k, z, Policy()));
  const double p = boost::math::gamma_p(k, z, Policy());
  if (p > kLogFloor) return std::log(p);
  return std::min(0.0, log_gamma_prefactor(k, z) + std::log(lower_series(k, z)));
}

double log_inc_gamma_upper(double k, double z) {
  check_inc_gamma_args(k, z);
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return -kInf;
  if (z < k + 1.0) return std::log1p(-boost::math::gamma_p(k, z, Policy()));
  const double q = boost::math::gamma_q(k, z, Policy());
  if (q > kLogFloor) return std::log(q);
  return std::min(0.0, log_gamma_prefactor(k, z) + std::log(upper_fraction(k, z)));
}

double inc_gamma_inverse(double k, double p) {
  if (!(k > 0.0)) throw DomainError("inc_gamma_inverse: shape must be positive");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("inc_gamma_inverse: probability must lie in (0, 1)");
  return p <= 0.5 ? boost::math::gamma_p_inv(k, p, Policy()) : boost::math::gamma_q_inv(k, 1.0 - p, Policy());
}

double inc_gamma_upper_inverse(double k, double q) {
  if (!(k > 0.0)) throw DomainError("inc_gamma_upper_inverse: shape must be positive");
  if (!(q > 0.0 && q < 1.0)) throw DomainError("inc_gamma_upper_inverse: probability must lie in (0, 1)");
  return boost::math::gamma_q_inv(k, q, Policy());
}

double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

double inc_beta_ratio(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("inc_beta_ratio: shapes must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_front) * beta_fraction(a, b, x) / a;
  return 1.0 - std::exp(log_front) * beta_fraction(b, a, 1.0 - x) / b;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double log_normal_cdf(double z) {
  if (z > -35.0) return std::log(normal_cdf(z));
  // Asymptotic Mills-ratio expansion for the far left tail.
  const double z2 = z * z;
  const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2) + 105.0 / (z2 * z2 * z2 * z2);
  return -0.5 * z2 - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(-z) + std::log(series);
}

double log_normal_sf(double z) { return log_normal_cdf(-z); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: probability must lie in (0, 1)");
  // Acklam's rational approximation followed by one Halley step.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Refine against whichever tail is small so the correction keeps precision.
  for (int i = 0; i < 2; ++i) {
    // Φ(x) - p; for x >= 0 use 1 - p (exact for p >= 0.5) minus the upper tail.
    const double e = x < 0.0 ? normal_cdf(x) - p : (1.0 - p) - normal_sf(x);
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    if (!std::isfinite(u)) break;
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double log1mexp(double x) {
  if (x > 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (x > -std::numbers::ln2) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

double log_add_exp(double a, double b) {
  const double m = std::max(a, b);
  if (m == -kInf) return -kInf;
  if (m == kInf) return kInf;
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace locfit::special
