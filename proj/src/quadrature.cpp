#include "locfit/quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "locfit/errors.hpp"

namespace locfit {
namespace {

constexpr std::array<double, 8> kXk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                       0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                       0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                       0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                       0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

QuadratureResult kronrod(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod_sum = fc * kWk[7];
  double gauss_sum = fc * kWg[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXk[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod_sum += kWk[j] * pair;
    if (j % 2 == 1) gauss_sum += kWg[j / 2] * pair;
  }
  return {kronrod_sum * half, std::abs((kronrod_sum - gauss_sum) * half)};
}

QuadratureResult adapt(const std::function<double(double)>& f, double a, double b, double abs_tol,
                       double rel_tol, int depth, QuadratureResult whole) {
  if (whole.error_estimate <= std::max(abs_tol, rel_tol * std::abs(whole.value)) || depth <= 0 ||
      b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b))) {
    return whole;
  }
  const double mid = 0.5 * (a + b);
  const auto left = kronrod(f, a, mid);
  const auto right = kronrod(f, mid, b);
  const auto l = adapt(f, a, mid, 0.5 * abs_tol, rel_tol, depth - 1, left);
  const auto r = adapt(f, mid, b, 0.5 * abs_tol, rel_tol, depth - 1, right);
  return {l.value + r.value, l.error_estimate + r.error_estimate};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                           double rel_tol, int max_depth) {
  if (std::isnan(a) || std::isnan(b)) throw DomainError("integrate: NaN bound");
  if (a == b) return {};
  if (a > b) {
    auto r = integrate(f, b, a, abs_tol, rel_tol, max_depth);
    r.value = -r.value;
    return r;
  }
  const bool lower_inf = std::isinf(a);
  const bool upper_inf = std::isinf(b);
  if (lower_inf && upper_inf) {
    // x = t / (1 - t^2), t in (-1, 1)
    auto g = [&](double t) {
      const double d = 1.0 - t * t;
      const double v = f(t / d) * (1.0 + t * t) / (d * d);
      return std::isfinite(v) ? v : 0.0;
    };
    return adapt(g, -1.0, 1.0, abs_tol, rel_tol, max_depth, kronrod(g, -1.0, 1.0));
  }
  if (upper_inf) {
    // x = a + t / (1 - t), t in [0, 1)
    auto g = [&](double t) {
      const double d = 1.0 - t;
      const double v = f(a + t / d) / (d * d);
      return std::isfinite(v) ? v : 0.0;
    };
    return adapt(g, 0.0, 1.0, abs_tol, rel_tol, max_depth, kronrod(g, 0.0, 1.0));
  }
  if (lower_inf) {
    // x = b - (1 - t) / t, t in (0, 1]
    auto g = [&](double t) {
      const double v = f(b - (1.0 - t) / t) / (t * t);
      return std::isfinite(v) ? v : 0.0;
    };
    return adapt(g, 0.0, 1.0, abs_tol, rel_tol, max_depth, kronrod(g, 0.0, 1.0));
  }
  return adapt(f, a, b, abs_tol, rel_tol, max_depth, kronrod(f, a, b));
}

}  // namespace locfit
