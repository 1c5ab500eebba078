#include "locfit/family.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "locfit/errors.hpp"
#include "locfit/quadrature.hpp"

namespace locfit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kQuantileIterations = 200;

double nudge_inside(const ParamDomain& d, double v) {
  if (d.contains(v)) return v;
  if (std::isfinite(d.lower) && std::isfinite(d.upper)) return 0.5 * (d.lower + d.upper);
  if (std::isfinite(d.lower) && v <= d.lower) return d.lower + 1.0;
  if (std::isfinite(d.upper) && v >= d.upper) return d.upper - 1.0;
  return v;
}

}  // namespace

bool ParamDomain::contains(double v) const {
  if (!std::isfinite(v)) return false;
  const bool above = lower_closed ? v >= lower : v > lower;
  const bool below = upper_closed ? v <= upper : v < upper;
  return above && below;
}

SampleSummary SampleSummary::of(std::span<const double> values) {
  SampleSummary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  if (!(s.sd > 0.0)) s.sd = s.mean != 0.0 ? 0.1 * std::abs(s.mean) : 1.0;

  const bool positive = std::all_of(values.begin(), values.end(), [](double v) { return v > 0.0; });
  if (positive && values.size() > 1) {
    double lm = 0.0;
    for (double v : values) lm += std::log(v);
    lm /= n;
    double lss = 0.0;
    for (double v : values) lss += (std::log(v) - lm) * (std::log(v) - lm);
    s.log_mean = lm;
    s.log_sd = std::sqrt(lss / (n - 1.0));
  } else if (s.mean > 0.0) {
    const double var = std::log1p((s.sd * s.sd) / (s.mean * s.mean));
    s.log_mean = std::log(s.mean) - 0.5 * var;
    s.log_sd = std::sqrt(var);
  } else {
    s.log_mean = 0.0;
    s.log_sd = 1.0;
  }
  if (!(s.log_sd > 0.0)) s.log_sd = 0.1;
  return s;
}

Grid role_grid(std::span<const ParamDomain> domains, const SampleSummary& summary, bool log_moments) {
  const double scale = summary.mean > 0.0 && std::isfinite(summary.mean) ? summary.mean : summary.sd;
  const double center = log_moments ? summary.log_mean : summary.mean;
  const double spread = log_moments ? summary.log_sd : summary.sd;

  std::vector<std::array<double, 3>> axes;
  axes.reserve(domains.size());
  for (const auto& d : domains) {
    std::array<double, 3> a{};
    switch (d.role) {
      case ParamRole::shape: a = {0.5, 1.0, 2.0}; break;
      case ParamRole::scale: a = {0.5 * scale, scale, 2.0 * scale}; break;
      case ParamRole::rate: a = {0.5 / scale, 1.0 / scale, 2.0 / scale}; break;
      case ParamRole::unit: a = {0.25, 0.5, 0.75}; break;
      case ParamRole::location: a = {center - spread, center, center + spread}; break;
      case ParamRole::spread: a = {0.5 * spread, spread, 2.0 * spread}; break;
    }
    for (auto& v : a) v = nudge_inside(d, v);
    axes.push_back(a);
  }

  Grid grid;
  std::vector<std::size_t> index(domains.size(), 0);
  while (true) {
    ParamVector p(domains.size());
    for (std::size_t i = 0; i < domains.size(); ++i) p[i] = axes[i][index[i]];
    grid.push_back(std::move(p));
    std::size_t pos = domains.size();
    while (pos > 0) {
      --pos;
      if (++index[pos] < 3) break;
      index[pos] = 0;
      if (pos == 0) return grid;
    }
    if (domains.empty()) return grid;
  }
}

UnitUniform::UnitUniform(std::uint64_t seed) : engine_(seed) {}

double UnitUniform::operator()() {
  // 53 random bits centred in their cell: never exactly 0 or 1.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

Family::Family(std::string name, std::vector<ParamDomain> domains, double support_lower, double support_upper,
               FamilyOps ops)
    : name_(std::move(name)),
      domains_(std::move(domains)),
      support_lower_(support_lower),
      support_upper_(support_upper),
      ops_(std::move(ops)) {
  if (!ops_.log_pdf) throw ContractError("family '" + name_ + "' needs a log-density");
  if (!(support_lower_ < support_upper_)) throw ContractError("family '" + name_ + "' has an empty support");
}

bool Family::in_domain(std::span<const double> params) const {
  if (params.size() != domains_.size()) return false;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!domains_[i].contains(params[i])) return false;
  }
  return true;
}

void Family::check(std::span<const double> params) const {
  if (params.size() != domains_.size()) {
    throw DomainError(name_ + ": expected " + std::to_string(domains_.size()) + " parameters, got " +
                      std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!domains_[i].contains(params[i])) {
      throw DomainError(name_ + ": parameter '" + domains_[i].name + "' = " + std::to_string(params[i]) +
                        " is outside its domain");
    }
  }
}

double Family::log_pdf(std::span<const double> params, double x) const {
  check(params);
  if (std::isnan(x)) throw DomainError(name_ + ": NaN argument");
  return ops_.log_pdf(params, x);
}

double Family::pdf(std::span<const double> params, double x) const { return std::exp(log_pdf(params, x)); }

double Family::cdf(std::span<const double> params, double x) const {
  check(params);
  if (std::isnan(x)) throw DomainError(name_ + ": NaN argument");
  return cdf_unchecked(params, x);
}

double Family::cdf_unchecked(std::span<const double> params, double x) const {
  if (x <= support_lower_) return 0.0;
  if (x >= support_upper_) return 1.0;
  const double v = ops_.cdf ? ops_.cdf(params, x) : numeric_cdf(params, x);
  return std::clamp(v, 0.0, 1.0);
}

double Family::quantile(std::span<const double> params, double q) const {
  check(params);
  if (!(q > 0.0 && q < 1.0)) throw DomainError(name_ + ": quantile probability must lie in (0, 1)");
  return quantile_unchecked(params, q);
}

double Family::quantile_unchecked(std::span<const double> params, double q) const {
  const double x = ops_.quantile ? ops_.quantile(params, q) : numeric_quantile(params, q);
  return std::clamp(x, support_lower_, support_upper_);
}

std::vector<double> Family::draw(std::span<const double> params, std::size_t n, std::uint64_t seed) const {
  check(params);
  if (n == 0) throw ContractError(name_ + ": draw needs n >= 1");
  UnitUniform uniform(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = quantile_unchecked(params, uniform());
  return out;
}

Grid Family::default_grid(const SampleSummary& summary) const {
  if (ops_.grid) return ops_.grid(summary);
  return role_grid(domains_, summary, false);
}

double Family::numeric_cdf(std::span<const double> params, double x) const {
  auto density = [&](double t) {
    const double v = std::exp(ops_.log_pdf(params, t));
    return std::isfinite(v) ? v : 0.0;
  };
  return integrate(density, support_lower_, x, 1e-13, 1e-11).value;
}

double Family::numeric_quantile(std::span<const double> params, double q) const {
  auto F = [&](double x) { return cdf_unchecked(params, x); };
  const double L = support_lower_;
  const double U = support_upper_;
  double lo;
  double hi;

  // Exponential expansion (or contraction toward a finite bound) until
  // F(lo) < q <= F(hi).
  if (std::isfinite(L) && std::isfinite(U)) {
    lo = L;
    hi = U;
  } else if (std::isfinite(L)) {
    double w = 1.0;
    if (F(L + w) >= q) {
      for (int i = 0; i < 1100 && w * 0.5 > 0.0 && F(L + w * 0.5) >= q; ++i) w *= 0.5;
      lo = L + w * 0.5;
      hi = L + w;
    } else {
      for (int i = 0; i < 2000 && F(L + 2.0 * w) < q; ++i) w *= 2.0;
      lo = L + w;
      hi = L + 2.0 * w;
    }
  } else if (std::isfinite(U)) {
    double w = 1.0;
    if (F(U - w) < q) {
      for (int i = 0; i < 1100 && w * 0.5 > 0.0 && F(U - w * 0.5) < q; ++i) w *= 0.5;
      lo = U - w;
      hi = U - w * 0.5;
    } else {
      for (int i = 0; i < 2000 && F(U - 2.0 * w) >= q; ++i) w *= 2.0;
      lo = U - 2.0 * w;
      hi = U - w;
    }
  } else {
    double w = 1.0;
    if (F(0.0) < q) {
      lo = 0.0;
      for (int i = 0; i < 2000 && F(w) < q; ++i) {
        lo = w;
        w *= 2.0;
      }
      hi = w;
    } else {
      hi = 0.0;
      for (int i = 0; i < 2000 && F(-w) >= q; ++i) {
        hi = -w;
        w *= 2.0;
      }
      lo = -w;
    }
  }

  // Bisection that splits geometrically relative to a finite lower bound
  // when the bracket spans orders of magnitude.
  auto split = [&](double a, double b) {
    if (std::isfinite(L) && a - L > 0.0 && (b - L) / (a - L) > 4.0) return L + std::sqrt((a - L) * (b - L));
    return 0.5 * (a + b);
  };

  double x = split(lo, hi);
  double last_width = hi - lo;
  for (int iter = 0; iter < kQuantileIterations; ++iter) {
    const double f = F(x) - q;
    if (std::abs(f) <= 1e-13) break;
    if (f < 0.0) lo = x; else hi = x;
    const double width = hi - lo;
    if (width <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) break;

    double next = std::numeric_limits<double>::quiet_NaN();
    const bool stalled = iter % 3 == 2 && width > 0.25 * last_width;
    if (iter % 3 == 2) last_width = width;
    if (!stalled) {
      const double dens = std::exp(ops_.log_pdf(params, x));
      if (dens > 0.0 && std::isfinite(dens)) next = x - f / dens;
    }
    if (!(next > lo && next < hi)) next = split(lo, hi);
    x = next;
  }
  return x;
}

}  // namespace locfit
