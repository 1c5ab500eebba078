#include "locfit/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "locfit/errors.hpp"

namespace locfit {
namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;
constexpr double kInitialStep = 0.25;

}  // namespace

void OptimizerSettings::validate() const {
  if (max_iterations < 1) throw ContractError("max_iterations must be at least 1");
  if (!(f_rel_tol > 0.0) || !(x_abs_tol > 0.0)) throw ContractError("optimizer tolerances must be positive");
  if (!std::isfinite(penalty_value)) throw ContractError("penalty_value must be finite");
}

OptimizeResult optimize(const Objective& objective, ParamVector init, const OptimizerSettings& settings) {
  settings.validate();
  const std::size_t d = init.size();
  OptimizeResult out;

  auto eval = [&](std::span<const double> x) {
    ++out.evaluations;
    const double v = objective(x);
    return std::isfinite(v) ? std::max(v, settings.penalty_value) : settings.penalty_value;
  };

  const double f0 = objective(init);
  ++out.evaluations;
  if (!std::isfinite(f0) || f0 <= settings.penalty_value) {
    out.x = std::move(init);
    out.value = settings.penalty_value;
    return out;
  }
  if (d == 0) {
    out.x = std::move(init);
    out.value = f0;
    out.converged = true;
    return out;
  }

  std::vector<ParamVector> simplex(d + 1, init);
  std::vector<double> f(d + 1, f0);
  auto build = [&](const ParamVector& base, double base_value) {
    simplex.assign(d + 1, base);
    f[0] = base_value;
    for (std::size_t i = 0; i < d; ++i) {
      simplex[i + 1][i] += kInitialStep;
      f[i + 1] = eval(simplex[i + 1]);
    }
  };
  build(init, f0);

  std::vector<std::size_t> order(d + 1);
  ParamVector centroid(d), trial(d), trial2(d);
  auto along = [&](double t, ParamVector& dst) {
    const auto& worst = simplex[order[d]];
    for (std::size_t j = 0; j < d; ++j) dst[j] = centroid[j] + t * (centroid[j] - worst[j]);
  };

  // One restart from the best vertex guards against a collapsed simplex.
  int restarts_left = 1;
  while (out.iterations < settings.max_iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] > f[b]; });
    const double fb = f[order[0]];
    const double fw = f[order[d]];
    double diameter = 0.0;
    for (std::size_t i = 1; i <= d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        diameter = std::max(diameter, std::abs(simplex[order[i]][j] - simplex[order[0]][j]));
      }
    }
    const bool flat = std::abs(fb - fw) <= settings.f_rel_tol * std::max(std::abs(fb), 1.0) ||
                      (fb == settings.penalty_value && fw == settings.penalty_value);
    if (flat && diameter < settings.x_abs_tol) {
      if (restarts_left-- > 0 && fb > settings.penalty_value) {
        const ParamVector best = simplex[order[0]];
        build(best, fb);
        continue;
      }
      out.converged = fb > settings.penalty_value;
      break;
    }
    ++out.iterations;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) centroid[j] += simplex[order[i]][j];
    }
    for (double& c : centroid) c /= static_cast<double>(d);

    along(kReflect, trial);
    const double fr = eval(trial);
    const double second_worst = f[order[d - 1]];
    if (fr > fb) {
      along(kExpand, trial2);
      const double fe = eval(trial2);
      if (fe > fr) {
        simplex[order[d]] = trial2;
        f[order[d]] = fe;
      } else {
        simplex[order[d]] = trial;
        f[order[d]] = fr;
      }
      continue;
    }
    if (fr > second_worst) {
      simplex[order[d]] = trial;
      f[order[d]] = fr;
      continue;
    }
    const bool outside = fr > fw;
    along(outside ? kContract : -kContract, trial2);
    const double fc = eval(trial2);
    if (fc > (outside ? fr : fw)) {
      simplex[order[d]] = trial2;
      f[order[d]] = fc;
      continue;
    }
    const ParamVector best = simplex[order[0]];
    for (std::size_t i = 1; i <= d; ++i) {
      auto& v = simplex[order[i]];
      for (std::size_t j = 0; j < d; ++j) v[j] = best[j] + kShrink * (v[j] - best[j]);
      f[order[i]] = eval(v);
    }
  }

  const auto best = std::max_element(f.begin(), f.end()) - f.begin();
  out.x = simplex[best];
  out.value = f[best];
  return out;
}

Reparam::Reparam(std::span<const ParamDomain> domains) {
  for (const auto& d : domains) bounds_.push_back({d.lower, d.upper});
}

ParamVector Reparam::to_free(std::span<const double> params) const {
  ParamVector z(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto [lo, hi] = bounds_[i];
    const double x = params[i];
    if (std::isfinite(lo) && std::isfinite(hi)) {
      const double u = (x - lo) / (hi - lo);
      z[i] = std::log(u) - std::log1p(-u);
    } else if (std::isfinite(lo)) {
      z[i] = std::log(x - lo);
    } else if (std::isfinite(hi)) {
      z[i] = std::log(hi - x);
    } else {
      z[i] = x;
    }
  }
  return z;
}

void Reparam::to_params(std::span<const double> free, std::span<double> params) const {
  for (std::size_t i = 0; i < free.size(); ++i) {
    const auto [lo, hi] = bounds_[i];
    const double z = free[i];
    if (std::isfinite(lo) && std::isfinite(hi)) {
      params[i] = lo + (hi - lo) / (1.0 + std::exp(-z));
    } else if (std::isfinite(lo)) {
      params[i] = lo + std::exp(z);
    } else if (std::isfinite(hi)) {
      params[i] = hi - std::exp(z);
    } else {
      params[i] = z;
    }
  }
}

ParamVector Reparam::to_params(std::span<const double> free) const {
  ParamVector p(free.size());
  to_params(free, p);
  return p;
}

}  // namespace locfit
