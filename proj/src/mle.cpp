#include "locfit/mle.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <thread>

#include "locfit/errors.hpp"

namespace locfit {
namespace {

constexpr std::array<Method, 7> kMethods = {Method::standard, Method::inferC,    Method::c1, Method::c2,
                                            Method::c3,       Method::c4,        Method::iteratedC};

double loglik_unchecked(const Family& family, std::span<const double> params, std::span<const double> sample,
                        double penalty) {
  double total = 0.0;
  for (double x : sample) {
    const double v = family.log_pdf_unchecked(params, x);
    if (!std::isfinite(v)) {
      if (v == std::numeric_limits<double>::infinity()) return std::numeric_limits<double>::infinity();
      return penalty;
    }
    total += v;
  }
  return std::max(total, penalty);
}

// One optimization problem in free coordinates, plus how to read a solution back.
struct Problem {
  std::string family;
  Method method;
  std::vector<ParamVector> free_starts;
  Grid init_points;  // user-facing start for each free start
  Objective objective;
  std::function<std::pair<ParamVector, std::optional<double>>(std::span<const double>)> decode;
};

template <class Fn>
void for_each_index(std::size_t count, unsigned threads, Fn&& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

FitResult solve(const Problem& problem, const FitOptions& options) {
  const auto& settings = options.optimizer;
  settings.validate();
  FitResult result;
  result.starts.resize(problem.free_starts.size());
  for_each_index(problem.free_starts.size(), options.threads, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    const OptimizeResult r = optimize(problem.objective, problem.free_starts[i], settings);
    const auto t1 = std::chrono::steady_clock::now();

    FitOutcome& o = result.starts[i];
    o.family = problem.family;
    o.method = problem.method;
    auto [params, c_hat] = problem.decode(r.x);
    o.params = std::move(params);
    o.c_hat = c_hat;
    o.loglik = r.value > settings.penalty_value ? r.value : settings.penalty_value;
    o.neg2l = -2.0 * o.loglik;
    o.converged = r.converged && std::isfinite(o.loglik) && o.loglik > settings.penalty_value;
    o.n_evaluations = r.evaluations;
    o.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0);
    o.init_point = problem.init_points[i];
  });

  auto pick = [&](bool converged_only) -> const FitOutcome* {
    const FitOutcome* best = nullptr;
    for (const auto& o : result.starts) {
      if (converged_only && !o.converged) continue;
      if (!(o.loglik > settings.penalty_value)) continue;
      if (!best || o.loglik > best->loglik) best = &o;
    }
    return best;
  };
  const FitOutcome* best = pick(true);
  if (!best) {
    best = pick(false);
    result.best_from_converged = false;
  }
  if (!best) {
    throw FitFailed(problem.family + "/" + std::string(method_name(problem.method)) + ": all " +
                    std::to_string(result.starts.size()) + " starts ended without a finite likelihood");
  }
  result.best = *best;
  return result;
}

Grid resolve_grid(const Family& family, std::span<const double> data, const FitOptions& options) {
  if (options.grid) {
    for (const auto& p : *options.grid) family.check(p);
    return *options.grid;
  }
  if (options.grid_policy == GridPolicy::fixed) return family.default_grid();
  return family.default_grid(SampleSummary::of(data));
}

void require_sample(std::span<const double> sample, std::string_view who) {
  if (sample.empty()) throw ContractError("empty sample");
  for (double x : sample) {
    if (!std::isfinite(x)) throw DomainError("sample contains a non-finite value");
  }
  const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
  if (sample.size() > 1 && *lo == *hi) {
    throw FitFailed(std::string(who) + ": sample has zero dispersion, the likelihood is unbounded");
  }
}

// Data the location-aware methods build their adaptive grids on.
std::vector<double> pulled_back_data(std::span<const double> sample) {
  if (sample.size() < 2) return {sample.begin(), sample.end()};
  return shift_sample(sample, estimate_c2(sample).c_hat).values;
}

[[noreturn]] void rethrow_with_warnings(const FitFailed& e, const std::vector<std::string>& warnings) {
  std::string what = e.what();
  for (const auto& w : warnings) what += "; " + w;
  throw FitFailed(what);
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::standard: return "standard";
    case Method::inferC: return "inferC";
    case Method::c1: return "c1";
    case Method::c2: return "c2";
    case Method::c3: return "c3";
    case Method::c4: return "c4";
    case Method::iteratedC: return "iteratedC";
  }
  return "";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : kMethods) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

std::span<const Method> all_methods() { return kMethods; }

std::size_t charged_parameters(std::size_t family_params, Method m) {
  return family_params + (m == Method::inferC ? 1 : 0);
}

double log_likelihood(const Family& family, std::span<const double> params, std::span<const double> sample,
                      double penalty_value) {
  if (sample.empty()) throw ContractError("log_likelihood: empty sample");
  family.check(params);
  return loglik_unchecked(family, params, sample, penalty_value);
}

FitResult fit_standard(const Family& family, std::span<const double> sample, const FitOptions& options) {
  require_sample(sample, family.name() + "/standard");
  const Grid grid = resolve_grid(family, sample, options);
  const Reparam rp(family.domains());
  const double penalty = options.optimizer.penalty_value;
  const std::vector<double> data(sample.begin(), sample.end());

  Problem problem;
  problem.family = family.name();
  problem.method = Method::standard;
  problem.init_points = grid;
  for (const auto& p : grid) problem.free_starts.push_back(rp.to_free(p));
  problem.objective = [&family, rp, data, penalty](std::span<const double> z) {
    ParamVector p(z.size());
    rp.to_params(z, p);
    if (!family.in_domain(p)) return penalty;
    return loglik_unchecked(family, p, data, penalty);
  };
  problem.decode = [rp](std::span<const double> z) {
    return std::pair<ParamVector, std::optional<double>>{rp.to_params(z), std::nullopt};
  };
  return solve(problem, options);
}

FitResult fit_infer_c(const Family& family, std::span<const double> sample, const FitOptions& options) {
  require_sample(sample, family.name() + "/inferC");
  const double m = *std::min_element(sample.begin(), sample.end());
  const Grid grid = resolve_grid(family, pulled_back_data(sample), options);

  // Offsets d = m - c0 of the starting locations.
  std::vector<double> offsets;
  if (sample.size() >= 2) {
    const double c2 = estimate_c2(sample).c_hat;
    if (m > 0.0) {
      for (double c0 : {0.5 * m, 0.9 * m, c2}) offsets.push_back(m - std::max(c0, 0.0));
    } else {
      const double sd = sample_sd(sample);
      for (double d : {sd, 0.1 * sd, m - c2}) offsets.push_back(d);
    }
  } else if (m > 0.0) {
    offsets = {0.5 * m, 0.1 * m};
  }
  std::erase_if(offsets, [](double d) { return !(d > 0.0) || !std::isfinite(d); });
  if (offsets.empty()) throw FitFailed(family.name() + "/inferC: sample has no dispersion to place c below its minimum");

  const Reparam rp(family.domains());
  const std::size_t k = family.param_count();
  const double penalty = options.optimizer.penalty_value;
  std::vector<double> gaps;  // x - m, exact and non-negative
  for (double x : sample) gaps.push_back(x - m);

  Problem problem;
  problem.family = family.name();
  problem.method = Method::inferC;
  for (const auto& p : grid) {
    for (double d : offsets) {
      ParamVector z = rp.to_free(p);
      z.push_back(std::log(d));
      problem.free_starts.push_back(std::move(z));
      ParamVector init = p;
      init.push_back(m - d);
      problem.init_points.push_back(std::move(init));
    }
  }
  problem.objective = [&family, rp, gaps, k, penalty](std::span<const double> z) {
    ParamVector p(k);
    rp.to_params(z.first(k), p);
    if (!family.in_domain(p)) return penalty;
    const double d = std::exp(z[k]);
    if (!(d > 0.0) || !std::isfinite(d)) return penalty;
    double total = 0.0;
    for (double g : gaps) {
      const double v = family.log_pdf_unchecked(p, g + d);
      if (!std::isfinite(v)) return v > 0 ? v : penalty;
      total += v;
    }
    return std::max(total, penalty);
  };
  problem.decode = [rp, k, m](std::span<const double> z) {
    return std::pair<ParamVector, std::optional<double>>{rp.to_params(z.first(k)), m - std::exp(z[k])};
  };
  return solve(problem, options);
}

FitResult fit_with_estimator(const Family& family, std::span<const double> sample, Estimator estimator,
                             const FitOptions& options) {
  if (sample.empty()) throw ContractError("empty sample");
  const LocationEstimate est = estimate_location(estimator, sample, options.estimator);
  const ShiftedSample shifted = shift_sample(sample, est.c_hat);
  std::vector<std::string> warnings = est.warnings;
  if (shifted.warning) warnings.push_back(*shifted.warning);

  const Method method = *parse_method(estimator_name(estimator));
  FitResult result;
  try {
    result = fit_standard(family, shifted.values, options);
  } catch (const FitFailed& e) {
    rethrow_with_warnings(e, warnings);
  }
  result.warnings = std::move(warnings);
  result.best.method = method;
  result.best.c_hat = est.c_hat;
  for (auto& o : result.starts) {
    o.method = method;
    o.c_hat = est.c_hat;
  }
  return result;
}

FitResult fit_iterated_c(const Family& family, std::span<const double> sample, const FitOptions& options) {
  require_sample(sample, family.name() + "/iteratedC");
  options.estimator.validate();
  const double m = *std::min_element(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  // probability level of the q_min quantile of the minimum
  const double level = -std::expm1(std::log1p(-options.estimator.q_min) / n);
  const Grid grid = resolve_grid(family, pulled_back_data(sample), options);
  const Reparam rp(family.domains());
  const double penalty = options.optimizer.penalty_value;
  std::vector<double> gaps;
  for (double x : sample) gaps.push_back(x - m);

  auto min_offset = [&family, level](std::span<const double> p) {
    try {
      return family.quantile_unchecked(p, level);
    } catch (const std::exception&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  Problem problem;
  problem.family = family.name();
  problem.method = Method::iteratedC;
  problem.init_points = grid;
  for (const auto& p : grid) problem.free_starts.push_back(rp.to_free(p));
  problem.objective = [&family, rp, gaps, penalty, min_offset](std::span<const double> z) {
    ParamVector p(z.size());
    rp.to_params(z, p);
    if (!family.in_domain(p)) return penalty;
    const double q = min_offset(p);
    if (!std::isfinite(q)) return penalty;
    double total = 0.0;
    for (double g : gaps) {
      const double v = family.log_pdf_unchecked(p, g + q);
      if (!std::isfinite(v)) return v > 0 ? v : penalty;
      total += v;
    }
    return std::max(total, penalty);
  };
  problem.decode = [rp, m, min_offset](std::span<const double> z) {
    ParamVector p = rp.to_params(z);
    const double q = min_offset(p);
    return std::pair<ParamVector, std::optional<double>>{std::move(p), m - q};
  };
  return solve(problem, options);
}

FitResult fit(const Family& family, Method method, std::span<const double> sample, const FitOptions& options) {
  switch (method) {
    case Method::standard: return fit_standard(family, sample, options);
    case Method::inferC: return fit_infer_c(family, sample, options);
    case Method::c1: return fit_with_estimator(family, sample, Estimator::c1, options);
    case Method::c2: return fit_with_estimator(family, sample, Estimator::c2, options);
    case Method::c3: return fit_with_estimator(family, sample, Estimator::c3, options);
    case Method::c4: return fit_with_estimator(family, sample, Estimator::c4, options);
    case Method::iteratedC: return fit_iterated_c(family, sample, options);
  }
  throw ContractError("unknown method");
}

}  // namespace locfit
