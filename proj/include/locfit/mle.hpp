#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "locfit/family.hpp"
#include "locfit/location.hpp"
#include "locfit/optimize.hpp"

namespace locfit {

enum class Method { standard, inferC, c1, c2, c3, c4, iteratedC };

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view name);
/// The seven methods in canonical order.
std::span<const Method> all_methods();
/// Parameters charged by the information criteria: the family's own, plus one for inferC.
std::size_t charged_parameters(std::size_t family_params, Method m);

struct FitOutcome {
  std::string family;
  Method method = Method::standard;
  ParamVector params;
  std::optional<double> c_hat;
  double loglik = 0.0;
  double neg2l = 0.0;
  bool converged = false;
  std::size_t n_evaluations = 0;
  std::chrono::nanoseconds elapsed{0};
  ParamVector init_point;
};

struct FitResult {
  FitOutcome best;
  std::vector<FitOutcome> starts;  // one per grid point, in grid order
  bool best_from_converged = true;
  std::vector<std::string> warnings;
};

enum class GridPolicy {
  adaptive,  // default grid built from the moments of the data being fitted
  fixed,     // default grid at the generic summary
};

struct FitOptions {
  GridPolicy grid_policy = GridPolicy::adaptive;
  std::optional<Grid> grid;  // explicit grid; overrides the policy
  EstimatorConfig estimator;
  OptimizerSettings optimizer;
  unsigned threads = 1;  // concurrent grid starts
};

/// Sum of log densities; settings.penalty_value when any term is -inf or NaN.
double log_likelihood(const Family& family, std::span<const double> params, std::span<const double> sample,
                      double penalty_value = OptimizerSettings{}.penalty_value);

FitResult fit_standard(const Family& family, std::span<const double> sample, const FitOptions& options = {});
/// Joint fit over (theta, c) with c = min(sample) - exp(u).
FitResult fit_infer_c(const Family& family, std::span<const double> sample, const FitOptions& options = {});
/// Shift by a location estimate, then fit as usual.
FitResult fit_with_estimator(const Family& family, std::span<const double> sample, Estimator estimator,
                             const FitOptions& options = {});
/// Fit over theta only, with c implied by the q_min quantile of the minimum.
FitResult fit_iterated_c(const Family& family, std::span<const double> sample, const FitOptions& options = {});

FitResult fit(const Family& family, Method method, std::span<const double> sample, const FitOptions& options = {});

}  // namespace locfit
