#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "locfit/family.hpp"

namespace locfit {

struct OptimizerSettings {
  std::size_t max_iterations = 500;
  double f_rel_tol = 1e-8;
  double x_abs_tol = 1e-8;
  double penalty_value = -1e300;  // stands in for log 0

  void validate() const;
};

struct OptimizeResult {
  ParamVector x;
  double value = 0.0;
  bool converged = false;
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead maximization in unconstrained coordinates. Non-finite objective
/// values are replaced by settings.penalty_value. Converges when both the
/// relative spread of the simplex values and its diameter fall below their
/// tolerances.
OptimizeResult optimize(const Objective& objective, ParamVector init, const OptimizerSettings& settings);

/// Bijection between a box-constrained parameter and the real line:
/// identity, log(x - lower), log(upper - x) or logit of the rescaled value.
class Reparam {
 public:
  explicit Reparam(std::span<const ParamDomain> domains);

  ParamVector to_free(std::span<const double> params) const;
  void to_params(std::span<const double> free, std::span<double> params) const;
  ParamVector to_params(std::span<const double> free) const;
  std::size_t size() const noexcept { return bounds_.size(); }

 private:
  struct Bound {
    double lower;
    double upper;
  };
  std::vector<Bound> bounds_;
};

}  // namespace locfit
