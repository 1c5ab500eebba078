#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "locfit/family.hpp"

namespace locfit {

// Lifetime and real-line families. Parameter order is fixed and part of the
// CLI contract (`--params`):
//   weibull  (lambda scale, k shape)
//   gamma    (alpha shape, theta scale)
//   ggamma   (a scale, b shape, k shape)
//   eweibull (sigma shape, nu shape, mu scale)
//   normal   (mu, sigma)
//   tnormal  (mu, sigma)            normal restricted to x > 0
//   lnormal  (mu, sigma)
//   kwcwg    (alpha in (0,1), beta, gamma rate, a, b)
//   ollgg    (alpha scale, tau, k, lambda)
Family weibull();
Family gamma();
Family generalized_gamma();
Family exponentiated_weibull();
Family normal();
Family truncated_normal();
Family lognormal();
Family kw_cwg();
Family oll_gg();

// Families supported on [0, 1], usable as the outer cdf of compose_cdf.
Family uniform_unit();
Family beta();
Family kumaraswamy();

/// Registry keys, in a stable order.
std::span<const std::string_view> family_names();
/// Built-in family by registry key; throws ContractError listing valid names.
const Family& family_by_name(std::string_view name);
bool is_family_name(std::string_view name);

/// New family with cdf G(F(x)) over the concatenated parameters (inner first).
Family compose_cdf(const Family& outer, const Family& inner);

/// Base family moved to support [c, inf): log f(y - c).
Family shift_by(const Family& base, double c);

/// Base family truncated at c and moved to the origin:
/// f(y + c) / (1 - F(c)) for y >= 0. Parameters stay those of the base.
Family truncated_family(const Family& base, double c);

/// Subfamily with some coordinates held fixed (nullopt = free).
Family freeze(const Family& base, std::vector<std::optional<double>> fixed);

/// A family bound to one parameter vector.
class Distribution {
 public:
  Distribution(Family family, ParamVector params);

  const Family& family() const noexcept { return family_; }
  const ParamVector& params() const noexcept { return params_; }

  double log_pdf(double x) const { return family_.log_pdf_unchecked(params_, x); }
  double pdf(double x) const;
  double cdf(double x) const { return family_.cdf_unchecked(params_, x); }
  double quantile(double q) const;
  std::vector<double> draw(std::size_t n, std::uint64_t seed) const { return family_.draw(params_, n, seed); }

 private:
  Family family_;
  ParamVector params_;
};

/// Truncated density of (family, params) at c. Throws DegenerateError when
/// F(c) = 1.
Distribution truncate_at(const Family& family, const ParamVector& params, double c);

}  // namespace locfit
