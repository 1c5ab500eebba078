#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace locfit {

/// Ordered real parameters of a family. Domain constraints live on the family.
using ParamVector = std::vector<double>;
/// Initial points for the optimizer.
using Grid = std::vector<ParamVector>;

/// How a parameter reacts to the data when building default start grids.
enum class ParamRole {
  shape,     // {0.5, 1, 2}
  scale,     // {0.5, 1, 2} * sample scale
  rate,      // {0.5, 1, 2} / sample scale
  unit,      // {0.25, 0.5, 0.75}, open (0, 1) parameters
  location,  // moment center, plus/minus one spread
  spread,    // {0.5, 1, 2} * spread
};

struct ParamDomain {
  std::string name;
  double lower;
  double upper;
  ParamRole role;
  bool lower_closed = false;
  bool upper_closed = false;

  bool contains(double v) const;
};

/// Moments that drive data-adaptive start grids.
struct SampleSummary {
  double mean = 1.0;
  double sd = 1.0;
  double log_mean = 0.0;
  double log_sd = 1.0;

  static SampleSummary of(std::span<const double> values);
  /// Data-independent summary used for fixed generic grids.
  static SampleSummary generic() { return {}; }
};

using ParamFn = std::function<double(std::span<const double>, double)>;

struct FamilyOps {
  ParamFn log_pdf;
  ParamFn cdf;       // empty: adaptive integration of the density
  ParamFn quantile;  // empty: bracketed root finding on the cdf
  std::function<Grid(const SampleSummary&)> grid;  // empty: built from parameter roles
};

/// A named distribution family. Immutable after construction; every method is
/// a pure function of its arguments and is safe to call concurrently.
class Family {
 public:
  Family(std::string name, std::vector<ParamDomain> domains, double support_lower, double support_upper,
         FamilyOps ops);

  const std::string& name() const noexcept { return name_; }
  std::size_t param_count() const noexcept { return domains_.size(); }
  std::span<const ParamDomain> domains() const noexcept { return domains_; }
  double support_lower() const noexcept { return support_lower_; }
  double support_upper() const noexcept { return support_upper_; }

  bool in_domain(std::span<const double> params) const;
  /// Throws DomainError naming the offending parameter.
  void check(std::span<const double> params) const;

  double log_pdf(std::span<const double> params, double x) const;
  double pdf(std::span<const double> params, double x) const;
  double cdf(std::span<const double> params, double x) const;
  double quantile(std::span<const double> params, double q) const;
  /// n inverse-transform variates; identical output for identical seeds.
  std::vector<double> draw(std::span<const double> params, std::size_t n, std::uint64_t seed) const;

  Grid default_grid(const SampleSummary& summary = SampleSummary::generic()) const;

  // Hot-loop variants: the caller has already validated the parameters.
  double log_pdf_unchecked(std::span<const double> params, double x) const { return ops_.log_pdf(params, x); }
  double cdf_unchecked(std::span<const double> params, double x) const;
  double quantile_unchecked(std::span<const double> params, double q) const;

  const FamilyOps& ops() const noexcept { return ops_; }

 private:
  double numeric_cdf(std::span<const double> params, double x) const;
  double numeric_quantile(std::span<const double> params, double q) const;

  std::string name_;
  std::vector<ParamDomain> domains_;
  double support_lower_;
  double support_upper_;
  FamilyOps ops_;
};

/// Grid from parameter roles: the Cartesian product of each role's three values.
Grid role_grid(std::span<const ParamDomain> domains, const SampleSummary& summary, bool log_moments);

/// Uniform variates on the open interval (0, 1), platform independent.
class UnitUniform {
 public:
  explicit UnitUniform(std::uint64_t seed);
  double operator()();

 private:
  std::mt19937_64 engine_;
};

}  // namespace locfit
