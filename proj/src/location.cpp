#include "locfit/location.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "locfit/errors.hpp"

namespace locfit {
namespace {

void require_size(std::span<const double> xs, std::size_t n, const char* who) {
  if (xs.size() < n) {
    throw SampleTooSmall(std::string(who) + ": need at least " + std::to_string(n) + " observations, got " +
                         std::to_string(xs.size()));
  }
}

LocationEstimate pulled_back(Estimator method, std::span<const double> xs, double pull,
                             const EstimatorConfig& config) {
  LocationEstimate e;
  e.method = method;
  e.sample_min = *std::min_element(xs.begin(), xs.end());
  e.sample_size = xs.size();
  e.config_used = config;
  e.c_hat = e.sample_min - pull;
  if (pull == 0.0) e.warnings.emplace_back("zero dispersion: estimate equals the sample minimum");
  return e;
}

}  // namespace

std::string_view estimator_name(Estimator e) {
  switch (e) {
    case Estimator::c1: return "c1";
    case Estimator::c2: return "c2";
    case Estimator::c3: return "c3";
    case Estimator::c4: return "c4";
  }
  return "";
}

std::optional<Estimator> parse_estimator(std::string_view name) {
  for (Estimator e : {Estimator::c1, Estimator::c2, Estimator::c3, Estimator::c4}) {
    if (estimator_name(e) == name) return e;
  }
  return std::nullopt;
}

void EstimatorConfig::validate() const {
  if (!(k_base > 1.0) || !std::isfinite(k_base)) throw DomainError("k_base must be a finite number above 1");
  if (!(nu > 0.0 && nu < 1.0)) throw DomainError("nu must lie in (0, 1)");
  if (!(q_min > 0.0 && q_min < 1.0)) throw DomainError("q_min must lie in (0, 1)");
}

double sample_mean(std::span<const double> xs) {
  require_size(xs, 1, "mean");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  require_size(xs, 2, "standard deviation");
  const double m = sample_mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double coefficient_of_variation(std::span<const double> xs) {
  require_size(xs, 2, "coefficient of variation");
  const double m = sample_mean(xs);
  if (m == 0.0) throw UndefinedCV("coefficient of variation: sample mean is zero");
  return sample_sd(xs) / m;
}

LocationEstimate estimate_c1(std::span<const double> xs, const EstimatorConfig& config) {
  config.validate();
  const double cv = coefficient_of_variation(xs);
  const double m = *std::min_element(xs.begin(), xs.end());
  const double log_k_n = std::log(static_cast<double>(xs.size())) / std::log(config.k_base);
  return pulled_back(Estimator::c1, xs, std::abs(m * cv) / log_k_n, config);
}

LocationEstimate estimate_c2(std::span<const double> xs) {
  require_size(xs, 2, "c2");
  const double n = static_cast<double>(xs.size());
  return pulled_back(Estimator::c2, xs, sample_sd(xs) / n, {});
}

LocationEstimate estimate_c3(std::span<const double> xs) {
  require_size(xs, 3, "c3");
  const double n = static_cast<double>(xs.size());
  return pulled_back(Estimator::c3, xs, sample_sd(xs) * std::sqrt(std::log(std::log(n)) / (2.0 * n)), {});
}

LocationEstimate estimate_c4(std::span<const double> xs, const EstimatorConfig& config) {
  config.validate();
  require_size(xs, 2, "c4");
  const double n = static_cast<double>(xs.size());
  return pulled_back(Estimator::c4, xs, sample_sd(xs) * std::sqrt(-std::log(config.nu / 2.0) / (2.0 * n)), config);
}

LocationEstimate estimate_location(Estimator method, std::span<const double> xs, const EstimatorConfig& config) {
  switch (method) {
    case Estimator::c1: return estimate_c1(xs, config);
    case Estimator::c2: return estimate_c2(xs);
    case Estimator::c3: return estimate_c3(xs);
    case Estimator::c4: return estimate_c4(xs, config);
  }
  throw ContractError("unknown estimator");
}

double min_cdf(const std::function<double(double)>& base_cdf, std::size_t n, double x) {
  if (n < 1) throw ContractError("min_cdf: n must be at least 1");
  const double F = base_cdf(x);
  if (F >= 1.0) return 1.0;
  return -std::expm1(static_cast<double>(n) * std::log1p(-F));
}

double min_quantile(const std::function<double(double)>& base_quantile, std::size_t n, double q) {
  if (n < 1) throw ContractError("min_quantile: n must be at least 1");
  if (!(q > 0.0 && q < 1.0)) throw DomainError("min_quantile: probability must lie in (0, 1)");
  return base_quantile(-std::expm1(std::log1p(-q) / static_cast<double>(n)));
}

ShiftedSample shift_sample(std::span<const double> xs, double c) {
  ShiftedSample out;
  out.values.reserve(xs.size());
  for (double x : xs) out.values.push_back(x - c);
  if (!out.values.empty() && *std::min_element(out.values.begin(), out.values.end()) == 0.0) {
    out.warning = "shifted sample has minimum 0; families with f(0) = 0 cannot fit it";
  }
  return out;
}

}  // namespace locfit
