#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace locfit {

enum class Estimator { c1, c2, c3, c4 };

std::string_view estimator_name(Estimator e);
std::optional<Estimator> parse_estimator(std::string_view name);

struct EstimatorConfig {
  double k_base = 10.0;  // log base in c1
  double nu = 0.05;      // DKW confidence level in c4
  double q_min = 0.5;    // quantile of the minimum used by iteratedC

  /// Throws DomainError on out-of-range values.
  void validate() const;
};

struct LocationEstimate {
  double c_hat = 0.0;
  Estimator method = Estimator::c2;
  double sample_min = 0.0;
  std::size_t sample_size = 0;
  EstimatorConfig config_used;
  std::vector<std::string> warnings;
};

double sample_mean(std::span<const double> xs);
/// Standard deviation with the n - 1 denominator.
double sample_sd(std::span<const double> xs);

/// sd / mean. Throws SampleTooSmall for n < 2, UndefinedCV for a zero mean.
double coefficient_of_variation(std::span<const double> xs);

LocationEstimate estimate_c1(std::span<const double> xs, const EstimatorConfig& config = {});
LocationEstimate estimate_c2(std::span<const double> xs);
LocationEstimate estimate_c3(std::span<const double> xs);
LocationEstimate estimate_c4(std::span<const double> xs, const EstimatorConfig& config = {});
LocationEstimate estimate_location(Estimator method, std::span<const double> xs, const EstimatorConfig& config = {});

/// cdf of the minimum of n iid draws: 1 - (1 - F(x))^n.
double min_cdf(const std::function<double(double)>& base_cdf, std::size_t n, double x);
/// Quantile of the minimum of n iid draws: F^-1(1 - (1 - q)^(1/n)).
double min_quantile(const std::function<double(double)>& base_quantile, std::size_t n, double q);

struct ShiftedSample {
  std::vector<double> values;
  std::optional<std::string> warning;  // set when the shifted minimum is exactly 0
};

ShiftedSample shift_sample(std::span<const double> xs, double c);

}  // namespace locfit
