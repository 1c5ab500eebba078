#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "locfit/mle.hpp"

namespace locfit {

enum class Metric { neg2l, aic, caic, hqic, bic, cv_neg2l };

std::string_view metric_name(Metric m);
std::optional<Metric> parse_metric(std::string_view name);
std::span<const Metric> all_metrics();

struct MetricSet {
  double neg2l = 0.0;
  double aic = 0.0;
  double caic = 0.0;
  double hqic = 0.0;
  double bic = 0.0;
  std::optional<double> cv_neg2l;
  std::size_t k = 0;  // parameters charged
  std::size_t n = 0;

  std::optional<double> value(Metric m) const;
};

/// Criteria for a given -2 loglik. Throws ContractError when n <= k + 1.
MetricSet criteria(double neg2l, std::size_t k, std::size_t n);
/// Criteria for a fit; k follows charged_parameters().
MetricSet metrics(const FitOutcome& fit, std::size_t n);

/// Seeded permutation of 0..n-1 cut into contiguous folds whose sizes differ by at most one.
std::vector<std::vector<std::size_t>> cv_folds(std::size_t n, std::size_t folds, std::uint64_t seed);

/// Mean over folds of the held-out -2 loglik, refitting the full method on each
/// training part. Held-out points outside the fitted support score the penalty.
/// Throws CvFailed naming the fold when a training fit fails.
double cross_validated_neg2l(const Family& family, Method method, std::span<const double> sample,
                             std::size_t folds = 5, std::uint64_t seed = 0, const FitOptions& options = {});

/// Held-out log-likelihood of a fitted outcome, including its location.
double held_out_loglik(const Family& family, const FitOutcome& fit, std::span<const double> points,
                       double penalty_value);

struct ReportRow {
  std::size_t sample_set = 0;
  std::string family;
  Method method = Method::standard;
  MetricSet metrics;
};

/// Keeps, per (sample set, method), the family with the lowest metric value.
std::vector<ReportRow> best_family_per_method(std::span<const ReportRow> rows, Metric metric);

/// Per row: best value in its sample set minus the row's value (<= 0; 0 for the winner).
/// Empty for rows missing the metric.
std::vector<std::optional<double>> quality_deltas(std::span<const ReportRow> rows, Metric metric);

using WinTable = std::map<std::pair<std::string, Method>, std::size_t>;

/// Count of first (place = 1) or second (place = 2) places per (family, method).
/// Ties go to fewer parameters, then to the family name.
WinTable win_counts(std::span<const ReportRow> rows, Metric metric, int place);

}  // namespace locfit
