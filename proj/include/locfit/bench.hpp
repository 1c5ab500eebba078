#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "locfit/mle.hpp"

namespace locfit {

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Percentile bootstrap interval for the mean. Deterministic given the seed and
/// invariant to the order of the values.
Interval bootstrap_ci(std::span<const double> values, double level = 0.95, std::size_t resamples = 1000,
                      std::uint64_t seed = 0);

struct TimingAggregate {
  std::string family;
  std::string method;
  std::size_t n_starts = 0;
  std::size_t n_converged = 0;
  std::int64_t mean_all_ns = 0;
  std::optional<std::int64_t> mean_converged_ns;  // empty when nothing converged
  Interval ci_all;                                // nanoseconds
  std::optional<Interval> ci_converged;
};

struct BootstrapOptions {
  double level = 0.95;
  std::size_t resamples = 1000;
  std::uint64_t seed = 0;
};

/// Mean elapsed time per start, over all starts and over converged ones.
/// Throws ContractError on empty input.
TimingAggregate aggregate_timings(std::span<const FitOutcome> outcomes, const BootstrapOptions& bootstrap = {});

}  // namespace locfit
