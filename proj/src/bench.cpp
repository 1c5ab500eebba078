#include "locfit/bench.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "locfit/errors.hpp"

namespace locfit {
namespace {

// Linear interpolation between order statistics (type 7).
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::int64_t mean_ns(const std::vector<std::int64_t>& xs) {
  std::int64_t sum = 0;
  for (auto x : xs) sum += x;
  const auto n = static_cast<std::int64_t>(xs.size());
  // round half away from zero
  return (sum + n / 2) / n;
}

Interval ns_interval(const std::vector<std::int64_t>& xs, const BootstrapOptions& b) {
  std::vector<double> v(xs.begin(), xs.end());
  const Interval ci = bootstrap_ci(v, b.level, b.resamples, b.seed);
  return {std::floor(ci.low), std::ceil(ci.high)};
}

}  // namespace

Interval bootstrap_ci(std::span<const double> values, double level, std::size_t resamples, std::uint64_t seed) {
  if (values.empty()) throw ContractError("bootstrap_ci: empty input");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("bootstrap_ci: level must lie in (0, 1)");
  if (resamples < 1) throw ContractError("bootstrap_ci: need at least one resample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  std::mt19937_64 rng(seed);
  std::vector<double> means(resamples);
  for (auto& m : means) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += sorted[rng() % n];
    m = s / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - level) / 2.0;
  return {quantile_sorted(means, tail), quantile_sorted(means, 1.0 - tail)};
}

TimingAggregate aggregate_timings(std::span<const FitOutcome> outcomes, const BootstrapOptions& bootstrap) {
  if (outcomes.empty()) throw ContractError("aggregate_timings: no outcomes");
  TimingAggregate t;
  t.family = outcomes.front().family;
  t.method = std::string(method_name(outcomes.front().method));
  std::vector<std::int64_t> all;
  std::vector<std::int64_t> conv;
  for (const auto& o : outcomes) {
    all.push_back(o.elapsed.count());
    if (o.converged) conv.push_back(o.elapsed.count());
  }
  std::sort(all.begin(), all.end());
  std::sort(conv.begin(), conv.end());
  t.n_starts = all.size();
  t.n_converged = conv.size();
  t.mean_all_ns = mean_ns(all);
  t.ci_all = ns_interval(all, bootstrap);
  if (!conv.empty()) {
    t.mean_converged_ns = mean_ns(conv);
    t.ci_converged = ns_interval(conv, bootstrap);
  }
  return t;
}

}  // namespace locfit
