#include "locfit/selection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "locfit/errors.hpp"

namespace locfit {
namespace {

constexpr std::array<Metric, 6> kMetrics = {Metric::neg2l, Metric::aic, Metric::bic,
                                            Metric::caic,  Metric::hqic, Metric::cv_neg2l};

// Uniform integer in [0, bound) by rejection; independent of the standard library's distributions.
std::uint64_t below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % bound;
}

// Rows of one sample set ordered best first.
std::vector<const ReportRow*> ranked(std::span<const ReportRow> rows, std::size_t set, Metric metric) {
  std::vector<const ReportRow*> out;
  for (const auto& r : rows) {
    if (r.sample_set == set && r.metrics.value(metric)) out.push_back(&r);
  }
  std::stable_sort(out.begin(), out.end(), [metric](const ReportRow* a, const ReportRow* b) {
    const double va = *a->metrics.value(metric);
    const double vb = *b->metrics.value(metric);
    if (va != vb) return va < vb;
    if (a->metrics.k != b->metrics.k) return a->metrics.k < b->metrics.k;
    if (a->family != b->family) return a->family < b->family;
    return a->method < b->method;
  });
  return out;
}

std::set<std::size_t> sample_sets(std::span<const ReportRow> rows) {
  std::set<std::size_t> sets;
  for (const auto& r : rows) sets.insert(r.sample_set);
  return sets;
}

}  // namespace

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::neg2l: return "neg2l";
    case Metric::aic: return "aic";
    case Metric::caic: return "caic";
    case Metric::hqic: return "hqic";
    case Metric::bic: return "bic";
    case Metric::cv_neg2l: return "cv_neg2l";
  }
  return "";
}

std::optional<Metric> parse_metric(std::string_view name) {
  for (Metric m : kMetrics) {
    if (metric_name(m) == name) return m;
  }
  return std::nullopt;
}

std::span<const Metric> all_metrics() { return kMetrics; }

std::optional<double> MetricSet::value(Metric m) const {
  switch (m) {
    case Metric::neg2l: return neg2l;
    case Metric::aic: return aic;
    case Metric::caic: return caic;
    case Metric::hqic: return hqic;
    case Metric::bic: return bic;
    case Metric::cv_neg2l: return cv_neg2l;
  }
  return std::nullopt;
}

MetricSet criteria(double neg2l, std::size_t k, std::size_t n) {
  if (n <= k + 1) {
    throw ContractError("caic undefined: n = " + std::to_string(n) + " must exceed k + 1 = " + std::to_string(k + 1));
  }
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  MetricSet m;
  m.neg2l = neg2l;
  m.k = k;
  m.n = n;
  m.aic = neg2l + 2.0 * kd;
  m.caic = neg2l + 2.0 * kd * nd / (nd - kd - 1.0);
  m.hqic = neg2l + 2.0 * kd * std::log(std::log(nd));
  m.bic = neg2l + kd * std::log(nd);
  return m;
}

MetricSet metrics(const FitOutcome& fit, std::size_t n) {
  return criteria(fit.neg2l, charged_parameters(fit.params.size(), fit.method), n);
}

std::vector<std::vector<std::size_t>> cv_folds(std::size_t n, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw ContractError("cross-validation needs at least 2 folds");
  if (n < folds) throw SampleTooSmall("cross-validation: " + std::to_string(folds) + " folds need at least as many points");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[below(rng, i + 1)]);

  std::vector<std::vector<std::size_t>> out(folds);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t size = n / folds + (f < n % folds ? 1 : 0);
    out[f].assign(perm.begin() + pos, perm.begin() + pos + size);
    pos += size;
  }
  return out;
}

double held_out_loglik(const Family& family, const FitOutcome& fit, std::span<const double> points,
                       double penalty_value) {
  const double c = fit.c_hat.value_or(0.0);
  double total = 0.0;
  for (double x : points) {
    const double v = family.log_pdf_unchecked(fit.params, x - c);
    total += std::isfinite(v) ? v : penalty_value;
  }
  return total;
}

double cross_validated_neg2l(const Family& family, Method method, std::span<const double> sample, std::size_t folds,
                             std::uint64_t seed, const FitOptions& options) {
  const auto parts = cv_folds(sample.size(), folds, seed);
  double sum = 0.0;
  for (std::size_t f = 0; f < parts.size(); ++f) {
    std::vector<bool> held(sample.size(), false);
    for (std::size_t i : parts[f]) held[i] = true;
    std::vector<double> train;
    std::vector<double> test;
    for (std::size_t i = 0; i < sample.size(); ++i) (held[i] ? test : train).push_back(sample[i]);
    FitOutcome best;
    try {
      best = fit(family, method, train, options).best;
    } catch (const std::exception& e) {
      throw CvFailed(f, e.what());
    }
    sum += -2.0 * held_out_loglik(family, best, test, options.optimizer.penalty_value);
  }
  return sum / static_cast<double>(parts.size());
}

std::vector<ReportRow> best_family_per_method(std::span<const ReportRow> rows, Metric metric) {
  std::vector<ReportRow> out;
  for (std::size_t set : sample_sets(rows)) {
    std::set<Method> seen;
    for (const ReportRow* r : ranked(rows, set, metric)) {
      if (seen.insert(r->method).second) out.push_back(*r);
    }
  }
  return out;
}

std::vector<std::optional<double>> quality_deltas(std::span<const ReportRow> rows, Metric metric) {
  std::map<std::size_t, double> best;
  for (const auto& r : rows) {
    const auto v = r.metrics.value(metric);
    if (!v) continue;
    auto [it, inserted] = best.try_emplace(r.sample_set, *v);
    if (!inserted) it->second = std::min(it->second, *v);
  }
  std::vector<std::optional<double>> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    const auto v = r.metrics.value(metric);
    out.push_back(v ? std::optional<double>(best.at(r.sample_set) - *v) : std::nullopt);
  }
  return out;
}

WinTable win_counts(std::span<const ReportRow> rows, Metric metric, int place) {
  if (place != 1 && place != 2) throw ContractError("place must be 1 or 2");
  WinTable table;
  for (const auto& r : rows) table.try_emplace({r.family, r.method}, 0);
  for (std::size_t set : sample_sets(rows)) {
    const auto order = ranked(rows, set, metric);
    if (order.size() >= static_cast<std::size_t>(place)) {
      const ReportRow* r = order[place - 1];
      ++table[{r->family, r->method}];
    }
  }
  return table;
}

}  // namespace locfit
