#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "locfit/distributions.hpp"
#include "locfit/errors.hpp"
#include "locfit/location.hpp"

using namespace locfit;
using doctest::Approx;

namespace {

const std::vector<double> kFive{1, 2, 3, 4, 5};

// mean 3, squared deviations 4 + 1 + 0 + 1 + 4 = 10, variance 10 / 4
const double kFiveSd = std::sqrt(2.5);

std::vector<double> standardized(std::size_t n, std::uint64_t seed, double min_value) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::vector<double> xs(n);
  for (auto& x : xs) x = z(rng);
  const double lo = *std::min_element(xs.begin(), xs.end());
  const double sd = sample_sd(xs);
  for (auto& x : xs) x = min_value + (x - lo) / sd;
  return xs;
}

}  // namespace

TEST_CASE("coefficient of variation") {
  CHECK(coefficient_of_variation(kFive) == Approx(kFiveSd / 3.0).epsilon(1e-15));
  CHECK(coefficient_of_variation(kFive) == Approx(0.52705).epsilon(1e-5));
  CHECK(coefficient_of_variation(std::vector<double>{5, 5, 5}) == 0.0);
  CHECK_THROWS_AS(coefficient_of_variation(std::vector<double>{0, 0}), UndefinedCV);
  CHECK_THROWS_AS(coefficient_of_variation(std::vector<double>{1}), SampleTooSmall);
}

TEST_CASE("estimator oracles on 1..5") {
  const double c1 = 1.0 - (kFiveSd / 3.0) / std::log10(5.0);
  const double c2 = 1.0 - kFiveSd / 5.0;
  const double c3 = 1.0 - kFiveSd * std::sqrt(std::log(std::log(5.0)) / 10.0);
  const double c4 = 1.0 - kFiveSd * std::sqrt(-std::log(0.025) / 10.0);
  CHECK(std::abs(estimate_c1(kFive).c_hat - c1) <= 1e-9);
  CHECK(std::abs(estimate_c2(kFive).c_hat - c2) <= 1e-9);
  CHECK(std::abs(estimate_c3(kFive).c_hat - c3) <= 1e-9);
  CHECK(std::abs(estimate_c4(kFive).c_hat - c4) <= 1e-9);
  // published five-digit values, rounded at intermediate steps
  CHECK(std::abs(c1 - 0.24596) < 1e-4);
  CHECK(std::abs(c2 - 0.68377) < 1e-4);
  CHECK(std::abs(c3 - 0.65506) < 1e-4);
  CHECK(std::abs(c4 - 0.03962) < 1e-4);

  const auto e = estimate_location(Estimator::c4, kFive);
  CHECK(e.method == Estimator::c4);
  CHECK(e.sample_min == 1.0);
  CHECK(e.sample_size == 5);
  CHECK(e.config_used.nu == 0.05);
  CHECK(e.warnings.empty());
}

TEST_CASE("estimator edge cases") {
  const std::vector<double> constant{7, 7, 7, 7};
  for (Estimator m : {Estimator::c1, Estimator::c2, Estimator::c3, Estimator::c4}) {
    const auto e = estimate_location(m, constant);
    CHECK(e.c_hat == 7.0);
    CHECK(e.warnings.size() == 1);
  }
  const std::vector<double> negative{-3, -2, -1};
  const double cv = 1.0 / -2.0;
  CHECK(estimate_c1(negative).c_hat == Approx(-3.0 - std::abs(-3.0 * cv) / std::log10(3.0)).epsilon(1e-14));
  CHECK(estimate_c1(negative).c_hat < -3.0);
  CHECK_THROWS_AS(estimate_c3(std::vector<double>{1, 2}), SampleTooSmall);
  CHECK_THROWS_AS(estimate_c2(std::vector<double>{1}), SampleTooSmall);
  CHECK_THROWS_AS(estimate_c4(kFive, {10.0, 1.0, 0.5}), DomainError);
  CHECK_THROWS_AS(estimate_c1(kFive, {1.0, 0.05, 0.5}), DomainError);

  std::vector<double> doubled = kFive;
  doubled.insert(doubled.end(), kFive.begin(), kFive.end());
  CHECK(estimate_c2(doubled).c_hat > estimate_c2(kFive).c_hat);

  // nu -> 1 gives the smallest pull-back
  const double near_one = estimate_c4(kFive, {10.0, 1.0 - 1e-12, 0.5}).c_hat;
  CHECK(near_one == Approx(1.0 - kFiveSd * std::sqrt(-std::log(0.5) / 10.0)).epsilon(1e-9));
  CHECK(near_one > estimate_c4(kFive).c_hat);

  CHECK(parse_estimator("c3") == Estimator::c3);
  CHECK_FALSE(parse_estimator("c5").has_value());
}

TEST_CASE("estimates sit strictly below the sample minimum") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto xs = weibull().draw(ParamVector{2.0, 1.5}, 10 + 50 * seed, seed);
    const double m = *std::min_element(xs.begin(), xs.end());
    for (Estimator e : {Estimator::c1, Estimator::c2, Estimator::c3, Estimator::c4}) {
      CHECK(estimate_location(e, xs).c_hat < m);
    }
  }
}

TEST_CASE("ordering c4 <= c3 <= c2 where the pull-back factors are ordered") {
  for (std::size_t n : {5u, 8u, 20u, 100u, 1000u, 10000u, 100000u}) {
    const double nd = static_cast<double>(n);
    const double f2 = 1.0 / nd;
    const double f3 = std::sqrt(std::log(std::log(nd)) / (2.0 * nd));
    const double f4 = std::sqrt(-std::log(0.025) / (2.0 * nd));
    const auto xs = standardized(n, n, 3.0);
    const double c2 = estimate_c2(xs).c_hat;
    const double c3 = estimate_c3(xs).c_hat;
    const double c4 = estimate_c4(xs).c_hat;
    CAPTURE(n);
    if (f4 >= f3) CHECK(c4 <= c3);
    if (f3 >= f2) CHECK(c3 <= c2);
  }
}

TEST_CASE("estimates approach the minimum as n grows at fixed dispersion") {
  double prev2 = -INFINITY, prev3 = -INFINITY, prev4 = -INFINITY;
  for (std::size_t n = 10; n <= 100000; n *= 3) {
    const auto xs = standardized(n, 99, 10.0);
    CAPTURE(n);
    const double c2 = estimate_c2(xs).c_hat;
    const double c3 = estimate_c3(xs).c_hat;
    const double c4 = estimate_c4(xs).c_hat;
    CHECK(c2 > prev2);
    CHECK(c3 > prev3);
    CHECK(c4 > prev4);
    CHECK(c2 < 10.0);
    prev2 = c2;
    prev3 = c3;
    prev4 = c4;
  }
}

TEST_CASE("scale equivariance") {
  const auto xs = gamma().draw(ParamVector{2.0, 1.0}, 300, 11);
  std::vector<double> scaled;
  for (double x : xs) scaled.push_back(3.5 * x);
  for (Estimator e : {Estimator::c1, Estimator::c2, Estimator::c3, Estimator::c4}) {
    CHECK(estimate_location(e, scaled).c_hat == Approx(3.5 * estimate_location(e, xs).c_hat).epsilon(1e-12));
  }
}

TEST_CASE("minimum distribution") {
  const auto expo_cdf = [](double x) { return x > 0 ? -std::expm1(-x) : 0.0; };
  const auto expo_q = [](double q) { return -std::log1p(-q); };
  CHECK(min_cdf(expo_cdf, 1, 0.7) == expo_cdf(0.7));
  CHECK(min_cdf(expo_cdf, 10, std::log(2.0) / 10.0) == Approx(0.5).epsilon(1e-14));
  CHECK(min_cdf(expo_cdf, 10, 1e6) == 1.0);
  CHECK(min_quantile(expo_q, 1, 0.3) == Approx(expo_q(0.3)).epsilon(1e-15));
  CHECK(min_quantile(expo_q, 10, 0.5) == Approx(std::log(2.0) / 10.0).epsilon(1e-13));
  CHECK(min_quantile(expo_q, 10, 1e-300) < 1e-290);
  CHECK_THROWS_AS(min_quantile(expo_q, 10, 1.0), DomainError);
  for (std::size_t n : {1u, 7u, 1000u}) {
    for (double q : {0.01, 0.3, 0.9}) {
      CHECK(min_cdf(expo_cdf, n, min_quantile(expo_q, n, q)) == Approx(q).epsilon(1e-9));
    }
  }
  // gamma base through the family interface
  const auto g = gamma();
  const ParamVector p{2.5, 1.0};
  for (double q : {0.05, 0.5, 0.95}) {
    const double x = min_quantile([&](double u) { return g.quantile(p, u); }, 25, q);
    CHECK(min_cdf([&](double t) { return g.cdf(p, t); }, 25, x) == Approx(q).epsilon(1e-9));
  }
}

TEST_CASE("simulated minima follow the minimum law") {
  constexpr std::size_t reps = 10000;
  std::vector<double> mins(reps);
  const auto draws = gamma().draw(ParamVector{1.0, 1.0}, reps * 10, 2024);
  for (std::size_t r = 0; r < reps; ++r) {
    mins[r] = *std::min_element(draws.begin() + r * 10, draws.begin() + (r + 1) * 10);
  }
  std::sort(mins.begin(), mins.end());
  double d = 0.0;
  for (std::size_t i = 0; i < reps; ++i) {
    const double F = -std::expm1(-10.0 * mins[i]);
    d = std::max({d, std::abs(F - double(i) / reps), std::abs(double(i + 1) / reps - F)});
  }
  CHECK(d < std::sqrt(-std::log(0.005) / (2.0 * reps)));
}

TEST_CASE("shift_sample") {
  const std::vector<double> xs{1, 2, 3};
  CHECK(shift_sample(xs, 0.0).values == xs);
  CHECK_FALSE(shift_sample(xs, 0.0).warning.has_value());
  CHECK(shift_sample(xs, 0.5).values == std::vector<double>{0.5, 1.5, 2.5});
  const auto at_min = shift_sample(xs, 1.0);
  CHECK(*std::min_element(at_min.values.begin(), at_min.values.end()) == 0.0);
  CHECK(at_min.warning.has_value());
}
