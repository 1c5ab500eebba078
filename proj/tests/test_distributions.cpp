#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "locfit/distributions.hpp"
#include "locfit/errors.hpp"
#include "oracles.hpp"

using namespace locfit;
using doctest::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lower_integration_bound(const Family& f, const ParamVector& p) {
  return std::isfinite(f.support_lower()) ? f.support_lower() : f.quantile(p, 1e-12);
}

double sup_ecdf_distance(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = cdf(xs[i]);
    d = std::max({d, std::abs(F - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - F)});
  }
  return d;
}

}  // namespace

TEST_CASE("registry exposes the nine families by exact name") {
  const auto names = family_names();
  REQUIRE(names.size() == 9);
  for (auto n : names) CHECK(family_by_name(n).name() == n);
  CHECK_THROWS_AS(family_by_name("gumbel"), ContractError);
  CHECK(family_by_name("kwcwg").param_count() == 5);
  CHECK(family_by_name("ollgg").param_count() == 4);
}

TEST_CASE("log_pdf examples") {
  // gamma(1, 2) at 1: e^{-x/θ}/θ
  CHECK(gamma().log_pdf(ParamVector{1.0, 2.0}, 1.0) == Approx(-0.5 - std::log(2.0)).epsilon(1e-14));
  CHECK(weibull().log_pdf(ParamVector{1.0, 1.0}, -1.0) == -kInf);
  CHECK(oll_gg().log_pdf(ParamVector{1.0, 2.0, 3.0, 1.0}, 0.7) ==
        Approx(generalized_gamma().log_pdf(ParamVector{1.0, 2.0, 3.0}, 0.7)).epsilon(1e-14));
  CHECK_THROWS_AS(gamma().log_pdf(ParamVector{-1.0, 2.0}, 1.0), DomainError);
  CHECK_THROWS_AS(gamma().log_pdf(ParamVector{1.0}, 1.0), DomainError);
  CHECK_THROWS_AS(kw_cwg().log_pdf(ParamVector{1.0, 1.0, 1.0, 1.0, 1.0}, 1.0), DomainError);  // alpha is open at 1
  CHECK_THROWS_AS(kw_cwg().log_pdf(ParamVector{0.0, 1.0, 1.0, 1.0, 1.0}, 1.0), DomainError);
}

TEST_CASE("cdf and quantile examples") {
  CHECK(weibull().cdf(ParamVector{1.0, 1.0}, 0.0) == 0.0);
  CHECK(lognormal().cdf(ParamVector{0.0, 1.0}, 1.0) == Approx(0.5).epsilon(1e-15));
  CHECK(gamma().cdf(ParamVector{1.0, 1.0}, std::log(2.0)) == Approx(0.5).epsilon(1e-14));
  CHECK(lognormal().quantile(ParamVector{0.0, 1.0}, 0.5) == Approx(1.0).epsilon(1e-14));
  CHECK(gamma().quantile(ParamVector{1.0, 1.0}, 0.5) == Approx(std::log(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(gamma().quantile(ParamVector{1.0, 1.0}, 0.0), DomainError);
  CHECK_THROWS_AS(gamma().quantile(ParamVector{1.0, 1.0}, 1.0), DomainError);
}

TEST_CASE("every family: density integrates to one on its default grid") {
  for (auto name : family_names()) {
    const Family& f = family_by_name(name);
    for (const auto& p : f.default_grid()) {
      CAPTURE(name);
      CAPTURE(p);
      const double upper = f.quantile(p, 1.0 - 1e-9);
      double mass;
      if (f.support_lower() == 0.0) {
        mass = oracle::positive_mass([&](double x) { return f.log_pdf(p, x); }, upper);
      } else {
        const double lo = lower_integration_bound(f, p);
        mass = oracle::simpson([&](double x) { return std::exp(f.log_pdf(p, x)); }, lo, upper, 1e-10, 400);
      }
      CHECK(std::abs(mass - 1.0) <= 1e-4);
    }
  }
}

TEST_CASE("every family: cdf monotone and quantile round trip") {
  const double qs[] = {0.001, 0.01, 0.1, 0.5, 0.9, 0.99, 0.999};
  for (auto name : family_names()) {
    const Family& f = family_by_name(name);
    for (const auto& p : f.default_grid()) {
      CAPTURE(name);
      CAPTURE(p);
      for (double q : qs) CHECK(std::abs(f.cdf(p, f.quantile(p, q)) - q) <= 1e-9);
      for (int i = 1; i < 100; ++i) {
        const double q = i / 100.0;
        CHECK(std::abs(f.cdf(p, f.quantile(p, q)) - q) <= 1e-9);
      }
      const double lo = lower_integration_bound(f, p);
      const double hi = f.quantile(p, 0.9999);
      double prev = f.cdf(p, lo);
      for (int i = 1; i <= 1000; ++i) {
        const double F = f.cdf(p, lo + (hi - lo) * i / 1000.0);
        CHECK(F >= prev);
        CHECK(F <= 1.0);
        prev = F;
      }
    }
  }
}

TEST_CASE("every family: cdf derivative matches the density") {
  for (auto name : family_names()) {
    const Family& f = family_by_name(name);
    for (const auto& p : f.default_grid()) {
      CAPTURE(name);
      CAPTURE(p);
      for (double q : {0.05, 0.25, 0.5, 0.75, 0.95}) {
        const double x = f.quantile(p, q);
        const double h = 1e-6 * (x != 0.0 ? std::abs(x) : 1.0);
        const double fd = (f.cdf(p, x + h) - f.cdf(p, x - h)) / (2.0 * h);
        const double dens = f.pdf(p, x);
        if (dens < 1e-8) continue;
        CHECK(std::abs(fd - dens) / dens <= 1e-4);
      }
    }
  }
}

TEST_CASE("exact sub-model reductions") {
  for (int i = 1; i <= 100; ++i) {
    const double x = 0.05 * i;
    CAPTURE(x);
    // OLL-GG(λ = 1) is the generalized gamma
    CHECK(std::abs(oll_gg().log_pdf(ParamVector{1.3, 2.0, 1.7, 1.0}, x) - generalized_gamma().log_pdf(ParamVector{1.3, 2.0, 1.7}, x)) <=
          1e-10);
    CHECK(std::abs(oll_gg().cdf(ParamVector{1.3, 2.0, 1.7, 1.0}, x) - generalized_gamma().cdf(ParamVector{1.3, 2.0, 1.7}, x)) <= 1e-10);
    // ExpWeibull(ν = 1) is Weibull(k = σ, λ = μ)
    CHECK(std::abs(exponentiated_weibull().log_pdf(ParamVector{1.8, 1.0, 2.2}, x) - weibull().log_pdf(ParamVector{2.2, 1.8}, x)) <= 1e-10);
    CHECK(std::abs(exponentiated_weibull().cdf(ParamVector{1.8, 1.0, 2.2}, x) - weibull().cdf(ParamVector{2.2, 1.8}, x)) <= 1e-10);
    // GenGamma(k = 1) is Weibull(k = b, λ = a)
    CHECK(std::abs(generalized_gamma().log_pdf(ParamVector{1.6, 0.7, 1.0}, x) - weibull().log_pdf(ParamVector{1.6, 0.7}, x)) <= 1e-10);
    CHECK(std::abs(generalized_gamma().cdf(ParamVector{1.6, 0.7, 1.0}, x) - weibull().cdf(ParamVector{1.6, 0.7}, x)) <= 1e-10);
    // Kw-CWG(α -> 1, a = b = 1) approaches Weibull(k = β, λ = 1/γ)
    const double alpha = 1.0 - 1e-8;
    CHECK(std::abs(kw_cwg().pdf(ParamVector{alpha, 1.5, 0.8, 1.0, 1.0}, x) - weibull().pdf(ParamVector{1.0 / 0.8, 1.5}, x)) <= 1e-4);
    CHECK(std::abs(kw_cwg().cdf(ParamVector{alpha, 1.5, 0.8, 1.0, 1.0}, x) - weibull().cdf(ParamVector{1.0 / 0.8, 1.5}, x)) <= 1e-4);
  }
}

TEST_CASE("far tails stay finite in log space") {
  CHECK(std::isfinite(kw_cwg().log_pdf(ParamVector{0.3, 2.0, 1.0, 0.5, 0.5}, 40.0)));
  CHECK(std::isfinite(oll_gg().log_pdf(ParamVector{1.0, 1.0, 2.0, 0.5}, 300.0)));
  CHECK(std::isfinite(truncated_normal().log_pdf(ParamVector{-50.0, 1.0}, 0.5)));
  CHECK(std::isfinite(exponentiated_weibull().log_pdf(ParamVector{1.0, 0.5, 1.0}, 1e-200)));
  const double q = truncated_normal().quantile(ParamVector{-50.0, 1.0}, 0.5);
  CHECK(truncated_normal().cdf(ParamVector{-50.0, 1.0}, q) == Approx(0.5).epsilon(1e-9));
}

TEST_CASE("truncated normal renormalizes the normal above zero") {
  const ParamVector p{0.5, 2.0};
  const double mass = 1.0 - normal().cdf(p, 0.0);
  for (double x : {0.1, 1.0, 3.0}) {
    CHECK(truncated_normal().log_pdf(p, x) == Approx(normal().log_pdf(p, x) - std::log(mass)).epsilon(1e-13));
  }
  CHECK(truncated_normal().log_pdf(p, -0.1) == -kInf);
}

TEST_CASE("draw is deterministic and follows the cdf") {
  const auto a = weibull().draw(ParamVector{1.0, 1.0}, 10000, 42);
  const auto b = weibull().draw(ParamVector{1.0, 1.0}, 10000, 42);
  CHECK(a == b);
  CHECK(a != weibull().draw(ParamVector{1.0, 1.0}, 10000, 43));
  const auto one = gamma().draw(ParamVector{2.0, 1.0}, 1, 7);
  REQUIRE(one.size() == 1);
  CHECK(one[0] > 0.0);
  // DKW at ν = 0.01: sqrt(-ln(0.005) / (2n))
  const double band = std::sqrt(-std::log(0.005) / (2.0 * 10000));
  CHECK(band == Approx(0.0163).epsilon(0.01));
  CHECK(sup_ecdf_distance(a, [](double x) { return 1.0 - std::exp(-x); }) < band);
  CHECK_THROWS_AS(weibull().draw(ParamVector{1.0, 1.0}, 0, 1), ContractError);
}

TEST_CASE("compose_cdf") {
  SUBCASE("identity outer") {
    const Family composed = compose_cdf(uniform_unit(), gamma());
    CHECK(composed.param_count() == 2);
    for (double x : {0.1, 0.7, 2.0, 9.0}) {
      CHECK(composed.cdf(ParamVector{2.0, 1.5}, x) == Approx(gamma().cdf(ParamVector{2.0, 1.5}, x)).epsilon(1e-15));
      CHECK(composed.log_pdf(ParamVector{2.0, 1.5}, x) == Approx(gamma().log_pdf(ParamVector{2.0, 1.5}, x)).epsilon(1e-15));
    }
  }
  SUBCASE("gamma inner with beta outer is a valid cdf") {
    const Family composed = compose_cdf(beta(), gamma());
    CHECK(composed.name() == "beta-gamma");
    const ParamVector p{10.0, 0.25, 0.2, 0.1};
    CHECK(composed.cdf(p, -1.0) == 0.0);
    CHECK(composed.cdf(p, 1e6) == Approx(1.0));
    double prev = 0.0;
    for (int i = 1; i <= 1000; ++i) {
      const double F = composed.cdf(p, 0.01 * i);
      CHECK(F >= prev);
      CHECK(F <= 1.0);
      prev = F;
    }
    for (double q : {0.1, 0.5, 0.9}) CHECK(composed.cdf(p, composed.quantile(p, q)) == Approx(q).epsilon(1e-9));
    // density is the chain-rule derivative of the cdf
    const double x = composed.quantile(p, 0.5);
    const double h = 1e-6;
    CHECK((composed.cdf(p, x + h) - composed.cdf(p, x - h)) / (2 * h) == Approx(composed.pdf(p, x)).epsilon(1e-5));
  }
  SUBCASE("randomized cdf axioms") {
    std::mt19937_64 rng(2024);
    const std::vector<Family> inners = {weibull(), gamma(), lognormal(), exponentiated_weibull()};
    const std::vector<Family> outers = {beta(), kumaraswamy(), uniform_unit()};
    std::uniform_real_distribution<double> shape(0.3, 3.0);
    for (int trial = 0; trial < 30; ++trial) {
      const Family& in = inners[rng() % inners.size()];
      const Family& out = outers[rng() % outers.size()];
      const Family composed = compose_cdf(out, in);
      ParamVector p;
      for (const auto& d : composed.domains()) p.push_back(d.role == ParamRole::location ? shape(rng) - 1.5 : shape(rng));
      CAPTURE(composed.name());
      CAPTURE(p);
      CHECK(composed.cdf(p, -1e300) == 0.0);
      CHECK(composed.cdf(p, 1e300) == Approx(1.0));
      double prev = 0.0;
      for (int i = 0; i <= 400; ++i) {
        const double F = composed.cdf(p, 0.02 * i);
        CHECK(F >= prev);
        prev = F;
        // right-continuity away from the origin
        if (i > 0) CHECK(std::abs(composed.cdf(p, 0.02 * i * (1.0 + 1e-12)) - F) < 1e-9);
      }
    }
  }
  CHECK_THROWS_AS(compose_cdf(gamma(), weibull()), ContractError);
}

TEST_CASE("truncate_at") {
  const ParamVector p{2.0, 1.0};
  SUBCASE("c = 0 is the base family") {
    const auto t = truncate_at(gamma(), p, 0.0);
    for (double y : {0.1, 1.0, 5.0}) CHECK(t.log_pdf(y) == Approx(gamma().log_pdf(p, y)).epsilon(1e-15));
  }
  SUBCASE("likelihood offset is -n ln(1 - F(c))") {
    const double c = 0.4;
    const auto xs = gamma().draw(p, 200, 5);
    std::vector<double> ys;
    for (double x : xs) ys.push_back(x - c);
    const auto t = truncate_at(gamma(), p, c);
    double ly = 0.0;
    double lx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (ys[i] <= 0.0) continue;
      ly += t.log_pdf(ys[i]);
      lx += gamma().log_pdf(p, xs[i]);
    }
    std::size_t kept = std::count_if(ys.begin(), ys.end(), [](double y) { return y > 0.0; });
    CHECK(ly - lx == Approx(-static_cast<double>(kept) * std::log(1.0 - gamma().cdf(p, c))).epsilon(1e-12));
  }
  SUBCASE("below zero has no density") {
    const auto t = truncate_at(gamma(), p, 1.0);
    CHECK(t.log_pdf(-0.5) == -kInf);
    CHECK(t.cdf(t.quantile(0.3)) == Approx(0.3).epsilon(1e-9));
  }
  SUBCASE("degenerate truncation") {
    CHECK_THROWS_AS(truncate_at(gamma(), p, 1e5), DegenerateError);
  }
}

TEST_CASE("shift_by") {
  const Family shifted = shift_by(gamma(), 100.0);
  CHECK(shifted.log_pdf(ParamVector{1.0, 2.0}, 101.0) == Approx(gamma().log_pdf(ParamVector{1.0, 2.0}, 1.0)).epsilon(1e-14));
  CHECK(shifted.log_pdf(ParamVector{1.0, 2.0}, 99.0) == -kInf);
  CHECK(shifted.support_lower() == 100.0);
  CHECK(shifted.quantile(ParamVector{1.0, 2.0}, 0.3) == Approx(100.0 + gamma().quantile(ParamVector{1.0, 2.0}, 0.3)).epsilon(1e-14));
  CHECK(shifted.cdf(ParamVector{1.0, 2.0}, 101.0) == Approx(gamma().cdf(ParamVector{1.0, 2.0}, 1.0)).epsilon(1e-14));
  const Family same = shift_by(gamma(), 0.0);
  CHECK(same.log_pdf(ParamVector{1.0, 2.0}, 1.0) == gamma().log_pdf(ParamVector{1.0, 2.0}, 1.0));
}

TEST_CASE("freeze holds coordinates fixed") {
  const Family exponential = freeze(gamma(), {1.0, std::nullopt});
  CHECK(exponential.param_count() == 1);
  CHECK(exponential.name() == "gamma[alpha=1]");
  CHECK(exponential.log_pdf(ParamVector{2.0}, 1.0) == Approx(-0.5 - std::log(2.0)).epsilon(1e-14));
  CHECK(exponential.default_grid().size() == 3);
  CHECK_THROWS_AS(freeze(gamma(), {-1.0, std::nullopt}), DomainError);
}

TEST_CASE("families without closed forms fall back to numerics") {
  FamilyOps ops;
  ops.log_pdf = [](std::span<const double> p, double x) { return x > 0 ? std::log(p[0]) - p[0] * x : -kInf; };
  const Family expo("expo", {{"rate", 0.0, kInf, ParamRole::rate}}, 0.0, kInf, ops);
  CHECK(expo.cdf(ParamVector{2.0}, 0.5) == Approx(1.0 - std::exp(-1.0)).epsilon(1e-9));
  CHECK(expo.quantile(ParamVector{2.0}, 0.5) == Approx(std::log(2.0) / 2.0).epsilon(1e-8));
  CHECK(expo.quantile(ParamVector{2.0}, 1e-8) == Approx(-std::log1p(-1e-8) / 2.0).epsilon(1e-6));
  CHECK(beta().quantile(ParamVector{2.0, 3.0}, 0.5) > 0.0);
  CHECK(beta().cdf(ParamVector{2.0, 3.0}, beta().quantile(ParamVector{2.0, 3.0}, 0.37)) == Approx(0.37).epsilon(1e-10));
}
