#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "locfit/distributions.hpp"
#include "locfit/errors.hpp"
#include "locfit/special.hpp"

namespace locfit {
namespace {

using special::log1mexp;
using std::log;

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

ParamDomain positive(std::string name, ParamRole role) { return {std::move(name), 0.0, kInf, role}; }
ParamDomain real(std::string name, ParamRole role) { return {std::move(name), -kInf, kInf, role}; }
ParamDomain open_unit(std::string name) { return {std::move(name), 0.0, 1.0, ParamRole::unit}; }

std::function<Grid(const SampleSummary&)> moment_grid(std::vector<ParamDomain> domains, bool log_moments) {
  return [domains = std::move(domains), log_moments](const SampleSummary& s) {
    return role_grid(domains, s, log_moments);
  };
}

// ---------------------------------------------------------------- Weibull
Family make_weibull() {
  FamilyOps ops;
  ops.log_pdf = [](std::span<const double> p, double x) {
    const double lambda = p[0];
    const double k = p[1];
    if (!(x > 0.0)) return -kInf;
    const double lz = log(x) - log(lambda);
    return log(k) - log(lambda) + (k - 1.0) * lz - std::exp(k * lz);
  };
  ops.cdf = [](std::span<const double> p, double x) {
    return -std::expm1(-std::exp(p[1] * (log(x) - log(p[0]))));
  };
  ops.quantile = [](std::span<const double> p, double q) {
    return p[0] * std::pow(-std::log1p(-q), 1.0 / p[1]);
  };
  return Family("weibull", {positive("lambda", ParamRole::scale), positive("k", ParamRole::shape)}, 0.0, kInf,
                std::move(ops));
}

// ------------------------------------------------------------------ gamma
Family make_gamma() {
  FamilyOps ops;
  ops.log_pdf = [](std::span<const double> p, double x) {
    const double alpha = p[0];
    const double theta = p[1];
    if (!(x > 0.0)) return -kInf;
    return (alpha - 1.0) * log(x) - x / theta - alpha * log(theta) - special::log_gamma(alpha);
  };
  ops.cdf = [](std::span<const double> p, double x) { return special::inc_gamma_ratio(p[0], x / p[1]); };
  ops.quantile = [](std::span<const double> p, double q) { return p[1] * special::inc_gamma_inverse(p[0], q); };
  return Family("gamma", {positive("alpha", ParamRole::shape), positive("theta", ParamRole::scale)}, 0.0, kInf,
                std::move(ops));
}

// ------------------------------------------------------ generalized gamma
Family make_generalized_gamma() {
  FamilyOps ops;
  ops.log_pdf = [](std::span<const double> p, double x) {
    const double a = p[0];
    const double b = p[1];
    const double k = p[2];
    if (!(x > 0.0)) return -kInf;
    const double lz = log(x) - log(a);
    return log(b) - log(a) + (b * k - 1.0) * lz - std::exp(b * lz) - special::log_gamma(k);
  };
  ops.cdf = [](std::span<const double> p, double x) {
    return special::inc_gamma_ratio(p[2], std::exp(p[1] * (log(x) - log(p[0]))));
  };
  ops.quantile = [](std::span<const double> p, double q) {
    return p[0] * std::pow(special::inc_gamma_inverse(p[2], q), 1.0 / p[1]);
  };
  return Family("ggamma",
                {positive("a", ParamRole::scale), positive("b", ParamRole::shape), positive("k", ParamRole::shape)},
                0.0, kInf, std::move(ops));
}

// ------------------------------------------------- exponentiated Weibull
Family make_exponentiated_weibull() {
  FamilyOps ops;
  ops.log_pdf = [](std::span<const double> p, double x) {
    const double sigma = p[0];
    const double nu = p[1];
    const double mu = p[2];
    if (!(x > 0.0)) return -kInf;
    const double lz = log(x) - log(mu);
    const double t = std::exp(sigma * lz);
    double v = log(sigma) + log(nu) - log(mu) + (sigma - 1.0) * lz - t;
    if (nu != 1.0) v += (nu - 1.0) * log1mexp(-t);
    return v;
  };
  ops.cdf = [](std::span<const double> p, double x) {
    const double t = std::exp(p[0] * (log(x) - log(p[2])));
    return std::exp(p[1] * log1mexp(-t));
  };
  ops.quantile = [](std::span<const double> p, double q) {
    return p[2] * std::pow(-log1mexp(log(q) / p[1]), 1.0 / p[0]);
  };
  return Family("eweibull",
                {positive("sigma", ParamRole::shape), positive("nu", ParamRole::shape),
                 positive("mu", ParamRole::scale)},
                0.0, kInf, std::move(ops));
}

// ----------------------------------------------------------------- normal
Family make_normal() {
  std::vector<ParamDomain> d = {real("mu", ParamRole::location), positive("sigma", ParamRole::spread)};
  FamilyOps ops;
  ops.log_pdf = [](std::span<const double> p, double x) {
    if (std::isinf(x)) return -kInf;
    const double z = (x - p[0]) / p[1];
    return -kHalfLog2Pi - log(p[1]) - 0.5 * z * z;
  };
  ops.cdf = [](std::span<const double> p, double x) { return special::normal_cdf((x - p[0]) / p[1]); };
  ops.quantile = [](std::span<const double> p, double q) { return p[0] + p[1] * special::normal_quantile(q); };
  ops.grid = moment_grid(d, false);
  return Family("normal", std::move(d), -kInf, kInf, std::move(ops));
}

// ------------------------------------------------------ truncated normal
Family make_truncated_normal() {
  std::vector<ParamDomain> d = {real("mu", ParamRole::location), positive("sigma", ParamRole::spread)};
  FamilyOps ops;
  // log of the normalizing mass 1 - Φ(0 | mu, sigma)
  auto log_mass = [](std::span<const double> p) { return special::log_normal_sf(-p[0] / p[1]); };
  ops.log_pdf = [log_mass](std::span<const double> p, double x) {
    if (!(x > 0.0) || std::isinf(x)) return -kInf;
    const double z = (x - p[0]) / p[1];
    return -kHalfLog2Pi - log(p[1]) - 0.5 * z * z - log_mass(p);
  };
  ops.cdf = [log_mass](std::span<const double> p, double x) {
    const double z = (x - p[0]) / p[1];
    return -std::expm1(special::log_normal_sf(z) - log_mass(p));
  };
  ops.quantile = [log_mass](std::span<const double> p, double q) {
    // Upper tail of the answer: sf(z) = (1 - q) * mass.
    const double log_s = std::log1p(-q) + log_mass(p);
    double z;
    if (log_s < -700.0) {
      // Newton on log sf(z) = log_s in the far right tail.
      z = std::sqrt(-2.0 * log_s);
      for (int i = 0; i < 50; ++i) {
        const double f = special::log_normal_sf(z) - log_s;
        const double slope = -std::exp(-0.5 * z * z - kHalfLog2Pi - special::log_normal_sf(z));
        const double step = f / slope;
        z -= step;
        if (std::abs(step) <= 1e-15 * z) break;
      }
    } else if (log_s > std::log(0.5)) {
      z = special::normal_quantile(-std::expm1(log_s));
    } else {
      z = -special::normal_quantile(std::exp(log_s));
    }
    return std::max(p[0] + p[1] * z, std::numeric_limits<double>::min());
  };
  ops.grid = moment_grid(d, false);
  return Family("tnormal", std::move(d), 0.0, kInf, std::move(ops));
}

// -------------------------------------------------------------- lognormal
Family make_lognormal() {
  std::vector<ParamDomain> d = {real("mu", ParamRole::location), positive("sigma", ParamRole::spread)};
  FamilyOps ops;
  ops.log_pdf = [](std::span<const double> p, double x) {
    if (!(x > 0.0) || std::isinf(x)) return -kInf;
    const double lx = log(x);
    const double z = (lx - p[0]) / p[1];
    return -lx - kHalfLog2Pi - log(p[1]) - 0.5 * z * z;
  };
  ops.cdf = [](std::span<const double> p, double x) { return special::normal_cdf((log(x) - p[0]) / p[1]); };
  ops.quantile = [](std::span<const double> p, double q) {
    return std::exp(p[0] + p[1] * special::normal_quantile(q));
  };
  ops.grid = moment_grid(d, true);
  return Family("lnormal", std::move(d), 0.0, kInf, std::move(ops));
}

// ----------------------------------------------------------------- Kw-CWG
//
// With t = (gamma x)^beta and e = exp(-t), the complementary Weibull
// geometric cdf is G = alpha (1 - e) / D with D = alpha + (1 - alpha) e, and
// 1 - G = e / D. The Kumaraswamy generator gives F = 1 - (1 - G^a)^b.
struct KwCwgTerms {
  double t;
  double log_d;
  double log_g;            // log G
  double log_one_minus_ga;  // log(1 - G^a)
};

KwCwgTerms kwcwg_terms(std::span<const double> p, double x) {
  const double alpha = p[0];
  const double beta = p[1];
  const double gam = p[2];
  const double a = p[3];
  KwCwgTerms r{};
  r.t = std::exp(beta * (log(gam) + log(x)));
  r.log_d = log(alpha + (1.0 - alpha) * std::exp(-r.t));
  const double log_one_minus_g = -r.t - r.log_d;
  const double one_minus_g = std::exp(log_one_minus_g);
  r.log_g = one_minus_g < 0.5 ? std::log1p(-one_minus_g) : log(alpha) + log1mexp(-r.t) - r.log_d;
  if (one_minus_g == 0.0) {
    // 1 - G underflowed: 1 - G^a -> a (1 - G).
    r.log_one_minus_ga = log(a) + log_one_minus_g;
  } else {
    r.log_one_minus_ga = log1mexp(a * r.log_g);
  }
  return r;
}

Family make_kw_cwg() {
  FamilyOps ops;
  ops.log_pdf = [](std::span<const double> p, double x) {
    const double alpha = p[0];
    const double beta = p[1];
    const double gam = p[2];
    const double a = p[3];
    const double b = p[4];
    if (!(x > 0.0) || std::isinf(x)) return -kInf;
    const auto k = kwcwg_terms(p, x);
    double v = a * log(alpha) + log(beta) + log(gam) + log(a) + log(b) + (beta - 1.0) * (log(gam) + log(x)) - k.t -
               (a + 1.0) * k.log_d;
    if (a != 1.0) v += (a - 1.0) * log1mexp(-k.t);
    if (b != 1.0) v += (b - 1.0) * k.log_one_minus_ga;
    return v;
  };
  ops.cdf = [](std::span<const double> p, double x) {
    const auto k = kwcwg_terms(p, x);
    return -std::expm1(p[4] * k.log_one_minus_ga);
  };
  ops.quantile = [](std::span<const double> p, double q) {
    const double alpha = p[0];
    const double beta = p[1];
    const double gam = p[2];
    const double a = p[3];
    const double b = p[4];
    const double log_g = log1mexp(std::log1p(-q) / b) / a;
    const double log_one_minus_g = log1mexp(log_g);
    const double g = std::exp(log_g);
    // e = alpha (1 - G) / (alpha + G (1 - alpha))
    const double t = -(log(alpha) + log_one_minus_g - log(alpha + g * (1.0 - alpha)));
    return std::pow(t, 1.0 / beta) / gam;
  };
  return Family("kwcwg",
                {open_unit("alpha"), positive("beta", ParamRole::shape), positive("gamma", ParamRole::rate),
                 positive("a", ParamRole::shape), positive("b", ParamRole::shape)},
                0.0, kInf, std::move(ops));
}

// ----------------------------------------------------------------- OLL-GG
//
// Odd log-logistic generator over the generalized gamma cdf P:
// F = P^lambda / (P^lambda + (1 - P)^lambda).
Family make_oll_gg() {
  FamilyOps ops;
  ops.log_pdf = [](std::span<const double> p, double x) {
    const double alpha = p[0];
    const double tau = p[1];
    const double k = p[2];
    const double lambda = p[3];
    if (!(x > 0.0) || std::isinf(x)) return -kInf;
    const double lz = log(x) - log(alpha);
    const double t = std::exp(tau * lz);
    const double log_g = log(tau) - log(alpha) + (tau * k - 1.0) * lz - t - special::log_gamma(k);
    if (lambda == 1.0) return log_g;
    const double log_p = special::log_inc_gamma_lower(k, t);
    const double log_q = special::log_inc_gamma_upper(k, t);
    return log(lambda) + log_g + (lambda - 1.0) * (log_p + log_q) -
           2.0 * special::log_add_exp(lambda * log_p, lambda * log_q);
  };
  ops.cdf = [](std::span<const double> p, double x) {
    const double t = std::exp(p[1] * (log(x) - log(p[0])));
    const double lambda = p[3];
    const double log_p = special::log_inc_gamma_lower(p[2], t);
    const double log_q = special::log_inc_gamma_upper(p[2], t);
    return std::exp(lambda * log_p - special::log_add_exp(lambda * log_p, lambda * log_q));
  };
  ops.quantile = [](std::span<const double> p, double q) {
    const double alpha = p[0];
    const double tau = p[1];
    const double k = p[2];
    const double lambda = p[3];
    // P / Q = r^-1 with r = ((1 - q) / q)^(1 / lambda)
    const double log_r = (std::log1p(-q) - log(q)) / lambda;
    double z;
    if (log_r >= 0.0) {
      const double prob = std::exp(-special::log_add_exp(0.0, log_r));
      if (!(prob > 0.0)) return 0.0;
      z = special::inc_gamma_inverse(k, prob);
    } else {
      const double upper = std::exp(log_r - special::log_add_exp(0.0, log_r));
      if (!(upper > 0.0)) return kInf;
      z = special::inc_gamma_upper_inverse(k, upper);
    }
    return alpha * std::pow(z, 1.0 / tau);
  };
  return Family("ollgg",
                {positive("alpha", ParamRole::scale), positive("tau", ParamRole::shape),
                 positive("k", ParamRole::shape), positive("lambda", ParamRole::shape)},
                0.0, kInf, std::move(ops));
}

// ------------------------------------------------------ [0, 1] families
Family make_uniform_unit() {
  FamilyOps ops;
  ops.log_pdf = [](std::span<const double>, double x) { return x >= 0.0 && x <= 1.0 ? 0.0 : -kInf; };
  ops.cdf = [](std::span<const double>, double x) { return std::clamp(x, 0.0, 1.0); };
  ops.quantile = [](std::span<const double>, double q) { return q; };
  ops.grid = [](const SampleSummary&) { return Grid{ParamVector{}}; };
  return Family("uniform", {}, 0.0, 1.0, std::move(ops));
}

Family make_beta() {
  FamilyOps ops;
  ops.log_pdf = [](std::span<const double> p, double x) {
    if (!(x > 0.0 && x < 1.0)) return -kInf;
    return (p[0] - 1.0) * log(x) + (p[1] - 1.0) * std::log1p(-x) - special::log_beta(p[0], p[1]);
  };
  ops.cdf = [](std::span<const double> p, double x) { return special::inc_beta_ratio(p[0], p[1], x); };
  return Family("beta", {positive("a", ParamRole::shape), positive("b", ParamRole::shape)}, 0.0, 1.0,
                std::move(ops));
}

Family make_kumaraswamy() {
  FamilyOps ops;
  ops.log_pdf = [](std::span<const double> p, double x) {
    if (!(x > 0.0 && x < 1.0)) return -kInf;
    const double a = p[0];
    const double b = p[1];
    double v = log(a) + log(b) + (a - 1.0) * log(x);
    if (b != 1.0) v += (b - 1.0) * log1mexp(a * log(x));
    return v;
  };
  ops.cdf = [](std::span<const double> p, double x) { return -std::expm1(p[1] * log1mexp(p[0] * log(x))); };
  ops.quantile = [](std::span<const double> p, double q) {
    return std::exp(log1mexp(std::log1p(-q) / p[1]) / p[0]);
  };
  return Family("kumaraswamy", {positive("a", ParamRole::shape), positive("b", ParamRole::shape)}, 0.0, 1.0,
                std::move(ops));
}

constexpr std::array<std::string_view, 9> kNames = {"weibull", "gamma",   "ggamma", "eweibull", "normal",
                                                    "tnormal", "lnormal", "kwcwg",  "ollgg"};

const std::vector<Family>& registry() {
  static const std::vector<Family> families = {
      make_weibull(), make_gamma(),     make_generalized_gamma(), make_exponentiated_weibull(),
      make_normal(),  make_truncated_normal(), make_lognormal(),   make_kw_cwg(), make_oll_gg()};
  return families;
}

}  // namespace

Family weibull() { return registry()[0]; }
Family gamma() { return registry()[1]; }
Family generalized_gamma() { return registry()[2]; }
Family exponentiated_weibull() { return registry()[3]; }
Family normal() { return registry()[4]; }
Family truncated_normal() { return registry()[5]; }
Family lognormal() { return registry()[6]; }
Family kw_cwg() { return registry()[7]; }
Family oll_gg() { return registry()[8]; }

Family uniform_unit() { return make_uniform_unit(); }
Family beta() { return make_beta(); }
Family kumaraswamy() { return make_kumaraswamy(); }

std::span<const std::string_view> family_names() { return kNames; }

bool is_family_name(std::string_view name) {
  return std::find(kNames.begin(), kNames.end(), name) != kNames.end();
}

const Family& family_by_name(std::string_view name) {
  const auto it = std::find(kNames.begin(), kNames.end(), name);
  if (it == kNames.end()) {
    std::string valid;
    for (auto n : kNames) valid += (valid.empty() ? "" : ", ") + std::string(n);
    throw ContractError("unknown family '" + std::string(name) + "' (valid: " + valid + ")");
  }
  return registry()[static_cast<std::size_t>(it - kNames.begin())];
}

}  // namespace locfit
