#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "locfit/distributions.hpp"
#include "locfit/errors.hpp"

namespace locfit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_value(double v) {
  std::string s = std::to_string(v);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

Family compose_cdf(const Family& outer, const Family& inner) {
  if (outer.support_lower() != 0.0 || outer.support_upper() != 1.0) {
    throw ContractError("compose_cdf: outer family '" + outer.name() + "' must be supported on [0, 1]");
  }
  const std::size_t split = inner.param_count();
  std::vector<ParamDomain> domains(inner.domains().begin(), inner.domains().end());
  domains.insert(domains.end(), outer.domains().begin(), outer.domains().end());

  FamilyOps ops;
  ops.log_pdf = [outer, inner, split](std::span<const double> p, double x) {
    const auto pi = p.first(split);
    const auto po = p.subspan(split);
    const double log_f = inner.log_pdf_unchecked(pi, x);
    if (log_f == -kInf) return -kInf;
    // chain rule: G'(F(x)) F'(x)
    return outer.log_pdf_unchecked(po, inner.cdf_unchecked(pi, x)) + log_f;
  };
  ops.cdf = [outer, inner, split](std::span<const double> p, double x) {
    return outer.cdf_unchecked(p.subspan(split), inner.cdf_unchecked(p.first(split), x));
  };
  ops.quantile = [outer, inner, split](std::span<const double> p, double q) {
    const double u = outer.quantile_unchecked(p.subspan(split), q);
    if (!(u > 0.0)) return inner.support_lower();
    if (!(u < 1.0)) return inner.support_upper();
    return inner.quantile_unchecked(p.first(split), u);
  };
  ops.grid = [outer, inner](const SampleSummary& s) {
    Grid grid;
    for (const auto& gi : inner.default_grid(s)) {
      for (const auto& go : outer.default_grid(s)) {
        ParamVector p = gi;
        p.insert(p.end(), go.begin(), go.end());
        grid.push_back(std::move(p));
      }
    }
    return grid;
  };
  return Family(outer.name() + "-" + inner.name(), std::move(domains), inner.support_lower(), inner.support_upper(),
                std::move(ops));
}

Family shift_by(const Family& base, double c) {
  if (!std::isfinite(c)) throw DomainError("shift_by: shift must be finite");
  if (c == 0.0) return base;
  FamilyOps ops;
  ops.log_pdf = [base, c](std::span<const double> p, double y) { return base.log_pdf_unchecked(p, y - c); };
  ops.cdf = [base, c](std::span<const double> p, double y) { return base.cdf_unchecked(p, y - c); };
  ops.quantile = [base, c](std::span<const double> p, double q) { return c + base.quantile_unchecked(p, q); };
  ops.grid = [base, c](const SampleSummary& s) {
    SampleSummary moved = s;
    moved.mean = s.mean - c;
    if (moved.mean > 0.0) {
      const double var = std::log1p((s.sd * s.sd) / (moved.mean * moved.mean));
      moved.log_mean = std::log(moved.mean) - 0.5 * var;
      moved.log_sd = std::sqrt(var);
    }
    return base.default_grid(moved);
  };
  return Family(base.name(), std::vector<ParamDomain>(base.domains().begin(), base.domains().end()),
                base.support_lower() + c, base.support_upper() + c, std::move(ops));
}

Family truncated_family(const Family& base, double c) {
  if (!std::isfinite(c)) throw DomainError("truncated_family: cut point must be finite");
  // log(1 - F(c)); -inf marks a degenerate parameter point.
  auto log_survival = [base, c](std::span<const double> p) { return std::log1p(-base.cdf_unchecked(p, c)); };

  FamilyOps ops;
  ops.log_pdf = [base, c, log_survival](std::span<const double> p, double y) {
    if (y < 0.0) return -kInf;
    const double ls = log_survival(p);
    if (ls == -kInf) return -kInf;
    return base.log_pdf_unchecked(p, y + c) - ls;
  };
  ops.cdf = [base, c](std::span<const double> p, double y) {
    const double fc = base.cdf_unchecked(p, c);
    if (fc >= 1.0) return 1.0;
    return (base.cdf_unchecked(p, y + c) - fc) / (1.0 - fc);
  };
  ops.quantile = [base, c](std::span<const double> p, double q) {
    const double fc = base.cdf_unchecked(p, c);
    const double target = fc + q * (1.0 - fc);
    if (!(target < 1.0)) return kInf;
    return std::max(0.0, base.quantile_unchecked(p, target) - c);
  };
  ops.grid = [base](const SampleSummary& s) { return base.default_grid(s); };
  const double lower = std::max(0.0, base.support_lower() - c);
  return Family(base.name() + "|trunc=" + format_value(c),
                std::vector<ParamDomain>(base.domains().begin(), base.domains().end()), lower,
                base.support_upper() - c, std::move(ops));
}

Family freeze(const Family& base, std::vector<std::optional<double>> fixed) {
  if (fixed.size() != base.param_count()) throw ContractError("freeze: one entry per parameter required");
  std::vector<ParamDomain> free_domains;
  std::vector<std::size_t> free_index;
  std::string name = base.name() + "[";
  bool first = true;
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    const auto& d = base.domains()[i];
    if (fixed[i]) {
      if (!d.contains(*fixed[i])) throw DomainError("freeze: fixed value for '" + d.name + "' outside its domain");
      name += (first ? "" : ",") + d.name + "=" + format_value(*fixed[i]);
      first = false;
    } else {
      free_domains.push_back(d);
      free_index.push_back(i);
    }
  }
  name += "]";

  auto expand = [fixed](std::span<const double> p) {
    ParamVector full(fixed.size());
    std::size_t j = 0;
    for (std::size_t i = 0; i < fixed.size(); ++i) full[i] = fixed[i] ? *fixed[i] : p[j++];
    return full;
  };
  FamilyOps ops;
  ops.log_pdf = [base, expand](std::span<const double> p, double x) {
    return base.log_pdf_unchecked(expand(p), x);
  };
  ops.cdf = [base, expand](std::span<const double> p, double x) { return base.cdf_unchecked(expand(p), x); };
  ops.quantile = [base, expand](std::span<const double> p, double q) {
    return base.quantile_unchecked(expand(p), q);
  };
  ops.grid = [base, free_index](const SampleSummary& s) {
    std::set<ParamVector> seen;
    Grid grid;
    for (const auto& g : base.default_grid(s)) {
      ParamVector p;
      for (std::size_t i : free_index) p.push_back(g[i]);
      if (seen.insert(p).second) grid.push_back(std::move(p));
    }
    return grid;
  };
  return Family(std::move(name), std::move(free_domains), base.support_lower(), base.support_upper(),
                std::move(ops));
}

Distribution::Distribution(Family family, ParamVector params) : family_(std::move(family)), params_(std::move(params)) {
  family_.check(params_);
}

double Distribution::pdf(double x) const { return std::exp(log_pdf(x)); }

double Distribution::quantile(double q) const {
  if (!(q > 0.0 && q < 1.0)) throw DomainError(family_.name() + ": quantile probability must lie in (0, 1)");
  return family_.quantile_unchecked(params_, q);
}

Distribution truncate_at(const Family& family, const ParamVector& params, double c) {
  family.check(params);
  if (family.cdf_unchecked(params, c) >= 1.0) {
    throw DegenerateError(family.name() + ": truncation point leaves no probability mass");
  }
  return Distribution(truncated_family(family, c), params);
}

}  // namespace locfit
