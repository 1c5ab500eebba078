#pragma once

// Special functions evaluated in log space where it matters. All functions
// are pure and reentrant (no use of the global signgam set by std::lgamma).

namespace locfit::special {

/// log Γ(x) for x > 0 (Lanczos, g = 7, 9 terms).
double log_gamma(double x);

/// Γ(x) for x > 0; +inf once it overflows.
double gamma_fn(double x);

/// Lower regularized incomplete gamma ratio P(k, z) = γ(k, z) / Γ(k).
double inc_gamma_ratio(double k, double z);
/// Upper ratio Q(k, z) = 1 - P(k, z), accurate when small.
double inc_gamma_upper(double k, double z);
double log_inc_gamma_lower(double k, double z);
double log_inc_gamma_upper(double k, double z);

/// z such that P(k, z) = p, p in (0, 1).
double inc_gamma_inverse(double k, double p);
/// z such that Q(k, z) = q, q in (0, 1).
double inc_gamma_upper_inverse(double k, double q);

double log_beta(double a, double b);
/// Regularized incomplete beta I_x(a, b).
double inc_beta_ratio(double a, double b, double x);

double normal_cdf(double z);
double normal_sf(double z);
double log_normal_cdf(double z);
double log_normal_sf(double z);
/// Φ⁻¹(p), p in (0, 1).
double normal_quantile(double p);

/// log(1 - exp(x)) for x <= 0.
double log1mexp(double x);
/// log(exp(a) + exp(b)).
double log_add_exp(double a, double b);

}  // namespace locfit::special
