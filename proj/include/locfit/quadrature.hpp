#pragma once

#include <functional>

namespace locfit {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b]. Either bound
/// may be infinite; infinite ranges are mapped onto a finite interval.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol = 1e-12, double rel_tol = 1e-10, int max_depth = 50);

}  // namespace locfit
