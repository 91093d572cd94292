#pragma once

#include <functional>

namespace degpar {

/// Adaptive Gauss-Kronrod (G7,K15) integration.
///
/// Splits recursively until the local K15-G7 discrepancy is below the
/// tolerance share of the interval or the achievable roundoff floor
/// (50 eps |f|-mass of the panel). Endpoint singularities that are merely
/// integrable are handled by the bisection cascade; nodes are interior so the
/// integrand is never evaluated at the interval ends. Throws when the
/// accumulated error estimate exceeds the tolerance by three orders of
/// magnitude, which flags non-integrable singularities.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12, int max_depth = 300);

}  // namespace degpar
