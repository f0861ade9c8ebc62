#pragma once

#include <complex>
#include <cstddef>
#include <functional>

namespace bic::numeric {

struct QuadratureResult {
  std::complex<double> value;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

/// Midpoint rule on [a, b] with repeated doubling of the panel count until two
/// successive estimates agree to `abs_tol`. Converges geometrically for
/// integrands that extend to smooth periodic functions, such as even
/// functions of cos(k) over [0, pi]. The panel count stays even, so the
/// interval centre is never sampled. Throws QuadratureError past `max_panels`.
QuadratureResult periodic_midpoint(const std::function<std::complex<double>(double)>& f, double a,
                                   double b, double abs_tol, std::size_t initial_panels,
                                   std::size_t max_panels = std::size_t{1} << 24);

/// Adaptive Gauss-Kronrod (7/15) on [a, b] to the given absolute tolerance.
QuadratureResult adaptive_gauss_kronrod(const std::function<std::complex<double>(double)>& f,
                                        double a, double b, double abs_tol,
                                        unsigned max_depth = 20);

}  // namespace bic::numeric
