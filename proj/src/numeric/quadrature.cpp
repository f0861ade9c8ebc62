#include "bic/numeric/quadrature.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bic/error.hpp"

namespace bic::numeric {

namespace {

std::complex<double> midpoint_sum(const std::function<std::complex<double>(double)>& f, double a,
                                  double b, std::size_t panels) {
  const double h = (b - a) / static_cast<double>(panels);
  std::complex<double> s{};
  for (std::size_t j = 0; j < panels; ++j) s += f(a + (static_cast<double>(j) + 0.5) * h);
  return s * h;
}

}  // namespace

QuadratureResult periodic_midpoint(const std::function<std::complex<double>(double)>& f, double a,
                                   double b, double abs_tol, std::size_t initial_panels,
                                   std::size_t max_panels) {
  std::size_t m = std::max<std::size_t>(initial_panels + (initial_panels % 2), 8);
  QuadratureResult r;
  std::complex<double> prev = midpoint_sum(f, a, b, m);
  r.evaluations = m;
  double err = std::numeric_limits<double>::infinity();
  while (2 * m <= max_panels) {
    m *= 2;
    const std::complex<double> next = midpoint_sum(f, a, b, m);
    r.evaluations += m;
    err = std::abs(next - prev);
    prev = next;
    if (err <= abs_tol) {
      r.value = next;
      r.error_estimate = err;
      return r;
    }
  }
  throw QuadratureError("midpoint rule did not converge", err);
}

QuadratureResult adaptive_gauss_kronrod(const std::function<std::complex<double>(double)>& f,
                                        double a, double b, double abs_tol, unsigned max_depth) {
  QuadratureResult r;
  if (a == b) return r;
  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  std::function<void(double, double, double, unsigned)> panel = [&](double lo, double hi,
                                                                    double tol, unsigned depth) {
    double err = 0.0;
    const std::complex<double> v = Rule::integrate(f, lo, hi, 0, 0.0, &err);
    r.evaluations += 15;
    // The single-panel estimate is reported on the reference interval [-1, 1].
    err *= 0.5 * std::abs(hi - lo);
    if (err <= tol || depth >= max_depth) {
      r.value += v;
      r.error_estimate += err;
      return;
    }
    const double mid = 0.5 * (lo + hi);
    panel(lo, mid, 0.5 * tol, depth + 1);
    panel(mid, hi, 0.5 * tol, depth + 1);
  };
  panel(a, b, abs_tol, 0);
  if (!(r.error_estimate <= abs_tol)) {
    throw QuadratureError("adaptive Gauss-Kronrod did not reach the tolerance", r.error_estimate);
  }
  return r;
}

}  // namespace bic::numeric
