#include "bic/numeric/special.hpp"

#include <cmath>

#include <boost/math/special_functions/bessel.hpp>

namespace bic::numeric {

double bessel_j0(double x) { return boost::math::cyl_bessel_j(0, x); }

double bessel_j1(double x) { return boost::math::cyl_bessel_j(1, x); }

double bessel_jn(int n, double x) { return boost::math::cyl_bessel_j(n, x); }

double bessel_j1_ratio(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - 0.5 * x2 + x2 * x2 / 12.0;
  }
  return bessel_j1(2.0 * x) / x;
}

}  // namespace bic::numeric
