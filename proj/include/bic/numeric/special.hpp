#pragma once

// Bessel functions of the first kind, accurate to double precision far into
// the oscillatory range (x ~ 10^4).

namespace bic::numeric {

double bessel_j0(double x);
double bessel_j1(double x);
double bessel_jn(int n, double x);

/// J1(2x)/x, with the removable singularity at x = 0 filled in (value 1).
double bessel_j1_ratio(double x);

}  // namespace bic::numeric
