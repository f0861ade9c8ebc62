#include "bic/error.hpp"

#include <sstream>

namespace bic {

namespace {

std::string format_z(std::complex<double> z) {
  std::ostringstream os;
  os.precision(17);
  os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace

BranchPointError::BranchPointError(std::complex<double> z_)
    : NumericalFailure("evaluation at branch point z = " + format_z(z_)), z(z_) {}

NearPoleError::NearPoleError(std::complex<double> z_, double residual_)
    : NumericalFailure("resolvent evaluated at a pole: z = " + format_z(z_) +
                       ", |z - eps_d - Sigma(z)| = " + std::to_string(residual_)),
      z(z_),
      residual(residual_) {}

RootFinderError::RootFinderError(const std::string& what, std::complex<double> last, double res)
    : NumericalFailure(what + " (last iterate " + format_z(last) +
                       ", residual " + std::to_string(res) + ")"),
      last_iterate(last),
      residual(res) {}

IntegratorFailure::IntegratorFailure(const std::string& what, double t)
    : NumericalFailure(what + " at t = " + std::to_string(t)), time_reached(t) {}

QuadratureError::QuadratureError(const std::string& what, double est)
    : NumericalFailure(what + " (error estimate " + std::to_string(est) + ")"),
      error_estimate(est) {}

}  // namespace bic
