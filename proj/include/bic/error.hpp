#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace bic {

/// Rejected input: bad parameter, bad state size, unknown tag.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for failures of a numerical procedure on otherwise valid input.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation requested exactly at a branch point z = +-2.
class BranchPointError : public NumericalFailure {
 public:
  explicit BranchPointError(std::complex<double> z);
  std::complex<double> z;
};

/// |z - eps_d - Sigma(z)| fell below the pole threshold.
class NearPoleError : public NumericalFailure {
 public:
  NearPoleError(std::complex<double> z, double residual);
  std::complex<double> z;
  double residual;
};

class RootFinderError : public NumericalFailure {
 public:
  RootFinderError(const std::string& what, std::complex<double> last_iterate, double residual);
  std::complex<double> last_iterate;
  double residual;
};

class IntegratorFailure : public NumericalFailure {
 public:
  IntegratorFailure(const std::string& what, double time_reached);
  double time_reached;
};

class QuadratureError : public NumericalFailure {
 public:
  QuadratureError(const std::string& what, double error_estimate);
  double error_estimate;
};

/// Too few peaks, periods or points in a fit window, or data the fit cannot take.
class FitError : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

/// Formula evaluated outside its domain (t = 0 in a 1/sqrt(t) law, g = 1 in a far-zone law).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace bic
