#pragma once

// Variable-step, variable-order Adams-Bashforth-Moulton integrator (PECE)
// for complex-valued systems y' = f(t, y).
//
// Each step predicts with Adams-Bashforth of order p and corrects with
// Adams-Moulton of order p+1 (local extrapolation). The difference between
// the order p and p+1 correctors estimates the local error. Integration
// weights are built directly on the nonuniform history nodes, so step
// changes do not require restarting. Dense output integrates the accepted
// corrector polynomial.

#include <complex>
#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <vector>

namespace bic::numeric {

class AdamsIntegrator {
 public:
  using value_type = std::complex<double>;
  using Rhs = std::function<void(double t, std::span<const value_type> y, std::span<value_type> dydt)>;

  struct Options {
    double rel_tol = 1e-13;
    double abs_tol = 1e-15;
    int max_order = 12;
    /// Initial step; 0 picks one from the tolerances and |f(t0, y0)|.
    double initial_step = 0.0;
    /// Largest permitted step; 0 means unbounded.
    double max_step = 0.0;
    std::size_t max_steps = 50'000'000;
  };

  struct Stats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evaluations = 0;
    int order = 1;
    double step = 0.0;
  };

  AdamsIntegrator(Rhs rhs, std::vector<value_type> y0, double t0, Options options);

  /// Interpolated solution at t_out >= the previous output time. Steps as
  /// far as needed; never integrates backwards.
  void advance_to(double t_out, std::span<value_type> y_out);

  /// Accepted step endpoint and state.
  double time() const { return t_; }
  std::span<const value_type> state() const { return y_; }
  const Stats& stats() const { return stats_; }

  /// Performs one accepted step, retrying with smaller steps as needed.
  /// Throws IntegratorFailure when the step size underflows.
  void step();

 private:
  struct Node {
    double t;
    std::vector<value_type> f;
  };

  void eval(double t, std::span<const value_type> y, std::span<value_type> out);
  double scaled_norm(std::span<const value_type> delta) const;
  void interpolate(double t_out, std::span<value_type> y_out) const;

  Rhs rhs_;
  Options opt_;
  std::size_t n_;
  double t_;
  double t_prev_;
  double h_;
  int order_ = 1;
  std::vector<value_type> y_;
  std::vector<value_type> y_prev_;
  double y_scale_ = 1.0;
  // Most recent node first. history_[0] is f at (t_, y_).
  std::deque<Node> history_;
  // Nodes of the last accepted corrector, used for dense output over [t_prev_, t_].
  std::vector<double> dense_t_;
  std::vector<const std::vector<value_type>*> dense_f_;
  std::vector<value_type> f_pred_;
  Stats stats_;

  std::vector<value_type> y_pred_, f_tmp_, work_lo_, work_mid_, work_hi_, work_top_;
};

/// Integral over [a, b] of each Lagrange basis polynomial on `nodes`.
/// Exact for up to 16 nodes.
std::vector<double> lagrange_integral_weights(std::span<const double> nodes, double a, double b);

}  // namespace bic::numeric
