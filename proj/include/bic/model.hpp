#pragma once

// Side-coupled impurity on a semi-infinite tight-binding chain.
//
//   H = eps_d |d><d| - sum_n (|n><n+1| + h.c.) - g (|d><2| + |2><d|)
//
// Energies are in units of the hopping J = 1. Chain sites are labelled
// 1..N as in the usual site representation; the impurity |d> is stored at
// index 0 of every state vector, so index n is chain site n.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace bic {

using cplx = std::complex<double>;

class ModelParams {
 public:
  /// Throws InvalidParameter unless g > 0 and eps_d is finite.
  ModelParams(double g, double eps_d = 0.0);

  double g() const { return g_; }
  double eps_d() const { return eps_d_; }
  static constexpr double j_hop() { return 1.0; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  double g_;
  double eps_d_;
};

/// Amplitudes over {|d>, |1>, ..., |N>}.
class StateVector {
 public:
  /// `amplitudes[0]` is |d>, `amplitudes[n]` is chain site n. Requires N >= 1.
  explicit StateVector(std::vector<cplx> amplitudes);

  std::size_t n_sites() const { return amps_.size() - 1; }
  std::size_t dimension() const { return amps_.size(); }

  cplx amp_d() const { return amps_[0]; }
  /// Chain amplitude at 1-based site n; zero beyond the truncation.
  cplx site(std::size_t n) const;

  std::span<const cplx> amplitudes() const { return amps_; }

  double norm() const;

 private:
  std::vector<cplx> amps_;
};

cplx inner(const StateVector& bra, const StateVector& ket);

struct Coupling {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Real symmetric (N+1)x(N+1) matrix stored as its nonzero entries.
class TruncatedHamiltonian {
 public:
  TruncatedHamiltonian(std::size_t n_sites, std::vector<Coupling> entries);

  std::size_t n_sites() const { return n_sites_; }
  std::size_t dimension() const { return n_sites_ + 1; }
  const std::vector<Coupling>& entries() const { return entries_; }

  /// out = H * in. Both spans have length dimension().
  void apply(std::span<const cplx> in, std::span<cplx> out) const;
  StateVector apply(const StateVector& psi) const;

  double at(std::size_t row, std::size_t col) const;

 private:
  std::size_t n_sites_;
  std::vector<Coupling> entries_;
};

/// (|d> - g|1>)/sqrt(1+g^2): the zero-energy eigenstate at eps_d = 0.
StateVector bic_state(double g, std::size_t n_sites);

/// (g|d> + |1>)/sqrt(1+g^2): orthogonal to the BIC within the {|d>,|1>} sector.
StateVector perp_state(double g, std::size_t n_sites);

/// N_w (g|d> + |1> + w|2>), N_w = (1+g^2+w^2)^{-1/2}. Still orthogonal to the BIC.
StateVector w_state(double g, double w, std::size_t n_sites);

/// Normalization constant N_w of w_state.
double w_state_norm(double g, double w);

/// Localized basis state: index 0 is |d>, index n >= 1 is chain site n.
StateVector basis_state(std::size_t index, std::size_t n_sites);

TruncatedHamiltonian hamiltonian(const ModelParams& params, std::size_t n_sites);

}  // namespace bic
