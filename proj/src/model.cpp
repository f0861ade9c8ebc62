#include "bic/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bic/error.hpp"

namespace bic {

namespace {

void require_coupling(double g) {
  if (!(g > 0.0) || !std::isfinite(g)) {
    throw InvalidParameter("coupling g must be positive and finite, got " + std::to_string(g));
  }
}

void require_sites(std::size_t n_sites, std::size_t minimum) {
  if (n_sites < minimum) {
    throw InvalidParameter("n_sites must be >= " + std::to_string(minimum) + ", got " +
                           std::to_string(n_sites));
  }
}

}  // namespace

ModelParams::ModelParams(double g, double eps_d) : g_(g), eps_d_(eps_d) {
  require_coupling(g);
  if (!std::isfinite(eps_d)) throw InvalidParameter("eps_d must be finite");
}

StateVector::StateVector(std::vector<cplx> amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() < 2) throw InvalidParameter("state needs |d> and at least one chain site");
}

cplx StateVector::site(std::size_t n) const {
  if (n == 0) throw InvalidParameter("chain sites are 1-based");
  return n < amps_.size() ? amps_[n] : cplx{};
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

cplx inner(const StateVector& bra, const StateVector& ket) {
  if (bra.dimension() != ket.dimension()) {
    throw InvalidParameter("inner product of states with different truncations");
  }
  cplx s{};
  auto a = bra.amplitudes();
  auto b = ket.amplitudes();
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

TruncatedHamiltonian::TruncatedHamiltonian(std::size_t n_sites, std::vector<Coupling> entries)
    : n_sites_(n_sites), entries_(std::move(entries)) {}

void TruncatedHamiltonian::apply(std::span<const cplx> in, std::span<cplx> out) const {
  if (in.size() != dimension() || out.size() != dimension()) {
    throw InvalidParameter("Hamiltonian applied to a vector of the wrong dimension");
  }
  std::fill(out.begin(), out.end(), cplx{});
  for (const auto& e : entries_) out[e.row] += e.value * in[e.col];
}

StateVector TruncatedHamiltonian::apply(const StateVector& psi) const {
  std::vector<cplx> out(dimension());
  apply(psi.amplitudes(), out);
  return StateVector(std::move(out));
}

double TruncatedHamiltonian::at(std::size_t row, std::size_t col) const {
  double v = 0.0;
  for (const auto& e : entries_) {
    if (e.row == row && e.col == col) v += e.value;
  }
  return v;
}

StateVector bic_state(double g, std::size_t n_sites) {
  require_coupling(g);
  require_sites(n_sites, 2);
  const double c = 1.0 / std::sqrt(1.0 + g * g);
  std::vector<cplx> a(n_sites + 1);
  a[0] = c;
  a[1] = -g * c;
  return StateVector(std::move(a));
}

StateVector perp_state(double g, std::size_t n_sites) {
  require_coupling(g);
  require_sites(n_sites, 2);
  const double c = 1.0 / std::sqrt(1.0 + g * g);
  std::vector<cplx> a(n_sites + 1);
  a[0] = g * c;
  a[1] = c;
  return StateVector(std::move(a));
}

double w_state_norm(double g, double w) { return 1.0 / std::sqrt(1.0 + g * g + w * w); }

StateVector w_state(double g, double w, std::size_t n_sites) {
  require_coupling(g);
  require_sites(n_sites, 3);
  if (!std::isfinite(w)) throw InvalidParameter("w must be finite");
  const double c = w_state_norm(g, w);
  std::vector<cplx> a(n_sites + 1);
  a[0] = g * c;
  a[1] = c;
  a[2] = w * c;
  return StateVector(std::move(a));
}

StateVector basis_state(std::size_t index, std::size_t n_sites) {
  require_sites(n_sites, 1);
  if (index > n_sites) throw InvalidParameter("basis index beyond truncation");
  std::vector<cplx> a(n_sites + 1);
  a[index] = 1.0;
  return StateVector(std::move(a));
}

TruncatedHamiltonian hamiltonian(const ModelParams& params, std::size_t n_sites) {
  require_sites(n_sites, 3);
  std::vector<Coupling> e;
  e.reserve(2 * n_sites + 1);
  if (params.eps_d() != 0.0) e.push_back({0, 0, params.eps_d()});
  e.push_back({0, 2, -params.g()});
  e.push_back({2, 0, -params.g()});
  for (std::size_t n = 1; n < n_sites; ++n) {
    e.push_back({n, n + 1, -ModelParams::j_hop()});
    e.push_back({n + 1, n, -ModelParams::j_hop()});
  }
  return TruncatedHamiltonian(n_sites, std::move(e));
}

}  // namespace bic
