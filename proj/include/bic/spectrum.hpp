#pragma once

// Complex-analytic structure of the impurity resolvent.
//
// Branch convention: sqrt(z^2 - 4) is evaluated as sqrt(z - 2) * sqrt(z + 2)
// with principal roots. The cut is then exactly the band [-2, 2], and the
// first sheet behaves as Sigma(z) -> g^2 / z at infinity. The second sheet
// flips the sign of the root. A point on the cut selects its lip through the
// sign of a zero imaginary part: complex(E, +0.0) is E + i0, complex(E, -0.0)
// is E - i0.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bic/model.hpp"

namespace bic {

enum class Sheet { First, Second };

enum class StateKind { BIC, Bound, VirtualBound, Resonance, AntiResonance };

std::string_view to_string(Sheet sheet);
std::string_view to_string(StateKind kind);
Sheet parse_sheet(std::string_view name);
StateKind parse_state_kind(std::string_view name);

/// sqrt(z^2 - 4) on the requested sheet.
cplx cut_root(cplx z, Sheet sheet);

/// Behaviour exactly at z = +-2, where the root vanishes but its sheet is undefined.
enum class BranchPoint { Throw, Limit };

/// Sigma(z) = (z g^2 / 2) [z^2 - 2 - z sqrt(z^2 - 4)].
/// At z = +-2 throws BranchPointError unless `BranchPoint::Limit` is passed,
/// in which case the common limit z g^2 (z^2 - 2) / 2 is returned.
cplx self_energy(cplx z, double g, Sheet sheet, BranchPoint at_branch = BranchPoint::Throw);

/// dSigma/dz on the given sheet. Diverges at the branch points.
cplx self_energy_derivative(cplx z, double g, Sheet sheet);

/// Closest distance to a pole below which resolvent_dd refuses to evaluate.
inline constexpr double kPoleThreshold = 1e-13;

/// <d|(z - H)^{-1}|d> = 1 / (z - eps_d - Sigma(z)). Throws NearPoleError near a pole.
cplx resolvent_dd(cplx z, const ModelParams& params, Sheet sheet);

struct DiscreteState {
  cplx z;
  Sheet sheet = Sheet::First;
  StateKind kind = StateKind::Bound;
  cplx k;
  /// Residue of <psi_perp|(z - H)^{-1}|psi_perp> at z on `sheet`.
  cplx residue_weight;
  /// Degenerate solution sitting exactly on a band edge (g = 1 at eps_d = 0).
  bool band_edge = false;
};

/// All solutions of z - eps_d - Sigma(z) = 0 on both sheets, sorted with real
/// states first by ascending Re z, then the resonance / anti-resonance pair.
/// At eps_d = 0 the BIC at z = 0 is reported once.
std::vector<DiscreteState> discrete_spectrum(const ModelParams& params);

struct Gap {
  double z_g;      // g + 1/g
  double delta_g;  // z_g - 2
};

Gap z_gap(double g);

struct ResonancePole {
  double e_res;
  double gamma;
};

/// Second-order expansion of the resonance around the BIC:
/// e_res = eps_d / (1+g^2), gamma = 2 g^2 eps_d^2 / (1+g^2)^3.
ResonancePole resonance_expansion(const ModelParams& params);

/// Characteristic times in units 1/J. The gap-controlled times are only
/// meaningful without bound states; they are empty for g > 1 and infinite at g = 1.
struct Timescales {
  double t_zeno = 1.0;
  std::optional<double> t_delta;
  std::optional<double> t_vr;
  std::optional<double> t_br;
  double delta_g = 0.0;
  double zeno_c = 0.0;
};

Timescales timescales(double g);

/// Wavevector k with -2 cos k = z, on the branch matching `kind`:
/// localized (Im k > 0) for bound states, anti-localized for virtual ones.
/// Re k is reported in (-pi, pi].
cplx wavevector(cplx z, StateKind kind);

/// Sheet on which a state of the given kind lives.
Sheet sheet_of(StateKind kind);

}  // namespace bic
