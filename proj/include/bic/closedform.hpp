#pragma once

// Semi-analytic evaluations of the survival amplitude at eps_d = 0 and the
// closed-form laws of its near and far zones.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bic/model.hpp"

namespace bic {

/// Branch-cut part of A_perp(t) as a real integral over k in [0, pi]:
///   A_br(t) = (1+g^2)/(2 pi g^2) int_0^pi e^{2it cos k} h(k) dk,
///   h(k) = 4 sin^2 k / (z_g^2 - 4 + 4 sin^2 k).
/// A_br(0) = 1 for g <= 1 and 1/g^2 for g > 1. Absolute accuracy 1e-8.
cplx a_br_quadrature(double t, double g);

/// Contribution of the two bound states, ((g^2-1)/g^2) cos(z_g t); zero for g <= 1.
double bound_term(double t, double g);

/// Exact branch-cut amplitude for 0 < g <= 1 through the Bessel representation
///   A_br(t) = cos(z_g t) + (1/g) int_0^t sin(z_g (t - tau)) J1(2 tau)/tau dtau.
cplx bessel_exact(double t, double g);

/// bessel_exact on an ascending grid of times, sharing the cumulative integrals.
std::vector<cplx> bessel_exact(std::span<const double> times, double g);

enum class EarlyForm {
  /// (1/g)[(g-1) cos z_g t + cos(Delta_g t) J0(2t) - sin(Delta_g t) J1(2t)]
  Full,
  /// (1/g) J0(2t) - ((1-g)/g) cos 2t
  Reduced,
};

cplx early_approx(double t, double g, EarlyForm form = EarlyForm::Full);

/// cos(2t - pi/4)/(g sqrt(pi t)) - ((1-g)/g) cos 2t. Throws DomainError at t <= 0.
cplx near_zone_amp(double t, double g);

/// cos^2(2t - pi/4)/(pi g^2 t). Throws DomainError at t <= 0.
double near_zone_prob(double t, double g);

/// (1+g^2)^2 cos^2(2t - 3pi/4) / (pi g^4 Delta_g^2 (2+z_g)^2 t^3), for 0 < g < 1.
/// Throws DomainError for g >= 1, where the gap closes; use near_zone_prob there.
double far_zone_prob(double t, double g);

/// Coefficient of cos^2(2t - 3pi/4)/t^3 in far_zone_prob.
double far_zone_coefficient(double g);

struct PoleContribution {
  double amplitude;
  double rate;
};

/// Resonance-pole term in P_perp: amplitude g^4 eps^4/(1+g^2)^8, rate Gamma.
PoleContribution res_pole_perp(const ModelParams& params);

/// Resonance-pole term in P_1d: amplitude g^2 eps^2/(1+g^2)^4, rate Gamma.
PoleContribution res_pole_1d(const ModelParams& params);

/// (z - sqrt(z^2-4))/2 on the first sheet, so that sigma1 + 1/sigma1 = z and |sigma1| <= 1.
cplx sigma1(cplx z);

/// Q(z) = g^2 + sigma1^2 (2g^2 - 2g^2 w z + g^2 sigma1^2 - 2wz + w^2 z^2).
/// Gives <psi_w|(z - H)^{-1}|psi_w> = N_w^2 (sigma1 + Q G_dd) only at eps_d = 0.
cplx q_of_z(cplx z, double g, double w);

/// <psi_w|(z - H)^{-1}|psi_w> on the first sheet for any eps_d, from the Dyson
/// equation with the chain Green's function; equals N_w^2 (sigma1 + Q G_dd) at eps_d = 0.
cplx a_w_resolvent(cplx z, const ModelParams& params, double w);

/// <psi_w|e^{-iHt}|psi_w> from the cut discontinuity of a_w_resolvent plus
/// the bound-state poles (present for g > 1). Absolute accuracy 1e-8.
cplx a_w_amplitude(double t, const ModelParams& params, double w);

/// w = 1 far zone: (2 + g z_g)^4 / (4 pi g^4 (2+g^2)^2 (2+z_g)^2 Delta_g^2 t^3), 0 < g < 1.
double w_far_zone(double t, double g);

/// w = 1 near zone at g = 1: 16/(9 pi t).
double w_near_zone_g1(double t);

enum class ApproximationTag {
  EarlyBessel,
  NearZoneAmp,
  NearZoneEarlyProb,
  FarZoneProb,
  BoundTerm,
  ResPolePerp,
  ResPole1d,
  WFarZone,
  WNearZoneG1,
};

std::string_view to_string(ApproximationTag tag);
ApproximationTag parse_approximation_tag(std::string_view name);
const std::vector<ApproximationTag>& all_approximation_tags();

struct ValidityWindow {
  double t_lo;
  double t_hi;
  bool contains(double t) const { return t >= t_lo && t <= t_hi; }
};

/// Time window in which the approximation is expected to hold.
/// Throws InvalidParameter or DomainError when the tag does not apply to `params`.
ValidityWindow validity_window(ApproximationTag tag, const ModelParams& params);

/// Prediction for the probability curve the approximation describes:
/// |amplitude|^2 for the amplitude forms, the probability itself otherwise,
/// and amplitude * exp(-rate t) for the resonance-pole terms.
double evaluate(ApproximationTag tag, double t, const ModelParams& params);

}  // namespace bic
