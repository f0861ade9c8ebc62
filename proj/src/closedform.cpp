#include "bic/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bic/error.hpp"
#include "bic/numeric/quadrature.hpp"
#include "bic/numeric/special.hpp"
#include "bic/spectrum.hpp"

namespace bic {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCutTolerance = 1e-10;
constexpr double kPanel = 0.5;

void require_g(double g) {
  if (!(g > 0.0) || !std::isfinite(g)) throw InvalidParameter("coupling g must be positive");
}

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidParameter("time must be non-negative");
}

std::size_t cut_panels(double t) { return static_cast<std::size_t>(std::ceil(2.0 * t)) + 64; }

double gap_detuning(double g) {
  const double d = g - 1.0 / g;
  return d * d;  // z_g^2 - 4
}

}  // namespace

cplx a_br_quadrature(double t, double g) {
  require_g(g);
  require_time(t);
  const double d = gap_detuning(g);
  auto f = [t, d](double k) {
    const double s2 = 4.0 * std::sin(k) * std::sin(k);
    const double h = d == 0.0 ? 1.0 : s2 / (d + s2);
    const double phase = 2.0 * t * std::cos(k);
    return cplx(std::cos(phase), std::sin(phase)) * h;
  };
  const auto r = numeric::periodic_midpoint(f, 0.0, kPi, kCutTolerance, cut_panels(t));
  return r.value * ((1.0 + g * g) / (2.0 * kPi * g * g));
}

double bound_term(double t, double g) {
  require_g(g);
  if (g <= 1.0) return 0.0;
  return ((g * g - 1.0) / (g * g)) * std::cos((g + 1.0 / g) * t);
}

std::vector<cplx> bessel_exact(std::span<const double> times, double g) {
  require_g(g);
  if (g > 1.0) throw InvalidParameter("bessel_exact requires 0 < g <= 1");
  const double zg = g + 1.0 / g;
  std::vector<cplx> out;
  out.reserve(times.size());
  // C + iS = int_0^t e^{i z_g tau} J1(2 tau)/tau dtau, accumulated panel by panel.
  cplx cum{};
  double t_done = 0.0;
  auto integrand = [zg](double tau) {
    return std::polar(numeric::bessel_j1_ratio(tau), zg * tau);
  };
  for (double t : times) {
    require_time(t);
    if (t < t_done) throw InvalidParameter("bessel_exact expects ascending times");
    while (t_done < t) {
      const double next = std::min(t, t_done + kPanel);
      cum += numeric::adaptive_gauss_kronrod(integrand, t_done, next, 1e-14).value;
      t_done = next;
    }
    const double c = std::cos(zg * t);
    const double s = std::sin(zg * t);
    out.emplace_back(c + (s * cum.real() - c * cum.imag()) / g, 0.0);
  }
  return out;
}

cplx bessel_exact(double t, double g) {
  const double ts[1] = {t};
  return bessel_exact(std::span<const double>(ts, 1), g).front();
}

cplx early_approx(double t, double g, EarlyForm form) {
  require_g(g);
  require_time(t);
  if (g > 1.0) throw InvalidParameter("early-time approximation requires 0 < g <= 1");
  const double j0 = numeric::bessel_j0(2.0 * t);
  if (form == EarlyForm::Reduced) return j0 / g - ((1.0 - g) / g) * std::cos(2.0 * t);
  const double zg = g + 1.0 / g;
  const double dg = (1.0 - g) * (1.0 - g) / g;
  const double j1 = numeric::bessel_j1(2.0 * t);
  return ((g - 1.0) * std::cos(zg * t) + std::cos(dg * t) * j0 - std::sin(dg * t) * j1) / g;
}

cplx near_zone_amp(double t, double g) {
  require_g(g);
  if (!(t > 0.0)) throw DomainError("near-zone amplitude diverges at t = 0");
  return std::cos(2.0 * t - 0.25 * kPi) / (g * std::sqrt(kPi * t)) -
         ((1.0 - g) / g) * std::cos(2.0 * t);
}

double near_zone_prob(double t, double g) {
  require_g(g);
  if (!(t > 0.0)) throw DomainError("near-zone probability diverges at t = 0");
  const double c = std::cos(2.0 * t - 0.25 * kPi);
  return c * c / (kPi * g * g * t);
}

double far_zone_coefficient(double g) {
  require_g(g);
  if (g >= 1.0) {
    throw DomainError("far-zone law diverges for g >= 1 (gap closes); use near_zone_prob at g = 1");
  }
  const double zg = g + 1.0 / g;
  const double dg = (1.0 - g) * (1.0 - g) / g;
  const double g2 = g * g;
  return (1.0 + g2) * (1.0 + g2) / (kPi * g2 * g2 * dg * dg * (2.0 + zg) * (2.0 + zg));
}

double far_zone_prob(double t, double g) {
  const double coef = far_zone_coefficient(g);
  if (!(t > 0.0)) throw DomainError("far-zone probability diverges at t = 0");
  const double c = std::cos(2.0 * t - 0.75 * kPi);
  return coef * c * c / (t * t * t);
}

PoleContribution res_pole_perp(const ModelParams& p) {
  const double g2 = p.g() * p.g();
  const double e2 = p.eps_d() * p.eps_d();
  return {g2 * g2 * e2 * e2 / std::pow(1.0 + g2, 8), resonance_expansion(p).gamma};
}

PoleContribution res_pole_1d(const ModelParams& p) {
  const double g2 = p.g() * p.g();
  const double e2 = p.eps_d() * p.eps_d();
  return {g2 * e2 / std::pow(1.0 + g2, 4), resonance_expansion(p).gamma};
}

cplx sigma1(cplx z) { return 0.5 * (z - cut_root(z, Sheet::First)); }

cplx q_of_z(cplx z, double g, double w) {
  const cplx s = sigma1(z);
  const cplx s2 = s * s;
  const double g2 = g * g;
  return g2 + s2 * (2.0 * g2 - 2.0 * g2 * w * z + g2 * s2 - 2.0 * w * z + w * w * z * z);
}

namespace {

// Chain Green's function elements G_11 = s, G_12 = -s^2, G_22 = s + s^3 with s = sigma1(z).
// <psi_w|G|psi_w> / N_w^2 = pole_weight * G_dd + regular.
struct WParts {
  cplx pole_weight;
  cplx regular;
};

WParts w_parts(cplx z, double g, double w) {
  const cplx s = sigma1(z);
  const cplx c12 = -s * s;
  const cplx c22 = s + s * s * s;
  const cplx u = c12 + w * c22;
  return {g * g * (1.0 - u) * (1.0 - u), s + 2.0 * w * c12 + w * w * c22};
}

}  // namespace

cplx a_w_resolvent(cplx z, const ModelParams& params, double w) {
  const double n2 = std::pow(w_state_norm(params.g(), w), 2);
  const WParts parts = w_parts(z, params.g(), w);
  return n2 * (parts.regular + parts.pole_weight * resolvent_dd(z, params, Sheet::First));
}

cplx a_w_amplitude(double t, const ModelParams& params, double w) {
  require_time(t);
  auto f = [&](double k) {
    const double e = -2.0 * std::cos(k);
    const double im = a_w_resolvent(cplx(e, 0.0), params, w).imag();
    const double phase = 2.0 * t * std::cos(k);
    return cplx(std::cos(phase), std::sin(phase)) * (std::sin(k) * im);
  };
  cplx a = numeric::periodic_midpoint(f, 0.0, kPi, kCutTolerance, cut_panels(t)).value *
           (-2.0 / kPi);
  const double g = params.g();
  const double n2 = std::pow(w_state_norm(g, w), 2);
  for (const auto& st : discrete_spectrum(params)) {
    if (st.kind != StateKind::Bound) continue;
    const cplx z = st.z;
    const cplx res = n2 * w_parts(z, g, w).pole_weight / (1.0 - self_energy_derivative(z, g, Sheet::First));
    a += res * std::exp(cplx(0.0, -1.0) * z * t);
  }
  return a;
}

double w_far_zone(double t, double g) {
  require_g(g);
  if (g >= 1.0) throw DomainError("w-state far-zone law diverges for g >= 1");
  if (!(t > 0.0)) throw DomainError("w-state far-zone law diverges at t = 0");
  const double zg = g + 1.0 / g;
  const double dg = (1.0 - g) * (1.0 - g) / g;
  const double g2 = g * g;
  const double num = std::pow(2.0 + g * zg, 4);
  return num / (4.0 * kPi * g2 * g2 * std::pow(2.0 + g2, 2) * std::pow(2.0 + zg, 2) * dg * dg *
                t * t * t);
}

double w_near_zone_g1(double t) {
  if (!(t > 0.0)) throw DomainError("w-state near-zone law diverges at t = 0");
  return 16.0 / (9.0 * kPi * t);
}

namespace {

struct TagInfo {
  ApproximationTag tag;
  std::string_view name;
};

constexpr TagInfo kTags[] = {
    {ApproximationTag::EarlyBessel, "EarlyBessel"},
    {ApproximationTag::NearZoneAmp, "NearZoneAmp"},
    {ApproximationTag::NearZoneEarlyProb, "NearZoneEarlyProb"},
    {ApproximationTag::FarZoneProb, "FarZoneProb"},
    {ApproximationTag::BoundTerm, "BoundTerm"},
    {ApproximationTag::ResPolePerp, "ResPolePerp"},
    {ApproximationTag::ResPole1d, "ResPole1d"},
    {ApproximationTag::WFarZone, "WFarZone"},
    {ApproximationTag::WNearZoneG1, "WNearZoneG1"},
};

void require_bic_point(const ModelParams& p, std::string_view what) {
  if (p.eps_d() != 0.0) {
    throw InvalidParameter(std::string(what) + " assumes eps_d = 0");
  }
}

void require_subcritical(const ModelParams& p, std::string_view what) {
  if (p.g() > 1.0) throw InvalidParameter(std::string(what) + " requires g <= 1");
}

}  // namespace

std::string_view to_string(ApproximationTag tag) {
  for (const auto& info : kTags) {
    if (info.tag == tag) return info.name;
  }
  return "?";
}

ApproximationTag parse_approximation_tag(std::string_view name) {
  for (const auto& info : kTags) {
    if (info.name == name) return info.tag;
  }
  std::string valid;
  for (const auto& info : kTags) {
    if (!valid.empty()) valid += ", ";
    valid += info.name;
  }
  throw InvalidParameter("unknown approximation tag '" + std::string(name) + "' (valid: " + valid +
                         ")");
}

const std::vector<ApproximationTag>& all_approximation_tags() {
  static const std::vector<ApproximationTag> tags = [] {
    std::vector<ApproximationTag> v;
    for (const auto& info : kTags) v.push_back(info.tag);
    return v;
  }();
  return tags;
}

ValidityWindow validity_window(ApproximationTag tag, const ModelParams& p) {
  const double inf = std::numeric_limits<double>::infinity();
  const double g = p.g();
  const Timescales ts = timescales(g);
  switch (tag) {
    case ApproximationTag::EarlyBessel:
      require_bic_point(p, "EarlyBessel");
      require_subcritical(p, "EarlyBessel");
      return {0.0, *ts.t_br};
    case ApproximationTag::NearZoneAmp:
      require_bic_point(p, "NearZoneAmp");
      require_subcritical(p, "NearZoneAmp");
      return {ts.t_zeno, *ts.t_br};
    case ApproximationTag::NearZoneEarlyProb:
      require_bic_point(p, "NearZoneEarlyProb");
      require_subcritical(p, "NearZoneEarlyProb");
      return {ts.t_zeno, *ts.t_vr};
    case ApproximationTag::FarZoneProb:
      require_bic_point(p, "FarZoneProb");
      far_zone_coefficient(g);
      return {10.0 * *ts.t_delta, inf};
    case ApproximationTag::BoundTerm:
      require_bic_point(p, "BoundTerm");
      return {0.0, inf};
    case ApproximationTag::ResPolePerp:
    case ApproximationTag::ResPole1d:
      return {10.0, inf};
    case ApproximationTag::WFarZone:
      require_bic_point(p, "WFarZone");
      if (g >= 1.0) throw DomainError("WFarZone diverges for g >= 1");
      return {10.0 * *ts.t_delta, inf};
    case ApproximationTag::WNearZoneG1:
      require_bic_point(p, "WNearZoneG1");
      if (g != 1.0) throw InvalidParameter("WNearZoneG1 holds only at g = 1");
      return {ts.t_zeno, inf};
  }
  throw InvalidParameter("unknown approximation tag");
}

double evaluate(ApproximationTag tag, double t, const ModelParams& p) {
  const double g = p.g();
  switch (tag) {
    case ApproximationTag::EarlyBessel: return std::norm(early_approx(t, g));
    case ApproximationTag::NearZoneAmp: return std::norm(near_zone_amp(t, g));
    case ApproximationTag::NearZoneEarlyProb: return near_zone_prob(t, g);
    case ApproximationTag::FarZoneProb: return far_zone_prob(t, g);
    case ApproximationTag::BoundTerm: {
      const double b = bound_term(t, g);
      return b * b;
    }
    case ApproximationTag::ResPolePerp: {
      const auto c = res_pole_perp(p);
      return c.amplitude * std::exp(-c.rate * t);
    }
    case ApproximationTag::ResPole1d: {
      const auto c = res_pole_1d(p);
      return c.amplitude * std::exp(-c.rate * t);
    }
    case ApproximationTag::WFarZone: return w_far_zone(t, g);
    case ApproximationTag::WNearZoneG1: return w_near_zone_g1(t);
  }
  throw InvalidParameter("unknown approximation tag");
}

}  // namespace bic
