#include "bic/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bic/error.hpp"

namespace bic {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRootResidual = 1e-12;

bool at_branch_point(cplx z) { return z.imag() == 0.0 && std::abs(z.real()) == 2.0; }

// w = e^{ik} on the given sheet; |w| < 1 on the first sheet off the cut.
cplx bloch_factor(cplx z, Sheet sheet) { return 0.5 * (-z + cut_root(z, sheet)); }

// F'(z) * (1 - w^2) for F(z) = z - eps_d - Sigma(z); finite at the band edges.
cplx scaled_root_slope(cplx w, double g) {
  const cplx w2 = w * w;
  return (1.0 - w2) + g * g * (1.0 + 3.0 * w2) * w2;
}

// Residue of <psi_perp|G|psi_perp> at a root with Bloch factor w.
cplx perp_residue(cplx w, double g) {
  const cplx w2 = w * w;
  const cplx slope = scaled_root_slope(w, g);
  if (std::abs(slope) == 0.0) return cplx{};
  return g * g * (1.0 + w2) * (1.0 + w2) * (1.0 - w2) / ((1.0 + g * g) * slope);
}

// Continuation of the first sheet from the upper half plane through the cut:
// equals Sigma_I for Im z > 0 and Sigma_II for Im z < 0, analytic across (-2, 2).
cplx continued_root(cplx z) { return cplx(0.0, 1.0) * std::sqrt(4.0 - z * z); }

cplx continued_residual(cplx z, const ModelParams& p) {
  const cplx s = continued_root(z);
  const double g2 = p.g() * p.g();
  return z - p.eps_d() - 0.5 * z * g2 * (z * z - 2.0 - z * s);
}

cplx continued_slope(cplx z, const ModelParams& p) {
  const cplx s = continued_root(z);
  const double g2 = p.g() * p.g();
  const cplx dsigma = 0.5 * g2 * (3.0 * z * z - 2.0 - 2.0 * z * s - z * z * z / s);
  return 1.0 - dsigma;
}

// Real-axis parameterization of one side of the band: x = side (2 + u^2) with
// sqrt(x^2 - 4) = side * u * sqrt(4 + u^2). u > 0 is the first sheet, u < 0 the second,
// so both sheets of a half-line are covered by one analytic function of u.
struct HalfLine {
  double side;
  double g;
  double eps;

  double x(double u) const { return side * (2.0 + u * u); }
  double root(double u) const { return side * u * std::sqrt(4.0 + u * u); }
  double residual(double u) const {
    const double xv = x(u);
    const double sigma = 0.5 * xv * g * g * (xv * xv - 2.0 - xv * root(u));
    return xv - eps - sigma;
  }
};

double bisect(const HalfLine& line, double a, double b) {
  double fa = line.residual(a);
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const double fm = line.residual(m);
    if (fm == 0.0) return m;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Cauchy bound on |z| for all solutions, from the quartic g^2 w^4 + (g^2-1) w^2 - eps w - 1 = 0
// satisfied by w = e^{ik}.
double root_bound(double g, double eps) {
  const double g2 = g * g;
  const double outer = 1.0 + std::max({std::abs(g2 - 1.0), std::abs(eps), 1.0}) / g2;
  const double inner = 1.0 + std::max({std::abs(g2 - 1.0), std::abs(eps), g2});
  return outer + inner;
}

DiscreteState make_state(cplx z, Sheet sheet, StateKind kind, double g, bool edge = false) {
  DiscreteState s;
  s.z = z;
  s.sheet = sheet;
  s.kind = kind;
  s.band_edge = edge;
  s.k = wavevector(z, kind);
  if (edge) {
    s.residue_weight = 0.0;
  } else if (kind == StateKind::BIC) {
    s.residue_weight = perp_residue(cplx(0.0, 1.0), g);
  } else {
    s.residue_weight = perp_residue(bloch_factor(z, sheet), g);
  }
  return s;
}

void find_real_roots(const ModelParams& p, std::vector<DiscreteState>& out) {
  const double u_max = std::sqrt(root_bound(p.g(), p.eps_d())) + 0.5;
  constexpr int kNodes = 8001;  // odd: u = 0 is a node
  for (double side : {-1.0, 1.0}) {
    const HalfLine line{side, p.g(), p.eps_d()};
    std::vector<double> roots;
    double u_prev = -u_max;
    double f_prev = line.residual(u_prev);
    for (int i = 1; i < kNodes; ++i) {
      const double u = -u_max + 2.0 * u_max * i / (kNodes - 1);
      const double uu = (i == (kNodes - 1) / 2) ? 0.0 : u;
      const double f = line.residual(uu);
      if (f == 0.0) {
        roots.push_back(uu);
      } else if (f_prev != 0.0 && (f < 0.0) != (f_prev < 0.0)) {
        roots.push_back(bisect(line, u_prev, uu));
      }
      u_prev = uu;
      f_prev = f;
    }
    for (double u : roots) {
      const double x = line.x(u);
      if (u == 0.0) {
        out.push_back(make_state(cplx(x, 0.0), Sheet::Second, StateKind::VirtualBound, p.g(), true));
        continue;
      }
      const Sheet sheet = u > 0.0 ? Sheet::First : Sheet::Second;
      const StateKind kind = u > 0.0 ? StateKind::Bound : StateKind::VirtualBound;
      // Within ~1e-8 of g = 1 the root rounds onto the band edge itself, where the
      // square-root branch point leaves a residual of order |g^2 - 1|.
      const bool edge = at_branch_point(cplx(x, 0.0));
      const double res =
          std::abs(cplx(x) - p.eps_d() - self_energy(cplx(x, 0.0), p.g(), sheet, BranchPoint::Limit));
      if (!edge && !(res < kRootResidual * std::max(1.0, std::abs(x * x * x)))) {
        throw RootFinderError("real-axis root did not converge", cplx(x, 0.0), res);
      }
      out.push_back(make_state(cplx(x, 0.0), sheet, kind, p.g(), edge));
    }
  }
}

// Damped Newton on the continued sheet, seeded at the small-detuning expansion.
cplx find_resonance(const ModelParams& p) {
  const ResonancePole seed = resonance_expansion(p);
  const std::vector<cplx> seeds = {
      cplx(seed.e_res, -0.5 * seed.gamma),
      cplx(seed.e_res, -seed.gamma),
      cplx(0.5 * p.eps_d(), -0.25 * std::abs(p.eps_d())),
  };
  cplx last = seeds.front();
  double last_res = std::numeric_limits<double>::infinity();
  for (cplx z : seeds) {
    cplx f = continued_residual(z, p);
    for (int it = 0; it < 200; ++it) {
      const cplx dz = -f / continued_slope(z, p);
      double lambda = 1.0;
      cplx z_new = z + dz;
      cplx f_new = continued_residual(z_new, p);
      while (std::abs(f_new) >= std::abs(f) && lambda > 1e-6) {
        lambda *= 0.5;
        z_new = z + lambda * dz;
        f_new = continued_residual(z_new, p);
      }
      const bool stalled = std::abs(f_new) >= std::abs(f);
      if (!stalled) {
        z = z_new;
        f = f_new;
      }
      if (std::abs(f) < 1e-15 || std::abs(dz) < 1e-16 * std::max(1.0, std::abs(z)) || stalled) break;
    }
    last = z;
    last_res = std::abs(f);
    if (z.imag() < 0.0 && last_res < kRootResidual) {
      const double res2 = std::abs(z - p.eps_d() - self_energy(z, p.g(), Sheet::Second));
      if (res2 < kRootResidual) return z;
    }
  }
  throw RootFinderError("resonance root finder did not converge on the second sheet", last,
                        last_res);
}

}  // namespace

std::string_view to_string(Sheet sheet) { return sheet == Sheet::First ? "First" : "Second"; }

std::string_view to_string(StateKind kind) {
  switch (kind) {
    case StateKind::BIC: return "BIC";
    case StateKind::Bound: return "Bound";
    case StateKind::VirtualBound: return "VirtualBound";
    case StateKind::Resonance: return "Resonance";
    case StateKind::AntiResonance: return "AntiResonance";
  }
  return "?";
}

Sheet parse_sheet(std::string_view name) {
  if (name == "First") return Sheet::First;
  if (name == "Second") return Sheet::Second;
  throw InvalidParameter("unknown sheet '" + std::string(name) + "'");
}

StateKind parse_state_kind(std::string_view name) {
  for (StateKind k : {StateKind::BIC, StateKind::Bound, StateKind::VirtualBound,
                      StateKind::Resonance, StateKind::AntiResonance}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidParameter("unknown state kind '" + std::string(name) + "'");
}

Sheet sheet_of(StateKind kind) {
  return (kind == StateKind::BIC || kind == StateKind::Bound) ? Sheet::First : Sheet::Second;
}

cplx cut_root(cplx z, Sheet sheet) {
  const cplx r = std::sqrt(z - 2.0) * std::sqrt(z + 2.0);
  return sheet == Sheet::First ? r : -r;
}

cplx self_energy(cplx z, double g, Sheet sheet, BranchPoint at_branch) {
  if (!(g > 0.0)) throw InvalidParameter("coupling g must be positive");
  if (at_branch_point(z)) {
    if (at_branch == BranchPoint::Throw) throw BranchPointError(z);
    return 0.5 * z * g * g * (z * z - 2.0);
  }
  // Sigma = g^2 z tau^2 with tau = (z - root)/2; the smaller of tau and 1/tau is
  // formed as a reciprocal to avoid cancellation at large |z|.
  const cplx s = cut_root(z, sheet);
  const cplx a = 0.5 * (z - s);
  const cplx b = 0.5 * (z + s);
  const cplx tau = std::abs(a) < std::abs(b) ? 1.0 / b : a;
  return g * g * z * tau * tau;
}

cplx self_energy_derivative(cplx z, double g, Sheet sheet) {
  if (at_branch_point(z)) throw BranchPointError(z);
  const cplx w = bloch_factor(z, sheet);
  const cplx w2 = w * w;
  return -g * g * (1.0 + 3.0 * w2) * w2 / (1.0 - w2);
}

cplx resolvent_dd(cplx z, const ModelParams& params, Sheet sheet) {
  const cplx denom = z - params.eps_d() - self_energy(z, params.g(), sheet);
  if (std::abs(denom) < kPoleThreshold) throw NearPoleError(z, std::abs(denom));
  return 1.0 / denom;
}

std::vector<DiscreteState> discrete_spectrum(const ModelParams& params) {
  std::vector<DiscreteState> states;
  find_real_roots(params, states);
  std::size_t quartic_roots = states.size();
  if (params.eps_d() == 0.0) {
    states.push_back(make_state(cplx(0.0, 0.0), Sheet::First, StateKind::BIC, params.g()));
    quartic_roots += 2;  // w = +-i
  } else if (quartic_roots < 4) {
    const cplx z = find_resonance(params);
    states.push_back(make_state(z, Sheet::Second, StateKind::Resonance, params.g()));
    states.push_back(make_state(std::conj(z), Sheet::Second, StateKind::AntiResonance, params.g()));
    quartic_roots += 2;
  }
  if (quartic_roots != 4) {
    throw RootFinderError("found " + std::to_string(quartic_roots) +
                              " of the 4 discrete solutions",
                          states.empty() ? cplx{} : states.back().z, 0.0);
  }
  std::stable_sort(states.begin(), states.end(), [](const DiscreteState& a, const DiscreteState& b) {
    const bool ra = a.z.imag() == 0.0;
    const bool rb = b.z.imag() == 0.0;
    if (ra != rb) return ra;
    if (ra) return a.z.real() < b.z.real();
    return a.z.imag() < b.z.imag();
  });
  return states;
}

Gap z_gap(double g) {
  if (!(g > 0.0)) throw InvalidParameter("coupling g must be positive");
  const double zg = g + 1.0 / g;
  // (1-g)^2/g avoids the cancellation in zg - 2 near g = 1.
  return {zg, (1.0 - g) * (1.0 - g) / g};
}

ResonancePole resonance_expansion(const ModelParams& p) {
  const double g2 = p.g() * p.g();
  const double e = p.eps_d();
  return {e / (1.0 + g2), 2.0 * g2 * e * e / std::pow(1.0 + g2, 3)};
}

Timescales timescales(double g) {
  const Gap gap = z_gap(g);
  Timescales ts;
  ts.t_zeno = 1.0;
  ts.delta_g = gap.delta_g;
  ts.zeno_c = (g + g * g + g * g * g - 1.0) / (g * g);
  if (g <= 1.0) {
    const double inf = std::numeric_limits<double>::infinity();
    const double t_delta = gap.delta_g > 0.0 ? 1.0 / gap.delta_g : inf;
    ts.t_delta = t_delta;
    ts.t_vr = t_delta / (100.0 * kPi * g);
    ts.t_br = 0.1 * t_delta;
  }
  return ts;
}

cplx wavevector(cplx z, StateKind kind) {
  cplx w;
  if (kind == StateKind::BIC && z == cplx(0.0, 0.0)) {
    w = cplx(0.0, 1.0);
  } else if (at_branch_point(z)) {
    w = cplx(-0.5 * z.real(), 0.0);
  } else {
    w = bloch_factor(z, sheet_of(kind));
  }
  cplx k = cplx(0.0, -1.0) * std::log(w);
  if (k.real() <= -kPi + 1e-15) k += 2.0 * kPi;
  return k;
}

}  // namespace bic
