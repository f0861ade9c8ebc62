#include "bic/evolve.hpp"

#include <cmath>
#include <sstream>

#include "bic/error.hpp"
#include "bic/numeric/adams.hpp"

namespace bic {

std::string_view to_string(TimeGrid grid) { return grid == TimeGrid::Linear ? "linear" : "log"; }

TimeGrid parse_time_grid(std::string_view name) {
  if (name == "linear") return TimeGrid::Linear;
  if (name == "log") return TimeGrid::Log;
  throw InvalidParameter("unknown grid '" + std::string(name) + "' (expected linear or log)");
}

void EvolveOptions::validate() const {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InvalidParameter("t_max must be positive");
  if (n_samples < 2) throw InvalidParameter("n_samples must be at least 2");
  if (!(rel_tol > 0.0 && rel_tol <= 1e-6)) throw InvalidParameter("rel_tol must lie in (0, 1e-6]");
  if (!(abs_tol > 0.0 && abs_tol <= rel_tol)) {
    throw InvalidParameter("abs_tol must lie in (0, rel_tol]");
  }
  if (n_sites && *n_sites < 3) throw InvalidParameter("n_sites must be at least 3");
}

std::size_t EvolveOptions::resolved_sites() const { return n_sites ? *n_sites : auto_sites(t_max); }

std::size_t auto_sites(double t_max) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InvalidParameter("t_max must be positive");
  const double n = std::ceil(2.5 * t_max) + 32.0;
  if (n > 1e6) {
    throw InvalidParameter("t_max = " + std::to_string(t_max) +
                           " needs more than 10^6 sites; use the branch-cut quadrature instead");
  }
  return static_cast<std::size_t>(n);
}

std::vector<double> sample_times(const EvolveOptions& opts) {
  std::vector<double> t(opts.n_samples);
  const std::size_t last = opts.n_samples - 1;
  if (opts.grid == TimeGrid::Linear) {
    for (std::size_t i = 0; i <= last; ++i) {
      t[i] = opts.t_max * static_cast<double>(i) / static_cast<double>(last);
    }
  } else {
    t[0] = 0.0;
    const double lo = std::log(opts.t_max * 1e-4);
    const double hi = std::log(opts.t_max);
    for (std::size_t i = 1; i <= last; ++i) {
      const double f = last == 1 ? 1.0 : static_cast<double>(i - 1) / static_cast<double>(last - 1);
      t[i] = std::exp(lo + (hi - lo) * f);
    }
  }
  t[last] = opts.t_max;
  return t;
}

AmplitudeSeries evolve(const ModelParams& params, const StateVector& initial,
                       const EvolveOptions& opts) {
  opts.validate();
  return evolve_at(params, initial, opts, sample_times(opts));
}

AmplitudeSeries evolve_at(const ModelParams& params, const StateVector& initial,
                          const EvolveOptions& opts, std::vector<double> times) {
  opts.validate();
  if (times.empty()) throw InvalidParameter("evolve needs at least one sample time");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || (i > 0 && !(times[i] >= times[i - 1]))) {
      throw InvalidParameter("sample times must be non-negative and ascending");
    }
  }
  if (times.back() > opts.t_max) throw InvalidParameter("sample times extend beyond t_max");
  const std::size_t n_sites = opts.resolved_sites();
  if (initial.n_sites() != n_sites) {
    throw InvalidParameter("initial state has " + std::to_string(initial.n_sites()) +
                           " sites but the run uses " + std::to_string(n_sites));
  }
  const TruncatedHamiltonian h = hamiltonian(params, n_sites);

  std::vector<std::size_t> support;
  const auto init = initial.amplitudes();
  for (std::size_t i = 0; i < init.size(); ++i) {
    if (init[i] != cplx{}) support.push_back(i);
  }

  numeric::AdamsIntegrator::Options io;
  io.rel_tol = opts.rel_tol;
  io.abs_tol = opts.abs_tol;
  numeric::AdamsIntegrator integ(
      [&h](double, std::span<const cplx> y, std::span<cplx> dydt) {
        h.apply(y, dydt);
        for (auto& v : dydt) v = cplx(v.imag(), -v.real());
      },
      std::vector<cplx>(init.begin(), init.end()), 0.0, io);

  AmplitudeSeries out;
  out.times = std::move(times);
  out.n_sites = n_sites;
  const std::size_t m = out.times.size();
  out.overlap.resize(m);
  out.amp_d.resize(m);
  out.amp_1.resize(m);
  out.norm.resize(m);

  std::vector<cplx> y(init.size());
  for (std::size_t s = 0; s < m; ++s) {
    integ.advance_to(out.times[s], y);
    cplx ov{};
    for (std::size_t i : support) ov += std::conj(init[i]) * y[i];
    double nn = 0.0;
    for (const auto& v : y) nn += std::norm(v);
    out.overlap[s] = ov;
    out.amp_d[s] = y[0];
    out.amp_1[s] = y[1];
    out.norm[s] = std::sqrt(nn);
    out.max_edge_weight = std::max(out.max_edge_weight, std::norm(y[n_sites]));
  }
  out.steps = integ.stats().accepted;
  out.rhs_evaluations = integ.stats().rhs_evaluations;
  if (out.max_edge_weight > kEdgeWarningThreshold) {
    std::ostringstream os;
    os.precision(3);
    os << "truncation: |psi_N|^2 reached " << out.max_edge_weight << " at N = " << n_sites
       << "; boundary reflections may contaminate the series";
    out.warning = os.str();
  }
  return out;
}

ProbabilitySeries survival(const AmplitudeSeries& series) {
  ProbabilitySeries p{series.times, std::vector<double>(series.times.size())};
  for (std::size_t i = 0; i < p.values.size(); ++i) p.values[i] = std::norm(series.overlap[i]);
  return p;
}

ProbabilitySeries nonescape(const AmplitudeSeries& series) {
  ProbabilitySeries p{series.times, std::vector<double>(series.times.size())};
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    p.values[i] = std::norm(series.amp_d[i]) + std::norm(series.amp_1[i]);
  }
  return p;
}

}  // namespace bic
