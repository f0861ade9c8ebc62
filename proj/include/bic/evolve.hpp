#pragma once

// Direct integration of i dpsi/dt = H psi on the truncated chain.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bic/model.hpp"

namespace bic {

enum class TimeGrid { Linear, Log };

std::string_view to_string(TimeGrid grid);
TimeGrid parse_time_grid(std::string_view name);

struct EvolveOptions {
  double t_max = 100.0;
  std::size_t n_samples = 1001;
  double rel_tol = 1e-13;
  double abs_tol = 1e-15;
  /// Chain length; empty selects auto_sites(t_max).
  std::optional<std::size_t> n_sites;
  TimeGrid grid = TimeGrid::Linear;

  /// Throws InvalidParameter for out-of-range fields.
  void validate() const;
  std::size_t resolved_sites() const;
};

/// Sample times. The log grid starts at 0 and is geometric from 1e-4 t_max to t_max.
std::vector<double> sample_times(const EvolveOptions& opts);

/// ceil(2.5 t_max) + 32. Refuses chains longer than 10^6 sites.
std::size_t auto_sites(double t_max);

inline constexpr double kEdgeWarningThreshold = 1e-8;

struct AmplitudeSeries {
  std::vector<double> times;
  /// <psi(0)|psi(t)>.
  std::vector<cplx> overlap;
  std::vector<cplx> amp_d;
  std::vector<cplx> amp_1;
  std::vector<double> norm;
  std::size_t n_sites = 0;
  /// Largest |psi_N|^2 seen at the samples.
  double max_edge_weight = 0.0;
  std::optional<std::string> warning;
  std::size_t steps = 0;
  std::size_t rhs_evaluations = 0;
};

struct ProbabilitySeries {
  std::vector<double> times;
  std::vector<double> values;
};

/// Throws IntegratorFailure if the step size underflows.
AmplitudeSeries evolve(const ModelParams& params, const StateVector& initial,
                       const EvolveOptions& opts);

/// As above on an explicit ascending grid of times >= 0 instead of the grid in `opts`.
AmplitudeSeries evolve_at(const ModelParams& params, const StateVector& initial,
                          const EvolveOptions& opts, std::vector<double> times);

/// |<psi(0)|psi(t)>|^2.
ProbabilitySeries survival(const AmplitudeSeries& series);

/// |psi_1|^2 + |psi_d|^2.
ProbabilitySeries nonescape(const AmplitudeSeries& series);

}  // namespace bic
