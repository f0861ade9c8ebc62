#pragma once

#include <string>
#include <vector>

#include "bic/closedform.hpp"
#include "bic/evolve.hpp"
#include "bic/io.hpp"
#include "bic/model.hpp"

namespace bic::cli {

inline constexpr const char* kToolName = "bicdecay";
inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kInvalid = 2, kNumerical = 3 };

struct StateSpec {
  enum class Kind { Bic, Perp, W } kind = Kind::Perp;
  double w = 0.0;

  std::string label() const;
};

/// "bic", "perp" or "w:<x>".
StateSpec parse_state_spec(const std::string& text);

StateVector make_state(const StateSpec& spec, double g, std::size_t n_sites);

struct RunConfig {
  std::string command;
  double g = 1.0;
  double eps_d = 0.0;
  StateSpec state;
  double t_min = 0.0;
  EvolveOptions evolve;
  std::vector<ApproximationTag> tags;
  std::string out;
  std::string figure_id;
  int jobs = 1;
  bool meta_time = true;
};

/// Parameters, state, grid and tolerances as '#' metadata.
io::Metadata base_metadata(const RunConfig& config);

int run_spectrum(const RunConfig& config);
int run_evolve(const RunConfig& config);
int run_analytic(const RunConfig& config);
int run_compare(const RunConfig& config);
int run_figure(const RunConfig& config);

const std::vector<std::string>& figure_ids();

/// Parses the command line and dispatches. Returns the process exit code.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace bic::cli
