// Config-driven experiment runner: parses flat key = value experiment files,
// resolves models and grids, and emits deterministic CSV artifacts for the
// sweep experiments (viscous limits, rescaled-cost curves, pointwise-cost
// tables, staircase configurations, Young-measure slicing, Hamilton-Jacobi
// sweeps and jump-functional comparisons).
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sclab/grid.hpp"
#include "sclab/model.hpp"
#include "sclab/solvers.hpp"

namespace sclab::cli {

struct ExperimentConfig {
  std::string source;  // file name, for diagnostics
  std::string kind;

  // model
  std::string flux = "quadratic";  // quadratic | quadratic-selfcond | cubic |
                                   // linear | table:<path>
  std::string diffusion = "one";   // one | state | const:<v>
  std::string sigma = "one";       // one | state | flux | const:<v>

  // grid
  double T = 1.0;
  double L = 1.0;
  int nx = 200;
  int nt = 400;
  std::string boundary = "constant";  // constant | periodic

  // kind-specific parameters
  std::vector<double> eps_list;  // strictly decreasing
  double u_minus = 0.8;
  double u_plus = 0.2;
  std::vector<double> b_levels;  // staircase offsets b_i
  double b_next = 0.0;           // trailing offset (0 -> b_n/2)
  std::vector<int> k_list;       // strip counts
  int h = 1;                     // window count
  int table_n = 51;              // (w,c) table resolution per axis
  double gamma_amplitude = 0.0;  // hj-sweep time-fiber contamination

  std::string output_dir = "out";
  std::uint64_t seed = 1;
};

// Parses a flat "key = value" file ('#' comments, blank lines ignored).
// Unknown keys, malformed lines and unparsable values throw ConfigError
// with the offending line and key.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& source_name);

// Structural checks beyond parsing: known kind, resolvable model names,
// strictly decreasing nonempty eps list where required, CFL feasibility of
// the requested grid.  Throws ConfigError.
void validate_config(const ExperimentConfig& c);

model::FluxModel resolve_model(const ExperimentConfig& c);
grid::SpaceTimeGrid resolve_grid(const ExperimentConfig& c);

// The experiment kinds, with one-line descriptions (list-kinds output).
std::vector<std::pair<std::string, std::string>> experiment_kinds();

// Stationary viscous shock profile of the reversed jump with the exact
// discrete control holding the requested orientation steady.
struct RecoveryResult {
  grid::SpaceTimeField u;    // stationary profile field
  solvers::ControlField E;   // discrete steady-state control (zero when
                             // the requested orientation is entropic)
  double cost_h = 0.0;       // eps^{-1} * (1/2) iint sigma E^2
  bool entropic = false;     // requested orientation is the viscous one
};

// Requires a stationary Rankine-Hugoniot pair (f(u_minus) = f(u_plus));
// shift the flux first for moving shocks.  Throws ShootingFailed when no
// monotone viscous connection exists.
RecoveryResult recovery_family(const model::FluxModel& m,
                               const grid::SpaceTimeGrid& g, double u_minus,
                               double u_plus, double eps);

// Runs one experiment; artifacts land in <output root>/<output_dir>/ where
// the root is $SCLAB_OUTPUT_ROOT or ".".  Returns 0 on success, 2 when some
// sweep entries failed (completed artifacts are kept).
int run_experiment(const ExperimentConfig& c, std::ostream& log);

// Full command-line interface: run <config> | validate <config> |
// list-kinds.  Exit codes: 0 ok, 1 config error, 2 runtime failure.
int main_entry(int argc, char** argv);

}  // namespace sclab::cli
