// Hamilton-Jacobi companion of the conservation-law control cost: potentials
// b with u = b_x, the quadratic residual cost J_eps and its 1/eps rescaling,
// and the exact decomposition of J_eps into the conservation-law part plus a
// time-fiber penalty carried by a spatially constant profile gamma(t).
#pragma once

#include <functional>
#include <vector>

#include "sclab/cost.hpp"
#include "sclab/grid.hpp"
#include "sclab/model.hpp"
#include "sclab/solvers.hpp"

namespace sclab::hj {

// Potential b(t,x) stored at grid interfaces ((nt+1) x (nx+1) nodes) with
// the gauge b(0,-L) = 0.  The spatial increments b_x live at cell centers
// and must stay in [0,1].
struct HJField {
  grid::SpaceTimeGrid grid;
  std::vector<double> values;  // (nt+1) * (nx+1)

  HJField() = default;
  explicit HJField(const grid::SpaceTimeGrid& g)
      : grid(g),
        values(static_cast<size_t>(g.nt + 1) * (g.nx + 1), 0.0) {}

  double& at(int n, int j) {
    return values[static_cast<size_t>(n) * (grid.nx + 1) + j];
  }
  double at(int n, int j) const {
    return values[static_cast<size_t>(n) * (grid.nx + 1) + j];
  }

  // u = b_x as a cell-centered field.
  grid::SpaceTimeField derivative() const;

  // Gauge b(0,-L)=0 and b_x in [-tol, 1+tol] everywhere; throws
  // DomainMismatch on violation.
  void validate(double tol = 1e-9) const;
};

// Integrates u = b_x in space at t = 0 and advances the left-boundary value
// by the discrete interface flux of the viscous (optionally controlled)
// dynamics, so a solver output integrates to a machine-zero-residual b.
HJField from_field(const model::FluxModel& m, const grid::SpaceTimeField& u,
                   double eps, const cost::CostOptions& opts = {},
                   const solvers::ControlField* control = nullptr);

// Adds dt * gamma(t_{n+1/2}) to every interface value of time slice n+1,
// ..., nt: shifts the residual of every step n by exactly gamma(t_{n+1/2}).
void add_time_ramp(HJField& b, const std::function<double(double)>& gamma);

// J_eps = (1/2) iint R^2 / sigma(bx) with R the interface residual
// R = b_t + Phi, Phi the same flux/diffusion stencil as the viscous solver.
// x-integration uses the trapezoid rule over the nx+1 interfaces.
cost::CostReport cost_J_eps(const model::FluxModel& m, const HJField& b,
                            double eps, const cost::CostOptions& opts = {});

struct JDecomposition {
  double i_part = 0.0;      // conservation-law cost of u = b_x
  double gamma_part = 0.0;  // (1/2) iint gamma(t)^2 / sigma(bx)
  std::vector<double> gamma;  // per-step profile gamma(t_{n+1/2})
  double x_variance = 0.0;  // max over steps of the slice variance of gamma
  double cross_term = 0.0;  // mixed term (vanishes for compactly
                            // supported conservation-law potentials)
  double j_value = 0.0;     // cost_J_eps for the same b
};

// Splits J_eps(b) into cost_I_eps(b_x) plus the time-fiber penalty.  Throws
// DecompositionDefect when the recovered gamma is not constant in x beyond
// `variance_tol` (a discretization inconsistency, not a user error).
JDecomposition decompose_J(const model::FluxModel& m, const HJField& b,
                           double eps, const cost::CostOptions& opts = {},
                           double variance_tol = 1e-8);

// Sweep rows for the rescaled cost K_eps = J_eps / eps.
struct HjSweepRow {
  double eps;
  double J;
  double K;
  double i_part;
  double gamma_part;
};

// Tabulates (eps, J, K = J/eps, i_part, gamma_part) for a family of
// potentials, one per eps (built upstream by from_field).
std::vector<HjSweepRow> hj_sweep(
    const model::FluxModel& m,
    const std::vector<std::pair<double, HJField>>& family,
    const cost::CostOptions& opts = {});

}  // namespace sclab::hj
