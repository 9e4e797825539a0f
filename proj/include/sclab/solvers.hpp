#pragma once

// Time integrators for the scalar conservation law, its viscous
// regularization (forward and backward in time), and the controlled
// equation u_t + f(u)_x + (sigma(u)E)_x = (eps/2)(D(u)u_x)_x.

#include <span>
#include <vector>

#include "sclab/grid.hpp"
#include "sclab/model.hpp"

namespace sclab::solvers {

enum class Scheme { Godunov, EngquistOsher };
enum class Stepping { Explicit, SemiImplicit };
enum class Direction { Forward, Backward };

struct SolverConfig {
  Scheme scheme = Scheme::Godunov;
  Stepping stepping = Stepping::SemiImplicit;
  // Fraction of the advective stability bound the step may use; in (0,1].
  double cfl = 0.9;
  // Tolerance for internal finiteness/range diagnostics.
  double range_tol = 1e-12;
};

// Control field sampled at cell interfaces.  Slot n (n = 0..nt-1) drives the
// update from t_n to t_{n+1}; each slot holds nx+1 interface values.
struct ControlField {
  grid::SpaceTimeGrid grid;
  std::vector<double> values;
  // (1/2) * sum sigma(u) E^2 dx dt accumulated by solve_controlled.
  double energy = 0.0;

  explicit ControlField(const grid::SpaceTimeGrid& g)
      : grid(g),
        values(static_cast<std::size_t>(g.nt) * (g.nx + 1), 0.0) {}

  double& at(int n, int j) {
    return values[static_cast<std::size_t>(n) * (grid.nx + 1) +
                  static_cast<std::size_t>(j)];
  }
  double at(int n, int j) const {
    return values[static_cast<std::size_t>(n) * (grid.nx + 1) +
                  static_cast<std::size_t>(j)];
  }
  double max_abs() const;
  void check_finite() const;  // throws NonfiniteValue
};

// Numerical fluxes at a single interface (exposed for direct testing).
// Godunov: exact min/max of f over the Riemann interval, evaluated from the
// model's critical-point table, hence valid for non-convex fluxes.
double godunov_flux(const model::FluxModel& m, double ul, double ur);
// Engquist-Osher: f(0) + int_0^ul (f')^+ + int_0^ur (f')^-, assembled
// exactly from the monotone pieces of f between critical points.
double engquist_osher_flux(const model::FluxModel& m, double ul, double ur);
double numerical_flux(const model::FluxModel& m, Scheme s, double ul,
                      double ur);

// First-order monotone scheme for u_t + f(u)_x = 0.
grid::SpaceTimeField solve_entropic(const model::FluxModel& m,
                                    const grid::SpaceTimeGrid& g,
                                    std::span<const double> u0,
                                    const SolverConfig& cfg = {});

// u_t + f(u)_x = (eps/2)(D(u)u_x)_x.  The backward direction integrates
// v_t + f(v)_x = -(eps/2)(D(v)v_x)_x down from the data given at time T,
// realized as a forward solve after the reflection (t,x) -> (T-t,-x); the
// returned field has the supplied data in its final-time slice.
grid::SpaceTimeField solve_viscous(const model::FluxModel& m,
                                   const grid::SpaceTimeGrid& g,
                                   std::span<const double> u0, double eps,
                                   Direction dir = Direction::Forward,
                                   const SolverConfig& cfg = {});

// u_t + f(u)_x + (sigma(u)E)_x = (eps/2)(D(u)u_x)_x with E on interfaces.
// Fills E.energy with the accumulated work (1/2) sum sigma E^2 dx dt, where
// sigma is evaluated at the interface mean of the start-of-step slice.
grid::SpaceTimeField solve_controlled(const model::FluxModel& m,
                                      const grid::SpaceTimeGrid& g,
                                      std::span<const double> u0, double eps,
                                      ControlField& E,
                                      const SolverConfig& cfg = {});

// Total mass of a time slice: sum_i u(n,i) * dx.
double slice_mass(const grid::SpaceTimeField& f, int n);

}  // namespace sclab::solvers
