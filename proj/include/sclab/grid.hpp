#pragma once

// Space-time grids, cell-centered fields, piecewise-constant BV solutions
// with polygonal shock curves, negative-order norms and the metrics built
// from them, and (de)serialization.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sclab/errors.hpp"
#include "sclab/model.hpp"

namespace sclab::grid {

enum class BoundaryMode { ConstantExtension, Periodic };

// Uniform grid on [0,T] x [-L,L]: nx cells, nt time steps.  Fields carry
// values at cell centers for each of the nt+1 time nodes.
struct SpaceTimeGrid {
  double T = 1.0;
  double L = 1.0;
  int nx = 0;
  int nt = 0;
  BoundaryMode boundary = BoundaryMode::ConstantExtension;

  double dx() const { return 2.0 * L / nx; }
  double dt() const { return T / nt; }
  double x_center(int i) const { return -L + (i + 0.5) * dx(); }
  double x_interface(int j) const { return -L + j * dx(); }
  double t_node(int n) const { return n * dt(); }

  bool same_layout(const SpaceTimeGrid& o) const {
    return T == o.T && L == o.L && nx == o.nx && nt == o.nt;
  }
  void require_same_layout(const SpaceTimeGrid& o) const {
    if (!same_layout(o)) throw GridMismatch("fields live on different grids");
  }
};

struct SpaceTimeField {
  SpaceTimeGrid grid;
  std::vector<double> values;  // (nt+1) * nx, row-major in time

  SpaceTimeField() = default;
  explicit SpaceTimeField(const SpaceTimeGrid& g)
      : grid(g), values(static_cast<size_t>(g.nt + 1) * g.nx, 0.0) {}

  double& at(int n, int i) { return values[static_cast<size_t>(n) * grid.nx + i]; }
  double at(int n, int i) const { return values[static_cast<size_t>(n) * grid.nx + i]; }
  std::span<double> slice(int n) {
    return {values.data() + static_cast<size_t>(n) * grid.nx,
            static_cast<size_t>(grid.nx)};
  }
  std::span<const double> slice(int n) const {
    return {values.data() + static_cast<size_t>(n) * grid.nx,
            static_cast<size_t>(grid.nx)};
  }

  // Throws if any value leaves [ -tol, 1 + tol ].
  void check_range(double tol = 1e-12) const;
};

// Samples u0(x) at cell centers into every time slice, or a full space-time
// callable at every node.
SpaceTimeField sample_initial(const SpaceTimeGrid& g,
                              const std::function<double(double)>& u0);
SpaceTimeField sample_field(const SpaceTimeGrid& g,
                            const std::function<double(double, double)>& u);

// --- piecewise-constant BV solutions ------------------------------------

// Shock curve x = gamma(t), polygonal in t over [0,T].
struct Polyline {
  std::vector<double> t;  // ascending, t.front()=0, t.back()=T
  std::vector<double> x;

  double position(double time) const;
  double slope(double time) const;  // one-sided on vertices
};

// Piecewise-constant weak solution: k shock curves split [-L,L] into k+1
// bands with constant values.  Curves are ordered left to right and may
// touch only at the time-boundary of the domain.
struct PiecewiseBVSolution {
  double T = 1.0;
  double L = 1.0;
  std::vector<double> region_values;  // size = shocks.size() + 1
  std::vector<Polyline> shocks;

  // Geometry checks (ordering, domain containment, curve time coverage).
  void validate() const;
  // Every polygonal segment must move at the Rankine-Hugoniot speed of its
  // traces.  Throws RankineHugoniotViolation otherwise.
  void validate_rankine_hugoniot(const model::FluxModel& m,
                                 double tol = 1e-9) const;

  double value_at(double t, double x) const;
  // Exact cell average of u(t, .) over [xl, xr].
  double cell_average(double t, double xl, double xr) const;
};

// Straight single shock x(t) = x0 + s t between two constant states
// (s from Rankine-Hugoniot).
PiecewiseBVSolution single_shock(const model::FluxModel& m, double T, double L,
                                 double u_left, double u_right, double x0 = 0.0);

// Truncated staircase: n bands of value 1/2 + b_i between parallel edges
// with slope -b_i, separated by the background value 1/2.  b must be
// positive and strictly decreasing; b_next is the offset used for the right
// edge of the last band.
PiecewiseBVSolution staircase_solution(double T, double L,
                                       const std::vector<double>& b,
                                       double b_next);

// Exact cell averages at every time node.  Throws DomainMismatch when a
// curve leaves (-L, L).
SpaceTimeField rasterize(const PiecewiseBVSolution& u, const SpaceTimeGrid& g);

// --- negative-order norm and metrics ------------------------------------

// || u ||_{-1, N} = sup { <u, phi> : ||phi_x||_2 = 1, phi in H^1_0(-N,N) },
// computed as ||psi_x||_2 from the Dirichlet solve -psi'' = u on the window.
// Throws WindowTooSmall when fewer than 3 cells lie inside.
double du_norm(std::span<const double> u_cells, const SpaceTimeGrid& g,
               double window_halfwidth);

struct MetricReport {
  double value = 0.0;
  double truncation_error = 0.0;  // tail bound of the dyadic sum
};

// d_U: dyadic combination of windowed dual norms of the difference a - b.
MetricReport dist_U(std::span<const double> a, std::span<const double> b,
                    const SpaceTimeGrid& g);
// d_scrU: sup over time nodes of d_U.
MetricReport dist_scrU(const SpaceTimeField& a, const SpaceTimeField& b);
// d_X: dyadic L^1 part plus d_scrU.
MetricReport dist_X(const SpaceTimeField& a, const SpaceTimeField& b);

// Box filter of half-width m cells (kernel width 2m+1), constant extension.
std::vector<double> box_mollify(std::span<const double> u, int m);

// --- serialization -------------------------------------------------------

// CSV: header "t,x,u", one row per node, 17 significant digits, LF endings.
void write_csv(const SpaceTimeField& f, const std::string& path);
SpaceTimeField read_csv(const std::string& path);

// Flat binary: int64 nt, int64 nx, double T, double L (little endian),
// then (nt+1)*nx doubles, row-major in time.
void write_binary(const SpaceTimeField& f, const std::string& path);
SpaceTimeField read_binary(const std::string& path);

}  // namespace sclab::grid
