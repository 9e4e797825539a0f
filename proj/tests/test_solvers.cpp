#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "sclab/errors.hpp"
#include "sclab/grid.hpp"
#include "sclab/model.hpp"
#include "sclab/solvers.hpp"

using namespace sclab;
using grid::SpaceTimeField;
using grid::SpaceTimeGrid;

namespace {

SpaceTimeGrid make_grid(int nx, int nt, double L = 1.0, double T = 0.5,
                        grid::BoundaryMode b =
                            grid::BoundaryMode::ConstantExtension) {
  return SpaceTimeGrid{T, L, nx, nt, b};
}

std::vector<double> riemann_data(const SpaceTimeGrid& g, double ul, double ur,
                                 double x0 = 0.0) {
  std::vector<double> u0(static_cast<size_t>(g.nx));
  for (int i = 0; i < g.nx; ++i)
    u0[static_cast<size_t>(i)] = g.x_center(i) < x0 ? ul : ur;
  return u0;
}

}  // namespace

TEST_CASE("interface fluxes agree with the exact Riemann values") {
  const auto m = model::make_quadratic_model();
  // monotone data: both fluxes reduce to upwinding
  CHECK(solvers::godunov_flux(m, 0.2, 0.2) == doctest::Approx(0.16));
  // spanning the maximum at 1/2: Godunov takes the max for ul > ur
  CHECK(solvers::godunov_flux(m, 0.8, 0.2) == doctest::Approx(0.25));
  // rarefaction-ordered data through the sonic point takes the min
  CHECK(solvers::godunov_flux(m, 0.2, 0.8) == doctest::Approx(0.16));
  // strictly increasing region: left value decides
  CHECK(solvers::godunov_flux(m, 0.1, 0.3) == doctest::Approx(m.f(0.1)));

  // Engquist-Osher on the quadratic: f(0)+int_0^ul (f')^+ + int_0^ur (f')^-
  // = f(min(ul,1/2)) + f(max(ur,1/2)) - f(1/2)
  auto eo_exact = [&](double ul, double ur) {
    return m.f(std::min(ul, 0.5)) + m.f(std::max(ur, 0.5)) - 0.25;
  };
  for (double ul : {0.1, 0.45, 0.8})
    for (double ur : {0.0, 0.55, 0.95})
      CHECK(solvers::engquist_osher_flux(m, ul, ur) ==
            doctest::Approx(eo_exact(ul, ur)).epsilon(1e-12));

  // both are consistent: F(u,u) = f(u)
  for (double u : {0.0, 0.3, 0.5, 0.7, 1.0}) {
    CHECK(solvers::godunov_flux(m, u, u) == doctest::Approx(m.f(u)));
    CHECK(solvers::engquist_osher_flux(m, u, u) == doctest::Approx(m.f(u)));
  }

  // non-convex cubic: Godunov still returns the exact interval extremum
  const auto cub = model::make_cubic_model();
  CHECK(solvers::godunov_flux(cub, 0.9, 0.1) ==
        doctest::Approx(cub.max_f_between(0.1, 0.9)));
  CHECK(solvers::godunov_flux(cub, 0.1, 0.9) ==
        doctest::Approx(cub.min_f_between(0.1, 0.9)));
  CHECK(solvers::numerical_flux(cub, solvers::Scheme::Godunov, 0.3, 0.6) ==
        doctest::Approx(solvers::godunov_flux(cub, 0.3, 0.6)));
}

TEST_CASE("entropic solver resolves shocks and rarefactions") {
  const auto m = model::make_quadratic_model();
  const auto g = make_grid(400, 400);

  SUBCASE("steady entropic shock stays put") {
    // concave flux: the jump 0.2 -> 0.8 is entropic and has zero speed
    const auto u = solvers::solve_entropic(m, g, riemann_data(g, 0.2, 0.8));
    const auto exact = grid::rasterize(
        grid::single_shock(m, g.T, g.L, 0.2, 0.8, 0.0), g);
    const auto d = grid::dist_scrU(u, exact);
    CHECK(d.value < 5e-3);
    // mass is conserved exactly (equal boundary fluxes f(0.2)=f(0.8))
    CHECK(solvers::slice_mass(u, g.nt) ==
          doctest::Approx(solvers::slice_mass(u, 0)).epsilon(1e-13));
  }

  SUBCASE("anti-entropic data opens a rarefaction fan") {
    const auto u = solvers::solve_entropic(m, g, riemann_data(g, 0.8, 0.2));
    // self-similar fan: u(t, x) = (1 - x/t)/2 between the edges x = +-0.6 t
    const double t = g.T;
    int checked = 0;
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.x_center(i);
      if (std::abs(x) < 0.5 * t) {
        CHECK(u.at(g.nt, i) ==
              doctest::Approx(0.5 * (1.0 - x / t)).epsilon(0.06));
        ++checked;
      }
    }
    CHECK(checked > 50);
    CHECK(u.at(g.nt, 5) == doctest::Approx(0.8).epsilon(1e-6));
    CHECK(u.at(g.nt, g.nx - 5) == doctest::Approx(0.2).epsilon(1e-6));
  }

  SUBCASE("moving shock tracks the Rankine-Hugoniot speed") {
    const auto u = solvers::solve_entropic(m, g, riemann_data(g, 0.1, 0.5));
    // s = (f(0.5)-f(0.1))/(0.5-0.1) = (0.25-0.09)/0.4 = 0.4
    const auto exact = grid::rasterize(
        grid::single_shock(m, g.T, g.L, 0.1, 0.5, 0.0), g);
    CHECK(grid::dist_scrU(u, exact).value < 5e-3);
  }

  SUBCASE("CFL guard rejects an infeasible step count") {
    const auto coarse = make_grid(400, 20);
    CHECK_THROWS_AS(
        solvers::solve_entropic(m, coarse, riemann_data(coarse, 0.2, 0.8)),
        CflViolation);
  }
}

TEST_CASE("viscous solver") {
  const auto m = model::make_quadratic_model();
  const auto g = make_grid(200, 200);
  const double eps = 0.05;

  SUBCASE("semi-implicit stepping is stable and conserves mass") {
    const auto u = solvers::solve_viscous(m, g, riemann_data(g, 0.2, 0.8), eps);
    CHECK_NOTHROW(u.check_range(1e-9));
    CHECK(solvers::slice_mass(u, g.nt) ==
          doctest::Approx(solvers::slice_mass(u, 0)).epsilon(1e-12));
    // the viscous profile smooths the jump monotonically
    for (int i = 1; i < g.nx; ++i)
      CHECK(u.at(g.nt, i) >= u.at(g.nt, i - 1) - 1e-10);
  }

  SUBCASE("explicit stepping agrees with semi-implicit") {
    solvers::SolverConfig ex;
    ex.stepping = solvers::Stepping::Explicit;
    const auto ge = make_grid(100, 1200);
    const auto a = solvers::solve_viscous(m, ge, riemann_data(ge, 0.2, 0.8),
                                          eps, solvers::Direction::Forward, ex);
    const auto b = solvers::solve_viscous(m, ge, riemann_data(ge, 0.2, 0.8),
                                          eps, solvers::Direction::Forward);
    double worst = 0.0;
    for (int i = 0; i < ge.nx; ++i)
      worst = std::max(worst, std::abs(a.at(ge.nt, i) - b.at(ge.nt, i)));
    CHECK(worst < 2e-3);
  }

  SUBCASE("backward direction is the reflected forward solve") {
    std::vector<double> data(static_cast<size_t>(g.nx));
    for (int i = 0; i < g.nx; ++i)
      data[static_cast<size_t>(i)] =
          0.5 + 0.3 * std::tanh(5.0 * g.x_center(i));
    const auto back = solvers::solve_viscous(m, g, data, eps,
                                             solvers::Direction::Backward);
    // the supplied data sits in the final slice
    for (int i = 0; i < g.nx; ++i)
      CHECK(back.at(g.nt, i) == doctest::Approx(data[static_cast<size_t>(i)]));

    // reflected data solved forward, then reflected back, is identical
    std::vector<double> refl(static_cast<size_t>(g.nx));
    for (int i = 0; i < g.nx; ++i)
      refl[static_cast<size_t>(i)] = data[static_cast<size_t>(g.nx - 1 - i)];
    const auto fwd = solvers::solve_viscous(m, g, refl, eps,
                                            solvers::Direction::Forward);
    for (int n = 0; n <= g.nt; ++n)
      for (int i = 0; i < g.nx; ++i)
        CHECK(back.at(n, i) == fwd.at(g.nt - n, g.nx - 1 - i));
  }
}

TEST_CASE("controlled solver") {
  const auto m = model::make_quadratic_model();
  const auto g = make_grid(128, 128);
  const double eps = 0.04;

  SUBCASE("zero control reproduces the viscous solve") {
    solvers::ControlField E(g);
    const auto a = solvers::solve_controlled(m, g, riemann_data(g, 0.2, 0.8),
                                             eps, E);
    const auto b = solvers::solve_viscous(m, g, riemann_data(g, 0.2, 0.8), eps);
    CHECK(a.values == b.values);
    CHECK(E.energy == doctest::Approx(0.0));
  }

  SUBCASE("interior control moves mass and accumulates energy") {
    solvers::ControlField E(g);
    for (int n = 0; n < g.nt; ++n)
      for (int j = 1; j < g.nx; ++j)
        E.at(n, j) = 0.05 * std::sin(M_PI * g.x_interface(j) / g.L);
    const auto u0 = riemann_data(g, 0.4, 0.4);
    const auto u = solvers::solve_controlled(m, g, u0, eps, E);
    CHECK(E.energy > 0.0);
    // energy matches its definition on the computed trajectory
    double acc = 0.0;
    for (int n = 0; n < g.nt; ++n) {
      for (int j = 1; j < g.nx; ++j) {
        const double mean = 0.5 * (u.at(n, j - 1) + u.at(n, j));
        acc += 0.5 * m.sigma(mean) * E.at(n, j) * E.at(n, j) * g.dx() * g.dt();
      }
    }
    CHECK(E.energy == doctest::Approx(acc).epsilon(1e-12));
    // discrete conservation: mass change is exactly the advective boundary
    // flux imbalance (constant-extension boundaries carry f(u) at the edge
    // cells; the diffusive and control boundary fluxes vanish)
    double boundary_flux = 0.0;
    for (int n = 0; n < g.nt; ++n)
      boundary_flux +=
          g.dt() * (m.f(u.at(n, g.nx - 1)) - m.f(u.at(n, 0)));
    CHECK(solvers::slice_mass(u, g.nt) ==
          doctest::Approx(solvers::slice_mass(u, 0) - boundary_flux)
              .epsilon(1e-12));
  }

  SUBCASE("non-finite control is rejected") {
    solvers::ControlField E(g);
    E.at(0, 3) = std::nan("");
    CHECK_THROWS_AS(E.check_finite(), NonfiniteValue);
    CHECK_THROWS_AS(
        solvers::solve_controlled(m, g, riemann_data(g, 0.3, 0.3), eps, E),
        NonfiniteValue);
  }
}

TEST_CASE("periodic boundary mode transports mass around the torus") {
  const auto m = model::make_quadratic_model();
  const auto g = make_grid(256, 512, 1.0, 1.0, grid::BoundaryMode::Periodic);
  std::vector<double> u0(static_cast<size_t>(g.nx));
  for (int i = 0; i < g.nx; ++i)
    u0[static_cast<size_t>(i)] =
        0.5 + 0.25 * std::sin(M_PI * g.x_center(i) / g.L);
  const auto u = solvers::solve_entropic(m, g, u0);
  // exact mass conservation: the boundary fluxes cancel
  CHECK(solvers::slice_mass(u, g.nt) ==
        doctest::Approx(solvers::slice_mass(u, 0)).epsilon(1e-12));

  const auto v = solvers::solve_viscous(m, g, u0, 0.02);
  CHECK(solvers::slice_mass(v, g.nt) ==
        doctest::Approx(solvers::slice_mass(v, 0)).epsilon(1e-12));
  CHECK_NOTHROW(v.check_range(1e-9));
}

TEST_CASE("solver rejects out-of-range initial data") {
  const auto m = model::make_quadratic_model();
  const auto g = make_grid(64, 64);
  auto u0 = riemann_data(g, 0.2, 0.8);
  u0[10] = 1.7;
  CHECK_THROWS_AS(solvers::solve_entropic(m, g, u0), DomainMismatch);
}
