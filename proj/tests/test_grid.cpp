#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include "doctest.h"
#include "sclab/errors.hpp"
#include "sclab/grid.hpp"
#include "sclab/model.hpp"

using namespace sclab;
using grid::SpaceTimeField;
using grid::SpaceTimeGrid;

namespace {

SpaceTimeGrid small_grid(int nx = 64, int nt = 4, double L = 1.0,
                         double T = 1.0) {
  return SpaceTimeGrid{T, L, nx, nt, grid::BoundaryMode::ConstantExtension};
}

}  // namespace

TEST_CASE("grid geometry helpers") {
  const auto g = small_grid(10, 5, 1.0, 2.0);
  CHECK(g.dx() == doctest::Approx(0.2));
  CHECK(g.dt() == doctest::Approx(0.4));
  CHECK(g.x_interface(0) == doctest::Approx(-1.0));
  CHECK(g.x_interface(10) == doctest::Approx(1.0));
  CHECK(g.x_center(0) == doctest::Approx(-0.9));
  CHECK(g.t_node(5) == doctest::Approx(2.0));
  CHECK(g.same_layout(small_grid(10, 5, 1.0, 2.0)));
  CHECK_FALSE(g.same_layout(small_grid(11, 5, 1.0, 2.0)));
  CHECK_THROWS_AS(g.require_same_layout(small_grid(10, 6, 1.0, 2.0)),
                  GridMismatch);
}

TEST_CASE("field sampling and range check") {
  const auto g = small_grid(16, 2);
  auto f = grid::sample_initial(g, [](double x) { return 0.5 + 0.25 * x; });
  CHECK(f.at(0, 0) == doctest::Approx(0.5 + 0.25 * g.x_center(0)));
  CHECK(f.at(2, 7) == f.at(0, 7));  // initial data copied to every slice

  auto h = grid::sample_field(
      g, [](double t, double x) { return 0.25 * (1.0 + t) + 0.1 * x; });
  CHECK(h.at(1, 3) ==
        doctest::Approx(0.25 * (1.0 + g.t_node(1)) + 0.1 * g.x_center(3)));

  CHECK_NOTHROW(f.check_range());
  f.at(1, 1) = 1.5;
  CHECK_THROWS_AS(f.check_range(), DomainMismatch);
  f.at(1, 1) = -0.2;
  CHECK_THROWS_AS(f.check_range(), DomainMismatch);
}

TEST_CASE("polyline position and slope") {
  grid::Polyline p{{0.0, 0.5, 1.0}, {0.0, 0.25, 0.25}};
  CHECK(p.position(0.0) == doctest::Approx(0.0));
  CHECK(p.position(0.25) == doctest::Approx(0.125));
  CHECK(p.position(0.75) == doctest::Approx(0.25));
  CHECK(p.slope(0.2) == doctest::Approx(0.5));
  CHECK(p.slope(0.8) == doctest::Approx(0.0));
  const double sv = p.slope(0.5);  // one-sided at the vertex
  CHECK((sv == doctest::Approx(0.5) || sv == doctest::Approx(0.0)));
}

TEST_CASE("single shock solution and Rankine-Hugoniot check") {
  const auto m = model::make_quadratic_model();
  // f(0.6)=0.24, f(0.2)=0.16 -> speed 0.2
  const auto u = grid::single_shock(m, 1.0, 1.0, 0.6, 0.2, -0.1);
  CHECK_NOTHROW(u.validate());
  CHECK_NOTHROW(u.validate_rankine_hugoniot(m));
  REQUIRE(u.shocks.size() == 1);
  CHECK(u.shocks[0].position(0.5) == doctest::Approx(-0.1 + 0.2 * 0.5));
  CHECK(u.value_at(0.5, -0.5) == doctest::Approx(0.6));
  CHECK(u.value_at(0.5, 0.5) == doctest::Approx(0.2));

  // averaging across the shock weights the two traces by the split cell
  const double xc = u.shocks[0].position(0.25);
  CHECK(u.cell_average(0.25, xc - 0.1, xc + 0.3) ==
        doctest::Approx((0.6 * 0.1 + 0.2 * 0.3) / 0.4));

  // a curve with the wrong slope must be rejected
  auto bad = u;
  bad.shocks[0].x[1] += 0.05;
  CHECK_THROWS_AS(bad.validate_rankine_hugoniot(m), RankineHugoniotViolation);

  // crossing curves must be rejected by the geometry check
  grid::PiecewiseBVSolution crossed;
  crossed.T = 1.0;
  crossed.L = 1.0;
  crossed.region_values = {0.1, 0.5, 0.9};
  crossed.shocks.push_back(grid::Polyline{{0.0, 1.0}, {-0.2, 0.4}});
  crossed.shocks.push_back(grid::Polyline{{0.0, 1.0}, {0.2, -0.4}});
  CHECK_THROWS(crossed.validate());
}

TEST_CASE("staircase solution geometry") {
  const std::vector<double> b{0.4, 0.2, 0.4 / 3.0};
  const auto u = grid::staircase_solution(1.0, 1.0, b, 0.4 / 6.0);
  CHECK_NOTHROW(u.validate());
  // every edge of every band moves at the Rankine-Hugoniot speed -b_i of
  // the quadratic flux
  CHECK_NOTHROW(u.validate_rankine_hugoniot(model::make_quadratic_model()));
  REQUIRE(u.shocks.size() == 2 * b.size());
  REQUIRE(u.region_values.size() == 2 * b.size() + 1);
  CHECK(u.region_values.front() == doctest::Approx(0.5));
  CHECK(u.region_values.back() == doctest::Approx(0.5));
  CHECK(u.region_values[1] == doctest::Approx(0.9));
  CHECK(u.region_values[3] == doctest::Approx(0.7));
  for (size_t i = 0; i < b.size(); ++i) {
    CHECK(u.shocks[2 * i].slope(0.5) == doctest::Approx(-b[i]));
    CHECK(u.shocks[2 * i + 1].slope(0.5) == doctest::Approx(-b[i]));
  }
  CHECK(u.value_at(0.0, -0.9) == doctest::Approx(0.5));
  CHECK(u.value_at(0.0, 0.9) == doctest::Approx(0.5));

  CHECK_THROWS_AS(grid::staircase_solution(1.0, 1.0, {0.6}, 0.1),
                  DomainMismatch);
  CHECK_THROWS(grid::staircase_solution(1.0, 1.0, {0.4, 0.4}, 0.1));
  CHECK_THROWS(grid::staircase_solution(1.0, 1.0, {0.4}, 0.5));
}

TEST_CASE("rasterization produces exact cell averages") {
  const auto m = model::make_quadratic_model();
  const auto u = grid::single_shock(m, 1.0, 1.0, 0.6, 0.2, -0.05);
  const auto g = small_grid(32, 4);
  const auto f = grid::rasterize(u, g);
  for (int n = 0; n <= g.nt; ++n) {
    for (int i = 0; i < g.nx; ++i) {
      CHECK(f.at(n, i) == doctest::Approx(u.cell_average(
                              g.t_node(n), g.x_interface(i),
                              g.x_interface(i + 1))).epsilon(1e-14));
    }
  }
  // mass of the rasterized field matches the exact integral of the solution
  double mass = 0.0;
  for (int i = 0; i < g.nx; ++i) mass += f.at(2, i) * g.dx();
  const double xc = u.shocks[0].position(g.t_node(2));
  CHECK(mass == doctest::Approx(0.6 * (xc + 1.0) + 0.2 * (1.0 - xc))
                    .epsilon(1e-13));

  // a shock running off the domain is rejected at construction
  CHECK_THROWS_AS(grid::single_shock(m, 1.0, 1.0, 0.6, 0.2, 0.95),
                  DomainMismatch);

  // mismatched domains are grid errors
  CHECK_THROWS_AS(grid::rasterize(u, small_grid(32, 4, 2.0, 1.0)),
                  GridMismatch);
}

TEST_CASE("dual norm: analytic sine oracle and basic properties") {
  const auto g = small_grid(800, 1);
  const double L = g.L;
  std::vector<double> u(g.nx);
  for (int i = 0; i < g.nx; ++i)
    u[static_cast<size_t>(i)] = std::sin(M_PI * g.x_center(i) / L);
  // -psi'' = sin(pi x / L) with psi(+-L) = 0 gives psi = (L/pi)^2 sin(pi x/L)
  // and || psi_x ||_2 = (L/pi) sqrt(L).
  const double expected = (L / M_PI) * std::sqrt(L);
  CHECK(grid::du_norm(u, g, L) == doctest::Approx(expected).epsilon(2e-3));

  // positive homogeneity (the Poisson solve is linear)
  std::vector<double> u2 = u;
  for (auto& v : u2) v *= 3.0;
  CHECK(grid::du_norm(u2, g, L) ==
        doctest::Approx(3.0 * grid::du_norm(u, g, L)).epsilon(1e-12));

  // data supported outside the window contributes nothing
  std::vector<double> far(g.nx, 0.0);
  for (int i = 0; i < g.nx; ++i)
    if (std::abs(g.x_center(i)) > 0.9) far[static_cast<size_t>(i)] = 1.0;
  CHECK(grid::du_norm(far, g, 0.5) == doctest::Approx(0.0));

  CHECK_THROWS_AS(grid::du_norm(u, g, 2.0), DomainMismatch);
  CHECK_THROWS_AS(grid::du_norm(u, g, 1e-4), WindowTooSmall);
  std::vector<double> wrong(g.nx + 1, 0.0);
  CHECK_THROWS_AS(grid::du_norm(wrong, g, 0.5), GridMismatch);
}

TEST_CASE("dist_U is a bounded metric on slices") {
  const auto g = small_grid(256, 1, 2.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::vector<double> a(g.nx), b(g.nx), c(g.nx);
  for (int i = 0; i < g.nx; ++i) {
    a[static_cast<size_t>(i)] = ud(rng);
    b[static_cast<size_t>(i)] = ud(rng);
    c[static_cast<size_t>(i)] = ud(rng);
  }
  const auto dab = grid::dist_U(a, b, g);
  const auto dba = grid::dist_U(b, a, g);
  const auto daa = grid::dist_U(a, a, g);
  const auto dac = grid::dist_U(a, c, g);
  const auto dcb = grid::dist_U(c, b, g);
  CHECK(daa.value == doctest::Approx(0.0));
  CHECK(dab.value == doctest::Approx(dba.value).epsilon(1e-14));
  CHECK(dab.value > 0.0);
  CHECK(dab.value < 1.0);  // dyadic weights and the bounded wrap cap it
  CHECK(dab.value <= dac.value + dcb.value + 1e-12);
  CHECK(dab.truncation_error == doctest::Approx(std::pow(2.0, -2.0)));
}

TEST_CASE("dist_scrU takes the worst slice and dist_X adds the L1 part") {
  const auto g = small_grid(128, 4, 1.0);
  SpaceTimeField a(g), b(g);
  // put a bump difference only in slice 3
  for (int i = 40; i < 60; ++i) b.at(3, i) = 0.2;
  const auto ds = grid::dist_scrU(a, b);
  const auto d3 = grid::dist_U(a.slice(3), b.slice(3), g);
  CHECK(ds.value == doctest::Approx(d3.value));

  // constant difference: the L1 term of dist_X is (1/2) * |c| * 2L * T
  SpaceTimeField c1(g), c2(g);
  for (auto& v : c2.values) v = 0.25;
  const auto dx_rep = grid::dist_X(c1, c2);
  const auto ds_rep = grid::dist_scrU(c1, c2);
  CHECK(dx_rep.value - ds_rep.value ==
        doctest::Approx(0.5 * 0.25 * 2.0 * 1.0).epsilon(1e-12));

  SpaceTimeField other(small_grid(64, 4, 1.0));
  CHECK_THROWS_AS(grid::dist_scrU(a, other), GridMismatch);
}

TEST_CASE("box mollifier") {
  std::vector<double> ramp(21);
  for (int i = 0; i < 21; ++i) ramp[static_cast<size_t>(i)] = 0.1 * i;
  const auto out = grid::box_mollify(ramp, 2);
  // symmetric window on linear data returns the center value (interior)
  for (int i = 2; i < 19; ++i)
    CHECK(out[static_cast<size_t>(i)] == doctest::Approx(ramp[static_cast<size_t>(i)]));
  // constant extension pulls the edges toward the boundary value
  CHECK(out[0] == doctest::Approx((0.0 + 0.0 + 0.0 + 0.1 + 0.2) / 5.0));
  // m = 0 is the identity
  const auto same = grid::box_mollify(ramp, 0);
  CHECK(same == ramp);
}

TEST_CASE("CSV and binary round trips") {
  const auto g = small_grid(12, 3, 1.5, 0.75);
  auto f = grid::sample_field(g, [](double t, double x) {
    return 0.5 + 0.3 * std::sin(3.0 * x + t);
  });
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path();
  const auto csv = (dir / "sclab_rt.csv").string();
  const auto bin = (dir / "sclab_rt.bin").string();

  grid::write_csv(f, csv);
  const auto f2 = grid::read_csv(csv);
  REQUIRE(f2.grid.same_layout(f.grid));
  for (size_t i = 0; i < f.values.size(); ++i)
    CHECK(f2.values[i] == f.values[i]);  // 17 digits round-trip exactly

  grid::write_binary(f, bin);
  const auto f3 = grid::read_binary(bin);
  REQUIRE(f3.grid.same_layout(f.grid));
  CHECK(f3.values == f.values);

  fs::remove(csv);
  fs::remove(bin);
}
