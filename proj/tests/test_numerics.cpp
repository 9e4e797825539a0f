#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include "doctest.h"
#include "sclab/numerics.hpp"

using namespace sclab;

TEST_CASE("adaptive simpson integrates smooth and kinked integrands") {
  auto r1 = num::adaptive_simpson([](double x) { return x * x; }, 0.0, 1.0);
  CHECK(r1.value == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  auto r2 = num::adaptive_simpson([](double x) { return std::sin(x); }, 0.0,
                                  std::acos(-1.0));
  CHECK(std::abs(r2.value - 2.0) <= 1e-9);
  CHECK(r2.evals > 0);

  // |x - 1/3| has a kink; exact integral on [0,1] is 5/18.
  auto r3 = num::adaptive_simpson(
      [](double x) { return std::abs(x - 1.0 / 3.0); }, 0.0, 1.0, 1e-10);
  CHECK(std::abs(r3.value - 5.0 / 18.0) <= 1e-9);
  CHECK(r3.error_estimate >= 0.0);
}

TEST_CASE("composite simpson is exact on cubics") {
  auto cubic = [](double x) { return 2.0 * x * x * x - x + 0.5; };
  // antiderivative: x^4/2 - x^2/2 + x/2 on [0,2]: 8 - 2 + 1 = 7
  CHECK(num::composite_simpson(cubic, 0.0, 2.0, 1) ==
        doctest::Approx(7.0).epsilon(1e-14));
  CHECK(num::composite_simpson(cubic, 0.0, 2.0, 7) ==
        doctest::Approx(7.0).epsilon(1e-14));
}

TEST_CASE("golden section finds the minimum of a convex function") {
  // xtol bounds the bracket, so the argmin is accurate to ~xtol * span
  auto [x, fx] = num::golden_section_min(
      [](double t) { return (t - 0.3) * (t - 0.3) + 1.0; }, -2.0, 5.0);
  CHECK(std::abs(x - 0.3) <= 1e-7);
  CHECK(fx == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bisection solves cos x = 0") {
  double root = num::bisect([](double x) { return std::cos(x); }, 0.0, 2.0);
  CHECK(std::abs(root - std::acos(-1.0) / 2.0) <= 1e-11);
}

TEST_CASE("thomas solver matches direct residual check") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> uni(0.1, 1.0);
  const int n = 12;
  std::vector<double> lower(n), diag(n), upper(n), rhs(n), b(n);
  for (int i = 0; i < n; ++i) {
    lower[i] = i == 0 ? 0.0 : -uni(rng);
    upper[i] = i == n - 1 ? 0.0 : -uni(rng);
    diag[i] = 3.0 + uni(rng);
    b[i] = rhs[i] = uni(rng);
  }
  auto l = lower, d = diag, u = upper;
  num::thomas_solve(l, d, u, rhs);  // solution lands in rhs
  for (int i = 0; i < n; ++i) {
    double ax = diag[i] * rhs[i];
    if (i > 0) ax += lower[i] * rhs[i - 1];
    if (i < n - 1) ax += upper[i] * rhs[i + 1];
    CHECK(std::abs(ax - b[i]) <= 1e-12);
  }
}

TEST_CASE("cyclic thomas solver matches direct residual check") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> uni(0.1, 1.0);
  const int n = 9;
  std::vector<double> lower(n), diag(n), upper(n), rhs(n), b(n);
  for (int i = 0; i < n; ++i) {
    lower[i] = -uni(rng);
    upper[i] = -uni(rng);
    diag[i] = 4.0 + uni(rng);
    b[i] = rhs[i] = uni(rng) - 0.5;
  }
  const double clo = -uni(rng), chi = -uni(rng);
  num::cyclic_thomas_solve(lower, diag, upper, clo, chi, rhs);
  // A = tridiag(lower, diag, upper) + corners A[0][n-1]=chi, A[n-1][0]=clo
  for (int i = 0; i < n; ++i) {
    double ax = diag[i] * rhs[i];
    if (i > 0) ax += lower[i] * rhs[i - 1];
    if (i < n - 1) ax += upper[i] * rhs[i + 1];
    if (i == 0) ax += chi * rhs[n - 1];
    if (i == n - 1) ax += clo * rhs[0];
    CHECK(std::abs(ax - b[i]) <= 1e-12);
  }
}

TEST_CASE("piecewise linear table interpolates and extends constantly") {
  num::PwLinear f{{0.0, 1.0, 3.0}, {2.0, 4.0, 0.0}};
  CHECK(f(0.0) == doctest::Approx(2.0));
  CHECK(f(0.5) == doctest::Approx(3.0));
  CHECK(f(2.0) == doctest::Approx(2.0));
  CHECK(f(-5.0) == doctest::Approx(2.0));  // constant extension
  CHECK(f(9.0) == doctest::Approx(0.0));
  CHECK_FALSE(f.empty());
}

namespace {
// Brute-force hull admissibility: minorant/majorant and touching.
void check_hull(const std::vector<double>& xs, const std::vector<double>& ys,
                const num::PwLinear& hull, bool lower) {
  double max_gap = num::inf;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double h = hull(xs[i]);
    if (lower)
      CHECK(h <= ys[i] + 1e-12);
    else
      CHECK(h >= ys[i] - 1e-12);
    max_gap = std::min(max_gap, std::abs(h - ys[i]));
  }
  CHECK(max_gap <= 1e-12);  // touches the graph somewhere
  // convexity / concavity of the vertex chain
  for (std::size_t i = 1; i + 1 < hull.xs.size(); ++i) {
    const double sl =
        (hull.ys[i] - hull.ys[i - 1]) / (hull.xs[i] - hull.xs[i - 1]);
    const double sr =
        (hull.ys[i + 1] - hull.ys[i]) / (hull.xs[i + 1] - hull.xs[i]);
    if (lower)
      CHECK(sl <= sr + 1e-12);
    else
      CHECK(sl >= sr - 1e-12);
  }
}
}  // namespace

TEST_CASE("hull profiles are admissible on random samples") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 40);
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
      xs[i] = static_cast<double>(i) / (n - 1);
      ys[i] = uni(rng);
    }
    check_hull(xs, ys, num::lower_convex_hull(xs, ys), true);
    check_hull(xs, ys, num::upper_concave_hull(xs, ys), false);
  }
}

TEST_CASE("hull of a convex sample set is the sample chain") {
  std::vector<double> xs, ys;
  for (int i = 0; i <= 10; ++i) {
    xs.push_back(0.1 * i);
    ys.push_back((0.1 * i - 0.4) * (0.1 * i - 0.4));
  }
  auto hull = num::lower_convex_hull(xs, ys);
  for (int i = 0; i <= 10; ++i)
    CHECK(hull(xs[i]) == doctest::Approx(ys[i]).epsilon(1e-13));
}

TEST_CASE("cumulative integral table reproduces antiderivatives") {
  std::vector<double> nodes;
  for (int i = 0; i <= 50; ++i) nodes.push_back(-1.0 + 0.04 * i);
  auto table = num::cumulative_integral(
      [](double x) { return 3.0 * x * x; }, nodes, 0.0);
  CHECK(table(0.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(table(1.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(table(-1.0) == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(table(0.57) == doctest::Approx(0.57 * 0.57 * 0.57).epsilon(1e-8));
  // slopes are interpolated piecewise-linearly and exact at the nodes
  CHECK(table.derivative(0.48) ==
        doctest::Approx(3.0 * 0.48 * 0.48).epsilon(1e-12));
  CHECK(table.derivative(0.5) == doctest::Approx(0.75).epsilon(3e-3));
}

TEST_CASE("graded nodes are sorted, cover the interval and refine edges") {
  auto nodes = num::graded_nodes(0.0, 1.0, 32, 8, 0.05);
  REQUIRE(nodes.size() >= 2);
  CHECK(nodes.front() == doctest::Approx(0.0));
  CHECK(nodes.back() == doctest::Approx(1.0));
  CHECK(std::is_sorted(nodes.begin(), nodes.end()));
  // first interior gap is much smaller than the bulk gap
  const double first_gap = nodes[1] - nodes[0];
  double bulk_gap = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i)
    bulk_gap = std::max(bulk_gap, nodes[i] - nodes[i - 1]);
  CHECK(first_gap < 0.25 * bulk_gap);
}

TEST_CASE("g17 formatting round-trips exactly") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 1e300, 0.0, -0.036,
                   0.012395061728395064}) {
    const std::string s = num::format_g17(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("least-squares slope recovers an exact line") {
  std::vector<double> x = {1.0, 2.0, 5.0, 7.0};
  std::vector<double> y;
  for (double xi : x) y.push_back(-2.0 * xi + 0.7);
  CHECK(num::fit_slope(x, y) == doctest::Approx(-2.0).epsilon(1e-13));
}
