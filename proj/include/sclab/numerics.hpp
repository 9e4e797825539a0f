#pragma once

// Small numerical utilities shared across modules: quadrature, 1-d solvers,
// tridiagonal systems, piecewise-linear tables and deterministic formatting.

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "sclab/errors.hpp"

namespace sclab::num {

inline constexpr double inf = std::numeric_limits<double>::infinity();

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;  // accumulated local Richardson estimates
  long evals = 0;
};

// Adaptive Simpson with a global absolute tolerance.  The integrand may have
// kinks; the recursion splits until the local Richardson defect is small.
QuadResult adaptive_simpson(const std::function<double(double)>& fn, double a,
                            double b, double tol = 1e-9, int max_depth = 40);

// Composite Simpson on n uniform panels (n >= 1), no adaptivity.
double composite_simpson(const std::function<double(double)>& fn, double a,
                         double b, int panels);

// Golden-section minimization of a unimodal (here: convex) function.
// Returns {argmin, min value}.
std::pair<double, double> golden_section_min(
    const std::function<double(double)>& fn, double lo, double hi,
    double xtol = 1e-10, int max_iter = 200);

// Bisection for fn(lo) and fn(hi) of opposite sign.  Returns the root.
double bisect(const std::function<double(double)>& fn, double lo, double hi,
              double xtol = 1e-12, int max_iter = 200);

// Solves a tridiagonal system in-place (Thomas algorithm; no pivoting, meant
// for diagonally dominant M-matrices).  `lower[i]` multiplies x[i-1] in row i,
// `upper[i]` multiplies x[i+1].  Result lands in `rhs`.
// Cyclic tridiagonal solve (Sherman-Morrison on top of thomas_solve).
// corner_lo = A[n-1][0], corner_hi = A[0][n-1]; result replaces rhs.
void cyclic_thomas_solve(std::vector<double> lower, std::vector<double> diag,
                         std::vector<double> upper, double corner_lo,
                         double corner_hi, std::vector<double>& rhs);

void thomas_solve(std::vector<double>& lower, std::vector<double>& diag,
                  std::vector<double>& upper, std::vector<double>& rhs);

// Piecewise-linear function given by sorted nodes.
struct PwLinear {
  std::vector<double> xs;
  std::vector<double> ys;

  double operator()(double x) const;
  bool empty() const { return xs.empty(); }
};

// Convex / concave hull profiles of a sampled graph (xs ascending).
// Lower: largest convex minorant through the samples; upper: smallest
// concave majorant.  Both are piecewise linear on hull vertices.
PwLinear lower_convex_hull(const std::vector<double>& xs,
                           const std::vector<double>& ys);
PwLinear upper_concave_hull(const std::vector<double>& xs,
                            const std::vector<double>& ys);

// Cumulative antiderivative table with C^1 (cubic Hermite) evaluation.
// Nodes need not be uniform.  `values[i]` is the antiderivative at nodes[i],
// `slopes[i]` the (exactly known) integrand there.
struct CumulativeTable {
  std::vector<double> nodes;
  std::vector<double> values;
  std::vector<double> slopes;

  double operator()(double x) const;       // Hermite interpolation
  double derivative(double x) const;       // pw-linear interp of slopes
};

// Builds the antiderivative of `fn` over the given (sorted) nodes with value
// 0 at `x0`, using per-interval Simpson with midpoint evaluations.
CumulativeTable cumulative_integral(const std::function<double(double)>& fn,
                                    const std::vector<double>& nodes,
                                    double x0);

// Node ladder on [lo, hi], uniform in the bulk and geometrically refined
// towards both ends (for integrands blowing up at the edges).
std::vector<double> graded_nodes(double lo, double hi, int n_bulk,
                                 int n_edge, double edge_width);

// Formats with 17 significant digits ("%.17g"): round-trip exact, and
// deterministic across runs, which the serialization contract requires.
std::string format_g17(double v);

// Linear least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sclab::num
