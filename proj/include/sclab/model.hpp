#pragma once

// Flux/diffusion/conductivity models on the state interval [0,1], entropy
// machinery derived from them, and the relaxation functional R over mean-
// constrained probability measures on state space.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sclab/errors.hpp"
#include "sclab/numerics.hpp"

namespace sclab::model {

using ScalarFn = std::function<double(double)>;

struct CriticalPoint {
  double v;
  double fv;
};

// A scalar conservation-law model: flux f, diffusion coefficient D (uniformly
// positive) and conductivity sigma (positive in the open interval, may vanish
// at the endpoints).  finalize() derives the cached quantities every consumer
// relies on; the factory functions below call it for you.
struct FluxModel {
  std::string name;
  ScalarFn f;
  ScalarFn f_prime;
  ScalarFn D;
  ScalarFn sigma;

  double lipschitz_f = 0.0;                 // max |f'| on [0,1]
  double min_D = 0.0, max_D = 0.0;          // range of D on [0,1]
  double max_sigma = 0.0;                   // max sigma on [0,1]
  double max_abs_dsigma = 0.0;              // max |sigma'| (finite differences)
  std::vector<CriticalPoint> critical_points;  // interior sign changes of f'

  void finalize(int n_scan = 4096);

  // Exact range of f over the closed interval between a and b, using the
  // critical-point table.  Basis of the Godunov flux and of the envelope
  // sanity checks.
  double min_f_between(double a, double b) const;
  double max_f_between(double a, double b) const;
};

// --- factories ---------------------------------------------------------

FluxModel make_model(std::string name, ScalarFn f, ScalarFn f_prime, ScalarFn D,
                     ScalarFn sigma);

// f(u) = a u + b.
FluxModel make_linear_model(double a = 1.0, double b = 0.0);
// f(u) = u(1-u), D = sigma = 1.  The workhorse of the test suite.
FluxModel make_quadratic_model();
// f(u) = u(1-u) with sigma = u(1-u)  (flux equals conductivity).
FluxModel make_quadratic_selfcond_model();
// f(u) = 4u^3 - 6u^2 + 3u: strictly increasing with an inflection at 1/2.
FluxModel make_cubic_model();

// Tabulated flux: two-column (v, f) samples with strictly increasing v
// covering [0,1]; piecewise-linear f, derivative by central differences.
FluxModel make_tabulated_model(const std::vector<double>& v,
                               const std::vector<double>& fv);
FluxModel load_tabulated_model(const std::string& path);

// Replaces D and/or sigma of a model (re-finalizes).
FluxModel with_coefficients(FluxModel base, ScalarFn D, ScalarFn sigma,
                            std::string suffix = {});
// f -> f - V*id (moving-frame change); used to make a chosen shock stationary.
FluxModel galilean_shift(const FluxModel& base, double V);

// --- convex/concave envelopes ------------------------------------------

struct Envelopes {
  num::PwLinear lower;  // largest convex minorant of f on [0,1]
  num::PwLinear upper;  // smallest concave majorant
};

// Envelopes from a hull of n_grid+1 samples of f.
Envelopes envelopes(const FluxModel& m, int n_grid = 10000);

// --- entropy pairs and samplers ----------------------------------------

// Entropy eta with flux q, q' = eta' f'.
struct EntropyPair {
  ScalarFn eta;
  ScalarFn eta_prime;
  ScalarFn eta_second;
  ScalarFn q;
};

// Builds q for a given eta by cumulative quadrature (q(0) = 0).
EntropyPair make_entropy_pair(const FluxModel& m, ScalarFn eta,
                              ScalarFn eta_prime, ScalarFn eta_second,
                              int n_nodes = 4096);
// eta = (v - center)^2.
EntropyPair make_quadratic_entropy(const FluxModel& m, double center = 0.5);

// Space-time dependent entropy sampler theta(v; t, x) with its flux
// Q(v;t,x) = int_0^v dw  d_v theta(w;t,x) f'(w).
struct EntropySampler {
  std::function<double(double, double, double)> theta;    // (v, t, x)
  std::function<double(double, double, double)> theta_t;  // explicit d/dt
  std::function<double(double, double, double)> theta_x;  // explicit d/dx
  std::function<double(double, double, double)> Q;
  std::function<double(double, double, double)> Q_t;
  std::function<double(double, double, double)> Q_x;
};

// Compactly supported space-time weight with explicit partials.
struct TestFunction {
  std::function<double(double, double)> phi;    // (t, x)
  std::function<double(double, double)> phi_t;
  std::function<double(double, double)> phi_x;
};

// Product sampler theta = eta(v) * phi(t,x), Q = q(v) * phi(t,x).
EntropySampler make_product_sampler(const EntropyPair& pair,
                                    const TestFunction& phi);

// --- entropy adapted to the Einstein relation  sigma h'' = D -------------

struct EinsteinEntropy {
  EntropyPair pair;   // eta = h, convex by construction (h'' = D/sigma > 0)
  ScalarFn g;         // g' = h' f', g(v0) = 0
  double delta;       // state interval clipped to [delta, 1-delta]
  double v0;
};

// h''(v) = D(v)/sigma(v) with h(v0) = h'(v0) = 0, built by cumulative
// quadrature on a mesh graded toward the clipped endpoints.  Throws
// DegenerateConductivity when sigma <= 0 somewhere inside [delta, 1-delta].
EinsteinEntropy einstein_entropy(const FluxModel& m, double v0 = 0.5,
                                 double delta = 1e-6);

// --- relaxation functional R_{f,sigma} ----------------------------------

struct RSearchOptions {
  int n_grid = 401;      // value grid on [0,1]
  int coarse_stride = 4; // third-point stride for the triple scan
  bool refine = true;    // one local refinement pass around the optimum
};

// R(w, c) = inf { (nu(f) - c)^2 / nu(sigma) : nu in P([0,1]), nu(iota) = w },
// with the convention 0^2/0 = 0, computed by exhaustive search over 2-point
// and mean-constrained 3-point Dirac combinations on a value grid.
// Returns +infinity when no admissible measure carries the deviation.
double r_fsigma(const FluxModel& m, double w, double c,
                const RSearchOptions& opts = {});

// Closed forms used as oracles:
// sigma == s (constant):  R = dist(c, [lower(w), upper(w)])^2 / s.
double r_closed_const_sigma(const Envelopes& env, double w, double c,
                            double s = 1.0);
// sigma == f:  R = 2(|c|-c)            if |c| in [lower(w), upper(w)],
//              (upper(w)-c)^2/upper(w) if |c| > upper(w),
//              (lower(w)-c)^2/lower(w) if |c| < lower(w).
double r_closed_f_equals_sigma(const Envelopes& env, double w, double c);

}  // namespace sclab::model
