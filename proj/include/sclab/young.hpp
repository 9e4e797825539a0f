// Atomic Young measures on a space-time grid: the measure-valued control
// cost, its flux potential, moment-constrained reduction to at most three
// atoms, and the alternating-strip slicing approximation of a two-state
// mixture.
#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sclab/cost.hpp"
#include "sclab/grid.hpp"
#include "sclab/model.hpp"

namespace sclab::young {

// Finite convex combination of Dirac atoms at every grid point: weights
// alpha^a(t,x) >= 0 summing to one, positions u^a(t,x) in [0,1].
struct AtomicYoungMeasure {
  grid::SpaceTimeGrid grid;
  int n_atoms = 0;
  std::vector<grid::SpaceTimeField> weights;    // one field per atom
  std::vector<grid::SpaceTimeField> positions;  // one field per atom

  AtomicYoungMeasure() = default;
  AtomicYoungMeasure(const grid::SpaceTimeGrid& g, int n);

  // Pointwise weight normalization to `tol` and positions in [0,1];
  // throws DomainMismatch on violation.
  void validate(double tol = 1e-12) const;

  double moment_at(const std::function<double(double)>& F, int n,
                   int i) const;
  grid::SpaceTimeField moment(const std::function<double(double)>& F) const;

  // Stacked field blocks, one per atom (weights then positions), each row
  // "t,x,value" with 17-significant-digit round-trip formatting.
  void save_csv(const std::string& path) const;
};

// delta_{u(t,x)}: the one-atom measure carried by a field.
AtomicYoungMeasure dirac_measure(const grid::SpaceTimeField& u);

// Pointwise mixture theta*nu1 + (1-theta)*nu0 (atom lists concatenated).
AtomicYoungMeasure mix_measures(const AtomicYoungMeasure& nu0,
                                const AtomicYoungMeasure& nu1,
                                const grid::SpaceTimeField& theta);

// Interface potential G with mu(iota)_t + mu(f)_x + G_x = 0 exactly in the
// discrete conservation form, normalized by G = 0 at the left boundary.
struct FluxPotential {
  grid::SpaceTimeGrid grid;
  std::vector<double> values;  // nt * (nx+1), per-step interface values

  FluxPotential() = default;
  explicit FluxPotential(const grid::SpaceTimeGrid& g)
      : grid(g),
        values(static_cast<size_t>(g.nt) * (g.nx + 1), 0.0) {}

  double& at(int n, int j) {
    return values[static_cast<size_t>(n) * (grid.nx + 1) + j];
  }
  double at(int n, int j) const {
    return values[static_cast<size_t>(n) * (grid.nx + 1) + j];
  }
};

FluxPotential flux_potential(const model::FluxModel& m,
                             const AtomicYoungMeasure& mu);

// Measure-valued control cost: (1/2) iint G^2 / mu(sigma), with G the flux
// potential above.  Infinite branch and singular-weight handling follow
// cost::dual_energy_from_residuals.
cost::CostReport cost_mv(const model::FluxModel& m,
                         const AtomicYoungMeasure& mu,
                         const cost::CostOptions& opts = {});

// A single-point measure: at most three atoms.
struct AtomicSlice {
  std::vector<double> weights;
  std::vector<double> positions;
};

// Reduces a discrete probability vector `prob` over the value grid `values`
// to at most three atoms matching the moments of (identity, f, sigma) to
// `tol`.  Support triples on the value grid are enumerated and the 3x3
// linear system solved for nonnegative weights; one position is polished
// continuously when the grid itself cannot meet the tolerance.  Throws
// ReductionFailed when no admissible triple exists.
AtomicSlice reduce_to_atoms(const model::FluxModel& m,
                            std::span<const double> values,
                            std::span<const double> prob, double tol = 1e-9);

struct SliceOptions {
  double separation_r = 1e-6;  // pointwise lower bound for nu1(i)-nu0(i)
  double beta_tol = 1e-12;     // bisection tolerance for strip widths
};

struct SliceResult {
  AtomicYoungMeasure mu;  // alternating-strip measure
  FluxPotential G;
  // Curve positions gamma[n][j] at each time node (j = 0 .. 2hk), and strip
  // widths width[n][j] of the nu1-strip anchored at gamma[n][j].
  std::vector<std::vector<double>> gamma;
  std::vector<std::vector<double>> width;
};

// Alternating-strip approximation of the mixture beta*nu1 + (1-beta)*nu0:
// 2hk+1 interface curves started at j/k are transported with the mixture
// velocity (nu1(f)-nu0(f))/(nu1(i)-nu0(i)); a nu1-strip of the balanced
// width is laid down after each curve, with nu1 as far field.  The output
// weights are exact cell-averaged strip occupancies.
SliceResult slice_approximation(const model::FluxModel& m,
                                const AtomicYoungMeasure& nu0,
                                const AtomicYoungMeasure& nu1,
                                const grid::SpaceTimeField& beta, int k, int h,
                                const SliceOptions& opts = {});

}  // namespace sclab::young
