#include "sclab/hj.hpp"

#include <algorithm>
#include <cmath>

#include "sclab/errors.hpp"
#include "sclab/numerics.hpp"

namespace sclab::hj {

using grid::BoundaryMode;
using grid::SpaceTimeField;
using grid::SpaceTimeGrid;

// ---------------------------------------------------------------------
// HJField
// ---------------------------------------------------------------------

SpaceTimeField HJField::derivative() const {
  SpaceTimeField u(grid);
  const double dx = grid.dx();
  for (int n = 0; n <= grid.nt; ++n)
    for (int i = 0; i < grid.nx; ++i)
      u.at(n, i) = (at(n, i + 1) - at(n, i)) / dx;
  return u;
}

void HJField::validate(double tol) const {
  if (std::abs(at(0, 0)) > 1e-12)
    throw DomainMismatch("potential gauge b(0,-L) = " +
                         num::format_g17(at(0, 0)) + " != 0");
  const double dx = grid.dx();
  for (int n = 0; n <= grid.nt; ++n)
    for (int i = 0; i < grid.nx; ++i) {
      double s = (at(n, i + 1) - at(n, i)) / dx;
      if (s < -tol || s > 1.0 + tol)
        throw DomainMismatch("potential slope " + num::format_g17(s) +
                             " outside [0,1] at node (" + std::to_string(n) +
                             "," + std::to_string(i) + ")");
    }
}

// ---------------------------------------------------------------------
// Interface flux of the viscous dynamics (shared stencils with the cost
// residual: scheme flux on the start slice, theta-weighted harmonic-D
// gradient, zero boundary gradient under constant extension).
// ---------------------------------------------------------------------

namespace {

void interface_phi(const model::FluxModel& m, const SpaceTimeField& u, int n,
                   double eps, const cost::CostOptions& opts,
                   std::vector<double>& phi, std::vector<double>& sigma) {
  const SpaceTimeGrid& g = u.grid;
  const int nx = g.nx;
  const double dx = g.dx();
  const bool periodic = g.boundary == BoundaryMode::Periodic;
  phi.resize(static_cast<std::size_t>(nx) + 1);
  sigma.resize(static_cast<std::size_t>(nx) + 1);
  auto left = [&](int lvl, int j) {
    if (j > 0) return u.at(lvl, j - 1);
    return periodic ? u.at(lvl, nx - 1) : u.at(lvl, 0);
  };
  auto right = [&](int lvl, int j) {
    if (j < nx) return u.at(lvl, j);
    return periodic ? u.at(lvl, 0) : u.at(lvl, nx - 1);
  };
  for (int j = 0; j <= nx; ++j) {
    double ul = left(n, j), ur = right(n, j);
    double F = cost::scheme_flux(m, opts.scheme, ul, ur);
    sigma[static_cast<std::size_t>(j)] = 0.5 * (m.sigma(ul) + m.sigma(ur));
    double G = 0.0;
    if (eps != 0.0 && (periodic || (j > 0 && j < nx))) {
      double a = m.D(ul), b = m.D(ur);
      double Dh = 2.0 * a * b / (a + b);
      double grad_old = (ur - ul) / dx;
      double grad_new = (right(n + 1, j) - left(n + 1, j)) / dx;
      G = Dh * ((1.0 - opts.theta) * grad_old + opts.theta * grad_new);
    }
    phi[static_cast<std::size_t>(j)] = F - 0.5 * eps * G;
  }
}

}  // namespace

HJField from_field(const model::FluxModel& m, const SpaceTimeField& u,
                   double eps, const cost::CostOptions& opts,
                   const solvers::ControlField* control) {
  const SpaceTimeGrid& g = u.grid;
  if (control) g.require_same_layout(control->grid);
  HJField b(g);
  const double dx = g.dx(), dt = g.dt();
  for (int n = 0; n <= g.nt; ++n) {
    double acc = 0.0;
    b.at(n, 0) = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      acc += u.at(n, i) * dx;
      b.at(n, i + 1) = acc;
    }
  }
  // Left-boundary gauge: advance by the interface flux at j = 0 (including
  // the control contribution when the field was produced by the controlled
  // dynamics), then shift the whole slice.
  std::vector<double> phi, sigma;
  double B = 0.0;
  for (int n = 0; n < g.nt; ++n) {
    interface_phi(m, u, n, eps, opts, phi, sigma);
    double drive = phi[0];
    if (control) drive += sigma[0] * control->at(n, 0);
    B -= dt * drive;
    for (int j = 0; j <= g.nx; ++j) b.at(n + 1, j) += B;
  }
  return b;
}

void add_time_ramp(HJField& b, const std::function<double(double)>& gamma) {
  const SpaceTimeGrid& g = b.grid;
  const double dt = g.dt();
  double running = 0.0;
  for (int n = 0; n < g.nt; ++n) {
    running += dt * gamma(g.t_node(n) + 0.5 * dt);
    for (int j = 0; j <= g.nx; ++j) b.at(n + 1, j) += running;
  }
}

// ---------------------------------------------------------------------
// J_eps and its decomposition
// ---------------------------------------------------------------------

namespace {

// Per-step interface residual R_j = (b^{n+1}_j - b^n_j)/dt + Phi_j.
void step_residual(const model::FluxModel& m, const HJField& b,
                   const SpaceTimeField& u, int n, double eps,
                   const cost::CostOptions& opts, std::vector<double>& R,
                   std::vector<double>& sigma) {
  const double dt = b.grid.dt();
  interface_phi(m, u, n, eps, opts, R, sigma);
  for (int j = 0; j <= b.grid.nx; ++j)
    R[static_cast<std::size_t>(j)] += (b.at(n + 1, j) - b.at(n, j)) / dt;
}

}  // namespace

cost::CostReport cost_J_eps(const model::FluxModel& m, const HJField& b,
                            double eps, const cost::CostOptions& opts) {
  const SpaceTimeGrid& g = b.grid;
  const int nx = g.nx;
  const double dx = g.dx(), dt = g.dt();
  SpaceTimeField u = b.derivative();

  cost::CostReport rep;
  double r_l2sq = 0.0, max_abs = 0.0;
  std::vector<double> R, sigma;
  for (int n = 0; n < g.nt; ++n) {
    step_residual(m, b, u, n, eps, opts, R, sigma);
    double acc = 0.0;
    for (int j = 0; j <= nx; ++j) {
      double w = (j == 0 || j == nx) ? 0.5 : 1.0;
      double r = R[static_cast<std::size_t>(j)];
      double s = sigma[static_cast<std::size_t>(j)];
      max_abs = std::max(max_abs, std::abs(r));
      if (s <= opts.sigma_floor) {
        if (std::abs(r) > opts.singular_flux_tol)
          throw SingularWeight("residual " + num::format_g17(r) +
                               " over vanishing sigma at interface " +
                               std::to_string(j) + ", step " +
                               std::to_string(n));
        continue;
      }
      acc += w * 0.5 * r * r / s * dx;
      r_l2sq += w * r * r * dx * dt;
    }
    rep.value += acc * dt;
  }
  rep.residual_l2 = std::sqrt(r_l2sq);
  rep.diagnostics["max_abs_residual"] = max_abs;
  rep.diagnostics["eps"] = eps;
  rep.diagnostics["theta"] = opts.theta;
  return rep;
}

JDecomposition decompose_J(const model::FluxModel& m, const HJField& b,
                           double eps, const cost::CostOptions& opts,
                           double variance_tol) {
  const SpaceTimeGrid& g = b.grid;
  const int nx = g.nx;
  const double dx = g.dx(), dt = g.dt();
  SpaceTimeField u = b.derivative();

  JDecomposition out;
  cost::CostReport irep = cost_I_eps(m, u, eps, opts);
  out.i_part = irep.value;
  out.j_value = cost_J_eps(m, b, eps, opts).value;
  out.gamma.resize(static_cast<std::size_t>(g.nt));

  std::vector<double> R, sigma, W(static_cast<std::size_t>(nx) + 1);
  for (int n = 0; n < g.nt; ++n) {
    step_residual(m, b, u, n, eps, opts, R, sigma);
    // sigma Psi_x = W: the zero-flux potential of the slice residual
    // r_i = (R_{i+1} - R_i)/dx, so W_j = R_0 - R_j up to round-off and
    // gamma_j = R_j + W_j is constant in x.
    W[0] = 0.0;
    for (int i = 0; i < nx; ++i)
      W[static_cast<std::size_t>(i) + 1] =
          W[static_cast<std::size_t>(i)] -
          (R[static_cast<std::size_t>(i) + 1] - R[static_cast<std::size_t>(i)]);
    double mean = 0.0;
    for (int j = 0; j <= nx; ++j)
      mean += R[static_cast<std::size_t>(j)] + W[static_cast<std::size_t>(j)];
    mean /= nx + 1;
    double var = 0.0;
    for (int j = 0; j <= nx; ++j) {
      double d = R[static_cast<std::size_t>(j)] +
                 W[static_cast<std::size_t>(j)] - mean;
      var += d * d;
    }
    var /= nx + 1;
    out.x_variance = std::max(out.x_variance, var);
    out.gamma[static_cast<std::size_t>(n)] = mean;
    double winv = 0.0;
    for (int j = 0; j <= nx; ++j) {
      double w = (j == 0 || j == nx) ? 0.5 : 1.0;
      double s = sigma[static_cast<std::size_t>(j)];
      if (s > opts.sigma_floor) winv += w / s * dx;
    }
    out.gamma_part += 0.5 * mean * mean * winv * dt;
  }
  if (out.x_variance > variance_tol)
    throw DecompositionDefect(
        "time-fiber profile varies in x (variance " +
        num::format_g17(out.x_variance) + "); the discretization of b is "
        "inconsistent with the conservation-law stencils");
  out.cross_term = out.j_value - out.i_part - out.gamma_part;
  return out;
}

std::vector<HjSweepRow> hj_sweep(const model::FluxModel& m,
                                 const std::vector<std::pair<double, HJField>>& family,
                                 const cost::CostOptions& opts) {
  std::vector<HjSweepRow> rows;
  rows.reserve(family.size());
  for (const auto& [eps, b] : family) {
    if (eps <= 0.0) throw Error("hj_sweep: eps must be positive");
    JDecomposition d = decompose_J(m, b, eps, opts);
    rows.push_back({eps, d.j_value, d.j_value / eps, d.i_part, d.gamma_part});
  }
  return rows;
}

}  // namespace sclab::hj
