#include "sclab/solvers.hpp"

#include <algorithm>
#include <cmath>

#include "sclab/errors.hpp"
#include "sclab/numerics.hpp"

namespace sclab::solvers {

double ControlField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

void ControlField::check_finite() const {
  for (double v : values)
    if (!std::isfinite(v))
      throw NonfiniteValue("ControlField holds a non-finite entry");
}

double godunov_flux(const model::FluxModel& m, double ul, double ur) {
  if (ul <= ur) return m.min_f_between(ul, ur);
  return m.max_f_between(ur, ul);
}

double engquist_osher_flux(const model::FluxModel& m, double ul, double ur) {
  // F(a,b) = f(0) + int_0^a (f')^+ + int_0^b (f')^-.  Both integrals are
  // assembled exactly from the monotone pieces of f delimited by the
  // critical points: on a monotone piece [p,q] the positive part
  // contributes max(f(q)-f(p),0) and the negative part min(f(q)-f(p),0).
  auto split = [&](double a, bool positive_part) {
    double acc = 0.0;
    double p = 0.0;
    double fp = m.f(0.0);
    for (const auto& cp : m.critical_points) {
      if (cp.v >= a) break;
      double inc = cp.fv - fp;
      acc += positive_part ? std::max(inc, 0.0) : std::min(inc, 0.0);
      p = cp.v;
      fp = cp.fv;
    }
    (void)p;
    double inc = m.f(a) - fp;
    acc += positive_part ? std::max(inc, 0.0) : std::min(inc, 0.0);
    return acc;
  };
  return m.f(0.0) + split(ul, true) + split(ur, false);
}

double numerical_flux(const model::FluxModel& m, Scheme s, double ul,
                      double ur) {
  return s == Scheme::Godunov ? godunov_flux(m, ul, ur)
                              : engquist_osher_flux(m, ul, ur);
}

double slice_mass(const grid::SpaceTimeField& f, int n) {
  double acc = 0.0;
  for (int i = 0; i < f.grid.nx; ++i) acc += f.at(n, i);
  return acc * f.grid.dx();
}

namespace {

using grid::BoundaryMode;
using grid::SpaceTimeField;
using grid::SpaceTimeGrid;

struct Stepper {
  const model::FluxModel& m;
  const SpaceTimeGrid& g;
  double eps;
  const ControlField* E;  // may be null
  SolverConfig cfg;

  int nx;
  double dx, dt;

  Stepper(const model::FluxModel& m_, const SpaceTimeGrid& g_, double eps_,
          const ControlField* E_, const SolverConfig& cfg_)
      : m(m_), g(g_), eps(eps_), E(E_), cfg(cfg_), nx(g_.nx), dx(g_.dx()),
        dt(g_.dt()) {
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0))
      throw Error("SolverConfig: cfl must lie in (0,1]");
    double speed = m.lipschitz_f;
    if (E) {
      E->check_finite();
      speed += m.max_abs_dsigma * E->max_abs();
    }
    if (dt * speed / dx > cfg.cfl * (1.0 + 1e-12))
      throw CflViolation("advective step dt*s/dx = " +
                         num::format_g17(dt * speed / dx) +
                         " exceeds cfl = " + num::format_g17(cfg.cfl));
    if (eps > 0.0 && cfg.stepping == Stepping::Explicit) {
      double diff = eps * m.max_D * dt / (dx * dx);
      if (diff > 0.5 * (1.0 + 1e-12))
        throw CflViolation("explicit diffusion number " +
                           num::format_g17(diff) + " exceeds 1/2");
    }
  }

  double left_of(std::span<const double> u, int j) const {
    // Cell value on the left of interface j.
    if (j > 0) return u[static_cast<std::size_t>(j - 1)];
    return g.boundary == BoundaryMode::Periodic
               ? u[static_cast<std::size_t>(nx - 1)]
               : u[0];
  }
  double right_of(std::span<const double> u, int j) const {
    if (j < nx) return u[static_cast<std::size_t>(j)];
    return g.boundary == BoundaryMode::Periodic
               ? u[0]
               : u[static_cast<std::size_t>(nx - 1)];
  }

  // Advances slice `u` (length nx) into `out`; n is the step index (source
  // time level), used to pick the control slot.  Accumulates control work
  // into *work when controlled.
  void step(std::span<const double> u, std::span<double> out, int n,
            double* work) const {
    std::vector<double> flux(static_cast<std::size_t>(nx) + 1);
    for (int j = 0; j <= nx; ++j) {
      double ul = left_of(u, j), ur = right_of(u, j);
      double F = numerical_flux(m, cfg.scheme, ul, ur);
      if (E) {
        double s = 0.5 * (m.sigma(ul) + m.sigma(ur));
        double e = E->at(n, j);
        F += s * e;
        if (work) *work += 0.5 * s * e * e * dx * dt;
      }
      flux[static_cast<std::size_t>(j)] = F;
    }
    // Hyperbolic (+ control) part.
    for (int i = 0; i < nx; ++i)
      out[static_cast<std::size_t>(i)] =
          u[static_cast<std::size_t>(i)] -
          dt / dx *
              (flux[static_cast<std::size_t>(i) + 1] -
               flux[static_cast<std::size_t>(i)]);
    if (eps <= 0.0) return;

    // Interface diffusivities (harmonic mean), frozen at the start slice.
    std::vector<double> Dif(static_cast<std::size_t>(nx) + 1);
    for (int j = 0; j <= nx; ++j) {
      double a = m.D(left_of(u, j)), b = m.D(right_of(u, j));
      Dif[static_cast<std::size_t>(j)] = 2.0 * a * b / (a + b);
    }
    const bool periodic = g.boundary == BoundaryMode::Periodic;
    const double lam = 0.5 * eps * dt / (dx * dx);

    if (cfg.stepping == Stepping::Explicit) {
      // Gradients of the start slice; constant extension kills the
      // boundary-interface gradient.
      std::vector<double> G(static_cast<std::size_t>(nx) + 1, 0.0);
      for (int j = 0; j <= nx; ++j) {
        if (!periodic && (j == 0 || j == nx)) continue;
        G[static_cast<std::size_t>(j)] =
            Dif[static_cast<std::size_t>(j)] *
            (right_of(u, j) - left_of(u, j)) / dx;
      }
      for (int i = 0; i < nx; ++i)
        out[static_cast<std::size_t>(i)] +=
            0.5 * eps * dt / dx *
            (G[static_cast<std::size_t>(i) + 1] -
             G[static_cast<std::size_t>(i)]);
      return;
    }

    // Semi-implicit: gradients taken on the new slice, D frozen at the old
    // one; (I + lam * A) out_new = out, A the weighted Dirichlet/Neumann or
    // periodic graph Laplacian.
    std::vector<double> lower(static_cast<std::size_t>(nx), 0.0),
        diag(static_cast<std::size_t>(nx), 0.0),
        upper(static_cast<std::size_t>(nx), 0.0),
        rhs(out.begin(), out.end());
    for (int i = 0; i < nx; ++i) {
      double dl = Dif[static_cast<std::size_t>(i)];
      double dr = Dif[static_cast<std::size_t>(i) + 1];
      if (!periodic && i == 0) dl = 0.0;
      if (!periodic && i == nx - 1) dr = 0.0;
      diag[static_cast<std::size_t>(i)] = 1.0 + lam * (dl + dr);
      if (i > 0) lower[static_cast<std::size_t>(i)] = -lam * dl;
      if (i < nx - 1) upper[static_cast<std::size_t>(i)] = -lam * dr;
    }
    if (periodic) {
      double c_lo = -lam * Dif[0];        // couples cell nx-1 to cell 0
      double c_hi = -lam * Dif[0];        // couples cell 0 to cell nx-1
      num::cyclic_thomas_solve(lower, diag, upper, c_lo, c_hi, rhs);
    } else {
      num::thomas_solve(lower, diag, upper, rhs);
    }
    std::copy(rhs.begin(), rhs.end(), out.begin());
  }

  SpaceTimeField run(std::span<const double> u0, double* work) const {
    if (static_cast<int>(u0.size()) != nx)
      throw GridMismatch("initial slice size differs from grid");
    for (double v : u0)
      if (!(v >= -1e-12 && v <= 1.0 + 1e-12))
        throw DomainMismatch("initial data leaves the state space [0,1]");
    SpaceTimeField f(g);
    std::copy(u0.begin(), u0.end(), f.slice(0).begin());
    for (int n = 0; n < g.nt; ++n)
      step(f.slice(n), f.slice(n + 1), n, work);
    for (double v : f.values)
      if (!std::isfinite(v))
        throw NonfiniteValue("solver produced a non-finite value");
    return f;
  }
};

}  // namespace

SpaceTimeField solve_entropic(const model::FluxModel& m,
                              const SpaceTimeGrid& g,
                              std::span<const double> u0,
                              const SolverConfig& cfg) {
  return Stepper(m, g, 0.0, nullptr, cfg).run(u0, nullptr);
}

SpaceTimeField solve_viscous(const model::FluxModel& m, const SpaceTimeGrid& g,
                             std::span<const double> u0, double eps,
                             Direction dir, const SolverConfig& cfg) {
  if (eps <= 0.0) throw Error("solve_viscous: eps must be positive");
  if (dir == Direction::Forward)
    return Stepper(m, g, eps, nullptr, cfg).run(u0, nullptr);
  // Backward: w(s,y) := v(T-s,-y) solves the forward equation; the supplied
  // slice is the data at time T.
  std::vector<double> w0(u0.size());
  for (std::size_t i = 0; i < u0.size(); ++i)
    w0[i] = u0[u0.size() - 1 - i];
  SpaceTimeField w = Stepper(m, g, eps, nullptr, cfg).run(w0, nullptr);
  SpaceTimeField v(g);
  for (int n = 0; n <= g.nt; ++n)
    for (int i = 0; i < g.nx; ++i)
      v.at(n, i) = w.at(g.nt - n, g.nx - 1 - i);
  return v;
}

SpaceTimeField solve_controlled(const model::FluxModel& m,
                                const SpaceTimeGrid& g,
                                std::span<const double> u0, double eps,
                                ControlField& E, const SolverConfig& cfg) {
  if (!E.grid.same_layout(g))
    throw GridMismatch("control field lives on a different grid");
  double work = 0.0;
  SpaceTimeField f = Stepper(m, g, eps, &E, cfg).run(u0, &work);
  E.energy = work;
  return f;
}

}  // namespace sclab::solvers
