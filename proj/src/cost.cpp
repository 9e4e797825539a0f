#include "sclab/cost.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <utility>

#include "sclab/errors.hpp"
#include "sclab/numerics.hpp"

namespace sclab::cost {

using grid::BoundaryMode;
using grid::SpaceTimeField;
using grid::SpaceTimeGrid;

// ---------------------------------------------------------------------
// CostReport serialization
// ---------------------------------------------------------------------

std::string CostReport::to_text() const {
  std::ostringstream out;
  out << "value = " << (infinite ? "inf" : num::format_g17(value)) << '\n';
  out << "infinite = " << (infinite ? 1 : 0) << '\n';
  out << "residual_l2 = " << num::format_g17(residual_l2) << '\n';
  for (const auto& [k, v] : diagnostics)
    out << k << " = " << num::format_g17(v) << '\n';
  return out.str();
}

std::string CostReport::csv_header() const {
  std::string h = "value,infinite,residual_l2";
  for (const auto& [k, v] : diagnostics) {
    (void)v;
    h += "," + k;
  }
  return h;
}

std::string CostReport::to_csv_row() const {
  std::string row = (infinite ? std::string("inf") : num::format_g17(value)) +
                    "," + (infinite ? "1" : "0") + "," +
                    num::format_g17(residual_l2);
  for (const auto& [k, v] : diagnostics) row += "," + num::format_g17(v);
  return row;
}

// ---------------------------------------------------------------------
// Weighted dual-norm core
// ---------------------------------------------------------------------

CostReport dual_energy_from_residuals(const SpaceTimeGrid& g,
                                      const std::vector<double>& r,
                                      const std::vector<double>& sigma,
                                      const CostOptions& opts) {
  const int nx = g.nx, nt = g.nt;
  if (r.size() != static_cast<std::size_t>(nt) * nx ||
      sigma.size() != static_cast<std::size_t>(nt) * (nx + 1))
    throw GridMismatch("dual_energy_from_residuals: array sizes");
  const double dx = g.dx(), dt = g.dt();

  CostReport rep;
  double defect_max = 0.0, defect_rel_max = 0.0, r_l1_total = 0.0;
  double r_l2sq = 0.0;
  int infinite_steps = 0, first_bad = -1;
  if (opts.keep_potential)
    rep.potential.assign(static_cast<std::size_t>(nt) * nx, 0.0);

  std::vector<double> W(static_cast<std::size_t>(nx) + 1);
  for (int n = 0; n < nt; ++n) {
    const double* rn = r.data() + static_cast<std::size_t>(n) * nx;
    const double* sn = sigma.data() + static_cast<std::size_t>(n) * (nx + 1);
    W[0] = 0.0;
    double l1 = 0.0;
    for (int i = 0; i < nx; ++i) {
      W[static_cast<std::size_t>(i) + 1] =
          W[static_cast<std::size_t>(i)] - rn[i] * dx;
      l1 += std::abs(rn[i]) * dx;
      r_l2sq += rn[i] * rn[i] * dx * dt;
    }
    double defect = std::abs(W[static_cast<std::size_t>(nx)]);
    defect_max = std::max(defect_max, defect);
    if (l1 > 0.0) defect_rel_max = std::max(defect_rel_max, defect / l1);
    r_l1_total += l1 * dt;
    if (defect > opts.compat_tol_rel * l1 + opts.compat_tol_abs) {
      rep.infinite = true;
      ++infinite_steps;
      if (first_bad < 0) first_bad = n;
      continue;
    }
    double acc = 0.0;
    for (int j = 1; j < nx; ++j) {
      double w = W[static_cast<std::size_t>(j)];
      double s = sn[j];
      if (s <= opts.sigma_floor) {
        if (std::abs(w) > opts.singular_flux_tol)
          throw SingularWeight(
              "interface " + std::to_string(j) + " at step " +
              std::to_string(n) + " carries flux " + num::format_g17(w) +
              " with vanishing weight");
        continue;
      }
      acc += 0.5 * w * w / s * dx;
    }
    rep.value += acc * dt;
    if (opts.keep_potential) {
      double* psi = rep.potential.data() + static_cast<std::size_t>(n) * nx;
      psi[0] = 0.0;
      for (int i = 1; i < nx; ++i) {
        double s = sn[i];
        double gradient =
            (s > opts.sigma_floor) ? W[static_cast<std::size_t>(i)] / s : 0.0;
        psi[i] = psi[i - 1] + gradient * dx;
      }
    }
  }
  rep.residual_l2 = std::sqrt(r_l2sq);
  rep.diagnostics["compat_defect_max"] = defect_max;
  rep.diagnostics["compat_defect_rel_max"] = defect_rel_max;
  rep.diagnostics["residual_l1"] = r_l1_total;
  rep.diagnostics["infinite_steps"] = infinite_steps;
  if (first_bad >= 0) rep.diagnostics["first_infinite_step"] = first_bad;
  rep.diagnostics["nx"] = nx;
  rep.diagnostics["nt"] = nt;
  if (rep.infinite) rep.value = num::inf;
  return rep;
}

// ---------------------------------------------------------------------
// Viscous residual
// ---------------------------------------------------------------------

double scheme_flux(const model::FluxModel& m, FluxScheme s, double ul,
                   double ur) {
  switch (s) {
    case FluxScheme::Godunov:
      return solvers::godunov_flux(m, ul, ur);
    case FluxScheme::EngquistOsher:
      return solvers::engquist_osher_flux(m, ul, ur);
    case FluxScheme::Central:
      return 0.5 * (m.f(ul) + m.f(ur));
  }
  return 0.0;
}

namespace {

struct GhostView {
  std::span<const double> u;
  bool periodic;
  double left(int j) const {
    if (j > 0) return u[static_cast<std::size_t>(j - 1)];
    return periodic ? u[u.size() - 1] : u[0];
  }
  double right(int j) const {
    if (j < static_cast<int>(u.size())) return u[static_cast<std::size_t>(j)];
    return periodic ? u[0] : u[u.size() - 1];
  }
};

}  // namespace

std::vector<double> viscous_residual(const model::FluxModel& m,
                                     const SpaceTimeField& u, double eps,
                                     const CostOptions& opts,
                                     std::vector<double>* sigma) {
  const SpaceTimeGrid& g = u.grid;
  const int nx = g.nx, nt = g.nt;
  const double dx = g.dx(), dt = g.dt();
  const bool periodic = g.boundary == BoundaryMode::Periodic;

  std::vector<double> r(static_cast<std::size_t>(nt) * nx);
  if (sigma) sigma->assign(static_cast<std::size_t>(nt) * (nx + 1), 0.0);

  std::vector<double> flux(static_cast<std::size_t>(nx) + 1),
      diff(static_cast<std::size_t>(nx) + 1);
  for (int n = 0; n < nt; ++n) {
    GhostView uo{u.slice(n), periodic};
    GhostView un{u.slice(n + 1), periodic};
    for (int j = 0; j <= nx; ++j) {
      double ul = uo.left(j), ur = uo.right(j);
      flux[static_cast<std::size_t>(j)] = scheme_flux(m, opts.scheme, ul, ur);
      if (sigma)
        (*sigma)[static_cast<std::size_t>(n) * (nx + 1) + j] =
            0.5 * (m.sigma(ul) + m.sigma(ur));
      double G = 0.0;
      if (eps != 0.0 && (periodic || (j > 0 && j < nx))) {
        double a = m.D(ul), b = m.D(ur);
        double Dh = 2.0 * a * b / (a + b);
        double grad_old = (ur - ul) / dx;
        double grad_new = (un.right(j) - un.left(j)) / dx;
        G = Dh * ((1.0 - opts.theta) * grad_old + opts.theta * grad_new);
      }
      diff[static_cast<std::size_t>(j)] = G;
    }
    for (int i = 0; i < nx; ++i) {
      r[static_cast<std::size_t>(n) * nx + i] =
          (u.at(n + 1, i) - u.at(n, i)) / dt +
          (flux[static_cast<std::size_t>(i) + 1] -
           flux[static_cast<std::size_t>(i)]) /
              dx -
          0.5 * eps *
              (diff[static_cast<std::size_t>(i) + 1] -
               diff[static_cast<std::size_t>(i)]) /
              dx;
    }
  }
  return r;
}

CostReport cost_I_eps(const model::FluxModel& m, const SpaceTimeField& u,
                      double eps, const CostOptions& opts) {
  std::vector<double> sigma;
  std::vector<double> r = viscous_residual(m, u, eps, opts, &sigma);
  CostReport rep = dual_energy_from_residuals(u.grid, r, sigma, opts);
  rep.diagnostics["eps"] = eps;
  rep.diagnostics["theta"] = opts.theta;
  return rep;
}

CostReport cost_H_eps(const model::FluxModel& m, const SpaceTimeField& u,
                      double eps, const CostOptions& opts) {
  if (eps <= 0.0) throw Error("cost_H_eps: eps must be positive");
  CostReport rep = cost_I_eps(m, u, eps, opts);
  if (!rep.infinite) rep.value /= eps;
  return rep;
}

solvers::ControlField recover_control(const model::FluxModel& m,
                                      const SpaceTimeField& u, double eps,
                                      const CostOptions& opts) {
  const SpaceTimeGrid& g = u.grid;
  const int nx = g.nx;
  const double dx = g.dx();
  std::vector<double> sigma;
  std::vector<double> r = viscous_residual(m, u, eps, opts, &sigma);

  solvers::ControlField E(g);
  double energy = 0.0;
  for (int n = 0; n < g.nt; ++n) {
    const double* rn = r.data() + static_cast<std::size_t>(n) * nx;
    const double* sn = sigma.data() + static_cast<std::size_t>(n) * (nx + 1);
    double W = 0.0, l1 = 0.0;
    for (int i = 0; i < nx; ++i) l1 += std::abs(rn[i]) * dx;
    for (int j = 0; j <= nx; ++j) {
      if (j > 0) W -= rn[j - 1] * dx;
      if (sn[j] <= opts.sigma_floor) {
        if (std::abs(W) > opts.singular_flux_tol)
          throw SingularWeight("recover_control: vanishing weight under flux " +
                               num::format_g17(W));
        E.at(n, j) = 0.0;
      } else {
        E.at(n, j) = W / sn[j];
        if (j > 0 && j < nx) energy += 0.5 * W * W / sn[j] * dx * g.dt();
      }
    }
    if (std::abs(W) > opts.compat_tol_rel * l1 + opts.compat_tol_abs)
      throw SingularWeight(
          "recover_control: residual integral defect " + num::format_g17(W) +
          " cannot be carried by a zero-flux potential");
  }
  E.energy = energy;
  return E;
}

// ---------------------------------------------------------------------
// Entropy production pairings
// ---------------------------------------------------------------------

namespace {

void check_support(const grid::SpaceTimeGrid& g,
                   const std::function<double(double, double)>& phi) {
  const double tol = 1e-12;
  for (int n = 0; n <= g.nt; ++n) {
    double t = g.t_node(n);
    if (std::abs(phi(t, -g.L)) > tol || std::abs(phi(t, g.L)) > tol)
      throw SupportViolation("test function does not vanish at x = +-L");
  }
  for (int i = 0; i < g.nx; ++i) {
    double x = g.x_center(i);
    if (std::abs(phi(0.0, x)) > tol || std::abs(phi(g.T, x)) > tol)
      throw SupportViolation("test function does not vanish at t = 0, T");
  }
}

}  // namespace

double entropy_production(const model::FluxModel& m, const SpaceTimeField& u,
                          const model::EntropyPair& pair,
                          const model::TestFunction& phi) {
  (void)m;
  const SpaceTimeGrid& g = u.grid;
  check_support(g, phi.phi);
  const double dx = g.dx(), dt = g.dt();
  double acc = 0.0;
  for (int n = 0; n < g.nt; ++n) {
    double tm = g.t_node(n) + 0.5 * dt;
    for (int i = 0; i < g.nx; ++i) {
      double x = g.x_center(i);
      double eta_bar = 0.5 * (pair.eta(u.at(n, i)) + pair.eta(u.at(n + 1, i)));
      double q_bar = 0.5 * (pair.q(u.at(n, i)) + pair.q(u.at(n + 1, i)));
      acc += eta_bar * phi.phi_t(tm, x) + q_bar * phi.phi_x(tm, x);
    }
  }
  return -acc * dx * dt;
}

double sampled_production(const model::FluxModel& m, const SpaceTimeField& u,
                          const model::EntropySampler& sampler) {
  (void)m;
  const SpaceTimeGrid& g = u.grid;
  const double dx = g.dx(), dt = g.dt();
  double acc = 0.0;
  for (int n = 0; n < g.nt; ++n) {
    double tm = g.t_node(n) + 0.5 * dt;
    for (int i = 0; i < g.nx; ++i) {
      double x = g.x_center(i);
      double a = u.at(n, i), b = u.at(n + 1, i);
      acc += 0.5 * (sampler.theta_t(a, tm, x) + sampler.theta_t(b, tm, x));
      acc += 0.5 * (sampler.Q_x(a, tm, x) + sampler.Q_x(b, tm, x));
    }
  }
  return -acc * dx * dt;
}

double tv_positive_part(const model::FluxModel& m, const SpaceTimeField& u,
                        const model::EntropyPair& pair,
                        double window_halfwidth, int mollify_cells) {
  (void)m;
  const SpaceTimeGrid& g = u.grid;
  const int nx = g.nx;
  const double dx = g.dx(), dt = g.dt();
  const bool periodic = g.boundary == BoundaryMode::Periodic;

  auto q_interfaces = [&](int n, std::vector<double>& q) {
    GhostView v{u.slice(n), periodic};
    for (int j = 0; j <= nx; ++j)
      q[static_cast<std::size_t>(j)] =
          0.5 * (pair.q(v.left(j)) + pair.q(v.right(j)));
  };

  std::vector<double> q_old(static_cast<std::size_t>(nx) + 1),
      q_new(static_cast<std::size_t>(nx) + 1),
      p(static_cast<std::size_t>(nx));
  double total = 0.0;
  for (int n = 0; n < g.nt; ++n) {
    q_interfaces(n, q_old);
    q_interfaces(n + 1, q_new);
    for (int i = 0; i < nx; ++i) {
      double qr = 0.5 * (q_old[static_cast<std::size_t>(i) + 1] +
                         q_new[static_cast<std::size_t>(i) + 1]);
      double ql = 0.5 * (q_old[static_cast<std::size_t>(i)] +
                         q_new[static_cast<std::size_t>(i)]);
      p[static_cast<std::size_t>(i)] =
          (pair.eta(u.at(n + 1, i)) - pair.eta(u.at(n, i))) / dt +
          (qr - ql) / dx;
    }
    std::vector<double> pm = grid::box_mollify(p, mollify_cells);
    for (int i = 0; i < nx; ++i) {
      if (std::abs(g.x_center(i)) >= window_halfwidth) continue;
      double v = pm[static_cast<std::size_t>(i)];
      if (v > 0.0) total += v * dx * dt;
    }
  }
  return total;
}

// ---------------------------------------------------------------------
// Jump kernel and BV functionals
// ---------------------------------------------------------------------

double jump_kernel_rho(const model::FluxModel& m, double v, double u_plus,
                       double u_minus) {
  double lo = std::min(u_plus, u_minus), hi = std::max(u_plus, u_minus);
  if (v < lo || v > hi) return 0.0;
  return m.f(u_minus) * (u_plus - v) + m.f(u_plus) * (v - u_minus) -
         m.f(v) * (u_plus - u_minus);
}

namespace {

struct JumpSegment {
  double u_minus, u_plus;
  double lo, hi;       // v-support
  double abs_jump;     // |u_plus - u_minus|
  double duration;     // dt-length of the carrying curve
};

std::vector<JumpSegment> collect_segments(const grid::PiecewiseBVSolution& u) {
  std::vector<JumpSegment> segs;
  for (std::size_t k = 0; k < u.shocks.size(); ++k) {
    JumpSegment s;
    s.u_minus = u.region_values[k];
    s.u_plus = u.region_values[k + 1];
    s.lo = std::min(s.u_minus, s.u_plus);
    s.hi = std::max(s.u_minus, s.u_plus);
    s.abs_jump = s.hi - s.lo;
    s.duration = u.shocks[k].t.back() - u.shocks[k].t.front();
    segs.push_back(s);
  }
  return segs;
}

// Clip the v-interval [lo,hi] away from state-space endpoints where sigma
// vanishes; returns the clipped mass.
double clip_for_sigma(const model::FluxModel& m, double delta, double& lo,
                      double& hi) {
  double clipped = 0.0;
  if (m.sigma(lo) <= 1e-14 && lo < delta) {
    clipped += std::min(hi, delta) - lo;
    lo = delta;
  }
  if (m.sigma(hi) <= 1e-14 && hi > 1.0 - delta) {
    clipped += hi - std::max(lo, 1.0 - delta);
    hi = 1.0 - delta;
  }
  return clipped;
}

struct BvValue {
  double value = 0.0;
  double quad_error = 0.0;
  double clipped = 0.0;
  std::vector<double> per_segment;
};

BvValue evaluate_H_bv(const model::FluxModel& m,
                      const std::vector<JumpSegment>& segs, double delta,
                      double quad_tol) {
  BvValue out;
  for (const auto& s : segs) {
    double lo = s.lo, hi = s.hi;
    out.clipped += clip_for_sigma(m, delta, lo, hi);
    double contrib = 0.0;
    if (hi > lo) {
      auto integrand = [&](double v) {
        double rho = jump_kernel_rho(m, v, s.u_plus, s.u_minus);
        if (rho <= 0.0) return 0.0;
        double sig = m.sigma(v);
        if (sig <= 0.0)
          throw SingularConductivity(
              "sigma vanishes inside the jump support at v = " +
              num::format_g17(v));
        return rho / s.abs_jump * m.D(v) / sig;
      };
      auto q = num::adaptive_simpson(integrand, lo, hi, quad_tol);
      contrib = s.duration * q.value;
      out.quad_error += s.duration * q.error_estimate;
    }
    out.per_segment.push_back(contrib);
    out.value += contrib;
  }
  return out;
}

}  // namespace

CostReport cost_H_bv(const model::FluxModel& m,
                     const grid::PiecewiseBVSolution& pbv,
                     const BvQuadOptions& opts) {
  pbv.validate_rankine_hugoniot(m, opts.rh_tol);
  auto segs = collect_segments(pbv);
  BvValue a = evaluate_H_bv(m, segs, opts.clip_delta, opts.quad_tol);
  if (a.clipped > 0.0) {
    // Sensitivity in the clip scale flags a non-integrable endpoint.
    BvValue b = evaluate_H_bv(m, segs, 0.5 * opts.clip_delta, opts.quad_tol);
    double scale = std::max({std::abs(a.value), std::abs(b.value), 1e-30});
    if (std::abs(b.value - a.value) > opts.singular_rel * scale)
      throw SingularConductivity(
          "jump integral diverges as the sigma-endpoint clip is refined: " +
          num::format_g17(a.value) + " vs " + num::format_g17(b.value));
  }
  CostReport rep;
  rep.value = a.value;
  rep.diagnostics["quad_error"] = a.quad_error;
  rep.diagnostics["clipped_span"] = a.clipped;
  rep.diagnostics["n_segments"] = static_cast<double>(segs.size());
  for (std::size_t k = 0; k < a.per_segment.size(); ++k)
    rep.diagnostics["segment_" + std::to_string(k)] = a.per_segment[k];
  return rep;
}

namespace {

// H' inner evaluation at fixed clip: best subset of segments with per-v
// bang-bang entropy choice; quadrature on a dyadic composite Simpson grid.
struct HPrimeValue {
  double value = 0.0;
  double quad_error = 0.0;
  int best_mask = 0;
};

HPrimeValue evaluate_H_prime(const model::FluxModel& m,
                             const std::vector<JumpSegment>& segs,
                             double delta) {
  const int n = static_cast<int>(segs.size());
  if (n > 16)
    throw Error("cost_H_prime_bv: subset enumeration capped at 16 segments");
  double lo = 1.0, hi = 0.0;
  for (const auto& s : segs) {
    lo = std::min(lo, s.lo);
    hi = std::max(hi, s.hi);
  }
  HPrimeValue out;
  if (n == 0 || hi <= lo) return out;
  clip_for_sigma(m, delta, lo, hi);
  if (hi <= lo) return out;

  auto subset_value = [&](int mask, int n_panels) {
    const int n_nodes = 2 * n_panels + 1;
    const double h = (hi - lo) / (n_nodes - 1);
    double acc = 0.0;
    for (int i = 0; i < n_nodes; ++i) {
      double v = lo + h * i;
      double gsum = 0.0;
      for (int k = 0; k < n; ++k)
        if (mask & (1 << k))
          gsum += segs[static_cast<std::size_t>(k)].duration *
                  jump_kernel_rho(m, v, segs[static_cast<std::size_t>(k)].u_plus,
                                  segs[static_cast<std::size_t>(k)].u_minus) /
                  segs[static_cast<std::size_t>(k)].abs_jump;
      if (gsum <= 0.0) continue;
      double sig = m.sigma(v);
      if (sig <= 0.0)
        throw SingularConductivity(
            "sigma vanishes inside the comparison-functional support at v = " +
            num::format_g17(v));
      double w = (i == 0 || i == n_nodes - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * gsum * m.D(v) / sig;
    }
    return acc * h / 3.0;
  };

  for (int mask = 1; mask < (1 << n); ++mask) {
    double coarse = subset_value(mask, 2048);
    double fine = subset_value(mask, 4096);
    if (fine > out.value) {
      out.value = fine;
      out.quad_error = std::abs(fine - coarse);
      out.best_mask = mask;
    }
  }
  return out;
}

}  // namespace

CostReport cost_H_prime_bv(const model::FluxModel& m,
                           const grid::PiecewiseBVSolution& pbv,
                           const BvQuadOptions& opts) {
  pbv.validate_rankine_hugoniot(m, opts.rh_tol);
  auto segs = collect_segments(pbv);
  HPrimeValue a = evaluate_H_prime(m, segs, opts.clip_delta);
  HPrimeValue b = evaluate_H_prime(m, segs, 0.5 * opts.clip_delta);
  double scale = std::max({a.value, b.value, 1e-30});
  if (std::abs(b.value - a.value) > opts.singular_rel * scale &&
      std::abs(b.value - a.value) > 1e-12)
    throw SingularConductivity(
        "comparison functional diverges as the sigma-endpoint clip is "
        "refined");
  CostReport rep;
  rep.value = a.value;
  rep.diagnostics["quad_error"] = a.quad_error;
  rep.diagnostics["subset_mask"] = a.best_mask;
  rep.diagnostics["n_segments"] = static_cast<double>(segs.size());
  return rep;
}

// ---------------------------------------------------------------------
// Projected first-order cost
// ---------------------------------------------------------------------

CostReport cost_I_projected(const model::FluxModel& m, const SpaceTimeField& u,
                            const ProjectedOptions& opts) {
  const SpaceTimeGrid& g = u.grid;
  const int nx = g.nx;
  const double dx = g.dx(), dt = g.dt();

  model::Envelopes env;
  if (opts.const_sigma_closed_form) env = model::envelopes(m);

  double f_lo = num::inf, f_hi = -num::inf;
  for (int s = 0; s <= 400; ++s) {
    double v = s / 400.0;
    f_lo = std::min(f_lo, m.f(v));
    f_hi = std::max(f_hi, m.f(v));
  }

  // Memoized pointwise R evaluation (quantized arguments).
  std::map<std::pair<std::int64_t, std::int64_t>, double> memo;
  auto r_point = [&](double w, double c) {
    if (opts.const_sigma_closed_form)
      return model::r_closed_const_sigma(env, w, c, opts.sigma_value);
    auto key = std::make_pair(std::llround(w * 1e12), std::llround(c * 1e12));
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    double val = model::r_fsigma(m, w, c, opts.r_opts);
    memo.emplace(key, val);
    return val;
  };

  CostReport rep;
  double golden_evals = 0.0;
  std::vector<double> A(static_cast<std::size_t>(nx)), ubar(A);
  for (int n = 0; n < g.nt; ++n) {
    double cum = 0.0;
    for (int i = 0; i < nx; ++i) {
      double ut = (u.at(n + 1, i) - u.at(n, i)) / dt;
      A[static_cast<std::size_t>(i)] = cum + 0.5 * ut * dx;
      ubar[static_cast<std::size_t>(i)] =
          0.5 * (u.at(n, i) + u.at(n + 1, i));
      cum += ut * dx;
    }
    double a_lo = *std::min_element(A.begin(), A.end());
    double a_hi = *std::max_element(A.begin(), A.end());
    auto slice_cost = [&](double c) {
      golden_evals += 1.0;
      double acc = 0.0;
      for (int i = 0; i < nx; ++i)
        acc += r_point(ubar[static_cast<std::size_t>(i)],
                       c - A[static_cast<std::size_t>(i)]) *
               dx;
      return acc;
    };
    auto best = num::golden_section_min(slice_cost, a_lo + f_lo - 1.0,
                                        a_hi + f_hi + 1.0, opts.c_tol);
    rep.value += best.second * dt;
  }
  rep.diagnostics["slice_evaluations"] = golden_evals;
  rep.diagnostics["memo_size"] = static_cast<double>(memo.size());
  return rep;
}

double gradient_square_integral(const grid::SpaceTimeField& u) {
  const SpaceTimeGrid& g = u.grid;
  const double dx = g.dx(), dt = g.dt();
  double acc = 0.0;
  for (int n = 0; n <= g.nt; ++n) {
    double w = (n == 0 || n == g.nt) ? 0.5 : 1.0;
    double slice = 0.0;
    for (int j = 1; j < g.nx; ++j) {
      double grad = (u.at(n, j) - u.at(n, j - 1)) / dx;
      slice += grad * grad * dx;
    }
    acc += w * slice * dt;
  }
  return acc;
}

}  // namespace sclab::cost
