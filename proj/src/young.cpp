#include "sclab/young.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "sclab/errors.hpp"
#include "sclab/numerics.hpp"

namespace sclab::young {

using grid::BoundaryMode;
using grid::SpaceTimeField;
using grid::SpaceTimeGrid;

// ---------------------------------------------------------------------
// AtomicYoungMeasure
// ---------------------------------------------------------------------

AtomicYoungMeasure::AtomicYoungMeasure(const SpaceTimeGrid& g, int n)
    : grid(g), n_atoms(n) {
  if (n <= 0) throw Error("AtomicYoungMeasure: need at least one atom");
  weights.assign(static_cast<std::size_t>(n), SpaceTimeField(g));
  positions.assign(static_cast<std::size_t>(n), SpaceTimeField(g));
}

void AtomicYoungMeasure::validate(double tol) const {
  for (int n = 0; n <= grid.nt; ++n)
    for (int i = 0; i < grid.nx; ++i) {
      double s = 0.0;
      for (int a = 0; a < n_atoms; ++a) {
        double w = weights[static_cast<std::size_t>(a)].at(n, i);
        double p = positions[static_cast<std::size_t>(a)].at(n, i);
        if (w < -tol)
          throw DomainMismatch("negative atom weight at node (" +
                               std::to_string(n) + "," + std::to_string(i) +
                               ")");
        if (p < -tol || p > 1.0 + tol)
          throw DomainMismatch("atom position outside [0,1]");
        s += w;
      }
      if (std::abs(s - 1.0) > tol)
        throw DomainMismatch("atom weights sum to " + num::format_g17(s) +
                             " at node (" + std::to_string(n) + "," +
                             std::to_string(i) + ")");
    }
}

double AtomicYoungMeasure::moment_at(const std::function<double(double)>& F,
                                     int n, int i) const {
  double s = 0.0;
  for (int a = 0; a < n_atoms; ++a)
    s += weights[static_cast<std::size_t>(a)].at(n, i) *
         F(positions[static_cast<std::size_t>(a)].at(n, i));
  return s;
}

SpaceTimeField AtomicYoungMeasure::moment(
    const std::function<double(double)>& F) const {
  SpaceTimeField out(grid);
  for (int n = 0; n <= grid.nt; ++n)
    for (int i = 0; i < grid.nx; ++i) out.at(n, i) = moment_at(F, n, i);
  return out;
}

void AtomicYoungMeasure::save_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_csv: cannot open " + path);
  out << "atom,block,t,x,value\n";
  for (int a = 0; a < n_atoms; ++a)
    for (int b = 0; b < 2; ++b) {
      const SpaceTimeField& f =
          b == 0 ? weights[static_cast<std::size_t>(a)]
                 : positions[static_cast<std::size_t>(a)];
      for (int n = 0; n <= grid.nt; ++n)
        for (int i = 0; i < grid.nx; ++i)
          out << a << ',' << (b == 0 ? "weight" : "position") << ','
              << num::format_g17(grid.t_node(n)) << ','
              << num::format_g17(grid.x_center(i)) << ','
              << num::format_g17(f.at(n, i)) << '\n';
    }
}

AtomicYoungMeasure dirac_measure(const SpaceTimeField& u) {
  AtomicYoungMeasure mu(u.grid, 1);
  std::fill(mu.weights[0].values.begin(), mu.weights[0].values.end(), 1.0);
  mu.positions[0] = u;
  return mu;
}

AtomicYoungMeasure mix_measures(const AtomicYoungMeasure& nu0,
                                const AtomicYoungMeasure& nu1,
                                const SpaceTimeField& theta) {
  nu0.grid.require_same_layout(nu1.grid);
  nu0.grid.require_same_layout(theta.grid);
  AtomicYoungMeasure out(nu0.grid, nu0.n_atoms + nu1.n_atoms);
  for (int n = 0; n <= out.grid.nt; ++n)
    for (int i = 0; i < out.grid.nx; ++i) {
      double th = theta.at(n, i);
      for (int a = 0; a < nu0.n_atoms; ++a) {
        out.weights[static_cast<std::size_t>(a)].at(n, i) =
            (1.0 - th) * nu0.weights[static_cast<std::size_t>(a)].at(n, i);
        out.positions[static_cast<std::size_t>(a)].at(n, i) =
            nu0.positions[static_cast<std::size_t>(a)].at(n, i);
      }
      for (int a = 0; a < nu1.n_atoms; ++a) {
        std::size_t b = static_cast<std::size_t>(nu0.n_atoms + a);
        out.weights[b].at(n, i) =
            th * nu1.weights[static_cast<std::size_t>(a)].at(n, i);
        out.positions[b].at(n, i) =
            nu1.positions[static_cast<std::size_t>(a)].at(n, i);
      }
    }
  return out;
}

// ---------------------------------------------------------------------
// Flux potential and measure-valued cost
// ---------------------------------------------------------------------

namespace {

// Residual of the first moment equation and interface sigma-weights; the
// central interface averages reproduce cost::viscous_residual with the
// central scheme and eps = 0 exactly when mu is a Dirac measure.
void moment_residual(const model::FluxModel& m, const AtomicYoungMeasure& mu,
                     std::vector<double>& r, std::vector<double>& sigma) {
  const SpaceTimeGrid& g = mu.grid;
  const int nx = g.nx, nt = g.nt;
  const double dx = g.dx(), dt = g.dt();
  const bool periodic = g.boundary == BoundaryMode::Periodic;

  SpaceTimeField mi = mu.moment([](double v) { return v; });
  SpaceTimeField mf = mu.moment(m.f);
  SpaceTimeField ms = mu.moment(m.sigma);

  r.assign(static_cast<std::size_t>(nt) * nx, 0.0);
  sigma.assign(static_cast<std::size_t>(nt) * (nx + 1), 0.0);
  auto ghost_l = [&](const SpaceTimeField& f, int n, int j) {
    if (j > 0) return f.at(n, j - 1);
    return periodic ? f.at(n, nx - 1) : f.at(n, 0);
  };
  auto ghost_r = [&](const SpaceTimeField& f, int n, int j) {
    if (j < nx) return f.at(n, j);
    return periodic ? f.at(n, 0) : f.at(n, nx - 1);
  };
  std::vector<double> F(static_cast<std::size_t>(nx) + 1);
  for (int n = 0; n < nt; ++n) {
    for (int j = 0; j <= nx; ++j) {
      F[static_cast<std::size_t>(j)] =
          0.5 * (ghost_l(mf, n, j) + ghost_r(mf, n, j));
      sigma[static_cast<std::size_t>(n) * (nx + 1) + j] =
          0.5 * (ghost_l(ms, n, j) + ghost_r(ms, n, j));
    }
    for (int i = 0; i < nx; ++i)
      r[static_cast<std::size_t>(n) * nx + i] =
          (mi.at(n + 1, i) - mi.at(n, i)) / dt +
          (F[static_cast<std::size_t>(i) + 1] -
           F[static_cast<std::size_t>(i)]) /
              dx;
  }
}

}  // namespace

FluxPotential flux_potential(const model::FluxModel& m,
                             const AtomicYoungMeasure& mu) {
  std::vector<double> r, sigma;
  moment_residual(m, mu, r, sigma);
  const SpaceTimeGrid& g = mu.grid;
  FluxPotential G(g);
  for (int n = 0; n < g.nt; ++n) {
    double W = 0.0;
    G.at(n, 0) = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      W -= r[static_cast<std::size_t>(n) * g.nx + i] * g.dx();
      G.at(n, i + 1) = W;
    }
  }
  return G;
}

cost::CostReport cost_mv(const model::FluxModel& m,
                         const AtomicYoungMeasure& mu,
                         const cost::CostOptions& opts) {
  std::vector<double> r, sigma;
  moment_residual(m, mu, r, sigma);
  cost::CostReport rep =
      cost::dual_energy_from_residuals(mu.grid, r, sigma, opts);
  rep.diagnostics["n_atoms"] = mu.n_atoms;
  return rep;
}

// ---------------------------------------------------------------------
// Moment reduction to at most three atoms
// ---------------------------------------------------------------------

namespace {

struct Moments {
  double mass, mi, mf;  // normalization, identity and flux moments
};

// Weights of three atoms matching mass/identity/flux moments; returns false
// when the triple is (numerically) collinear.
bool solve_weights(const model::FluxModel& m, double v1, double v2, double v3,
                   const Moments& t, double out[3]) {
  double a[3][3] = {{1.0, 1.0, 1.0},
                    {v1, v2, v3},
                    {m.f(v1), m.f(v2), m.f(v3)}};
  double b[3] = {t.mass, t.mi, t.mf};
  double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
               a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
               a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  if (std::abs(det) < 1e-14) return false;
  // Cramer's rule.
  for (int c = 0; c < 3; ++c) {
    double mcol[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) mcol[i][j] = (j == c) ? b[i] : a[i][j];
    double d = mcol[0][0] * (mcol[1][1] * mcol[2][2] - mcol[1][2] * mcol[2][1]) -
               mcol[0][1] * (mcol[1][0] * mcol[2][2] - mcol[1][2] * mcol[2][0]) +
               mcol[0][2] * (mcol[1][0] * mcol[2][1] - mcol[1][1] * mcol[2][0]);
    out[c] = d / det;
  }
  return true;
}

}  // namespace

AtomicSlice reduce_to_atoms(const model::FluxModel& m,
                            std::span<const double> values,
                            std::span<const double> prob, double tol) {
  if (values.size() != prob.size() || values.size() < 2)
    throw DomainMismatch("reduce_to_atoms: value grid / probability mismatch");
  Moments t{0.0, 0.0, 0.0};
  double ms = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (prob[i] < -1e-12)
      throw DomainMismatch("reduce_to_atoms: negative probability");
    t.mass += prob[i];
    t.mi += prob[i] * values[i];
    t.mf += prob[i] * m.f(values[i]);
    ms += prob[i] * m.sigma(values[i]);
  }
  if (std::abs(t.mass - 1.0) > 1e-9)
    throw DomainMismatch("reduce_to_atoms: probabilities sum to " +
                         num::format_g17(t.mass));

  // Single atom: all three moments at the barycenter.
  if (std::abs(m.f(t.mi) - t.mf) <= tol && std::abs(m.sigma(t.mi) - ms) <= tol)
    return AtomicSlice{{1.0}, {t.mi}};

  const int n = static_cast<int>(values.size());
  const double wmin = -1e-12;
  auto sigma_res = [&](double v1, double v2, double v3, double w[3]) {
    if (!solve_weights(m, v1, v2, v3, t, w)) return num::inf;
    if (w[0] < wmin || w[1] < wmin || w[2] < wmin) return num::inf;
    return w[0] * m.sigma(v1) + w[1] * m.sigma(v2) + w[2] * m.sigma(v3) - ms;
  };

  double best = num::inf;
  int bi = -1, bj = -1, bk = -1;
  double w[3];
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        double res = sigma_res(values[static_cast<std::size_t>(i)],
                               values[static_cast<std::size_t>(j)],
                               values[static_cast<std::size_t>(k)], w);
        if (std::abs(res) < std::abs(best)) {
          best = res;
          bi = i;
          bj = j;
          bk = k;
        }
      }
  if (bi < 0) throw ReductionFailed("no nonnegative support triple found");

  double v1 = values[static_cast<std::size_t>(bi)],
         v2 = values[static_cast<std::size_t>(bj)],
         v3 = values[static_cast<std::size_t>(bk)];
  if (std::abs(best) > tol) {
    // Polish the third position continuously: the sigma-residual changes
    // sign across the best grid position or an adjacent bracket.
    auto res_at = [&](double v) {
      double ww[3];
      double r = sigma_res(v1, v2, v, ww);
      return std::isfinite(r) ? r : (best > 0 ? num::inf : -num::inf);
    };
    double lo = values[static_cast<std::size_t>(std::max(bk - 1, bj + 1))];
    double hi = values[static_cast<std::size_t>(std::min(bk + 1, n - 1))];
    double flo = res_at(lo), fhi = res_at(hi);
    double root = v3;
    if (std::isfinite(flo) && flo * best < 0.0)
      root = num::bisect([&](double v) { return res_at(v); }, lo, v3, 1e-14);
    else if (std::isfinite(fhi) && fhi * best < 0.0)
      root = num::bisect([&](double v) { return res_at(v); }, v3, hi, 1e-14);
    else
      throw ReductionFailed(
          "sigma-moment residual " + num::format_g17(best) +
          " has no admissible bracket; refine the value grid");
    v3 = root;
    if (std::abs(sigma_res(v1, v2, v3, w)) > tol)
      throw ReductionFailed("moment polish did not reach tolerance");
  } else {
    sigma_res(v1, v2, v3, w);
  }

  AtomicSlice out;
  for (int c = 0; c < 3; ++c) {
    double vv = c == 0 ? v1 : (c == 1 ? v2 : v3);
    if (w[c] > 1e-15) {
      out.weights.push_back(std::max(w[c], 0.0));
      out.positions.push_back(vv);
    }
  }
  double s = 0.0;
  for (double x : out.weights) s += x;
  for (double& x : out.weights) x /= s;
  return out;
}

// ---------------------------------------------------------------------
// Alternating-strip slicing approximation
// ---------------------------------------------------------------------

namespace {

// Exact integral of a piecewise-linear interpolant over [a, b] with constant
// extension beyond the node range.
double pw_integral(const num::PwLinear& p, double a, double b) {
  if (b <= a) return 0.0;
  const auto& xs = p.xs;
  const auto& ys = p.ys;
  const std::size_t n = xs.size();
  double acc = 0.0;
  // constant tails
  if (a < xs.front()) {
    acc += (std::min(b, xs.front()) - a) * ys.front();
    a = xs.front();
    if (b <= a) return acc;
  }
  if (b > xs.back()) {
    acc += (b - std::max(a, xs.back())) * ys.back();
    b = xs.back();
    if (b <= a) return acc;
  }
  // interior: trapezoid of the linear pieces clipped to [a,b]
  std::size_t i =
      static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), a) -
                               xs.begin());
  if (i == 0) i = 1;
  for (; i < n && xs[i - 1] < b; ++i) {
    double lo = std::max(a, xs[i - 1]), hi = std::min(b, xs[i]);
    if (hi <= lo) continue;
    double h = xs[i] - xs[i - 1];
    double ylo = h > 0 ? ys[i - 1] + (ys[i] - ys[i - 1]) * (lo - xs[i - 1]) / h
                       : ys[i - 1];
    double yhi = h > 0 ? ys[i - 1] + (ys[i] - ys[i - 1]) * (hi - xs[i - 1]) / h
                       : ys[i];
    acc += 0.5 * (ylo + yhi) * (hi - lo);
  }
  return acc;
}

}  // namespace

SliceResult slice_approximation(const model::FluxModel& m,
                                const AtomicYoungMeasure& nu0,
                                const AtomicYoungMeasure& nu1,
                                const SpaceTimeField& beta, int k, int h,
                                const SliceOptions& opts) {
  const SpaceTimeGrid& g = nu0.grid;
  g.require_same_layout(nu1.grid);
  g.require_same_layout(beta.grid);
  if (k < 1 || h < 1) throw Error("slice_approximation: need k >= 1, h >= 1");
  const int nx = g.nx, nt = g.nt;
  const double dt = g.dt(), dx = g.dx();
  const double r = opts.separation_r;

  SpaceTimeField i0 = nu0.moment([](double v) { return v; });
  SpaceTimeField i1 = nu1.moment([](double v) { return v; });
  SpaceTimeField f0 = nu0.moment(m.f);
  SpaceTimeField f1 = nu1.moment(m.f);

  std::vector<double> xc(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i) xc[static_cast<std::size_t>(i)] = g.x_center(i);

  // Per-node interpolants of the moment gap, the beta-weighted gap and the
  // transport velocity.
  std::vector<num::PwLinear> gap(static_cast<std::size_t>(nt) + 1),
      wgap(static_cast<std::size_t>(nt) + 1),
      vel(static_cast<std::size_t>(nt) + 1);
  for (int n = 0; n <= nt; ++n) {
    std::vector<double> d(static_cast<std::size_t>(nx)),
        wd(static_cast<std::size_t>(nx)), vv(static_cast<std::size_t>(nx));
    for (int i = 0; i < nx; ++i) {
      double di = i1.at(n, i) - i0.at(n, i);
      if (di < r)
        throw SeparationViolated(
            "nu1(i) - nu0(i) = " + num::format_g17(di) + " < r at node (" +
            std::to_string(n) + "," + std::to_string(i) + ")");
      double b = beta.at(n, i);
      if (b < -1e-12 || b > 1.0 + 1e-12)
        throw DomainMismatch("beta outside [0,1]");
      d[static_cast<std::size_t>(i)] = di;
      wd[static_cast<std::size_t>(i)] = b * di;
      vv[static_cast<std::size_t>(i)] = (f1.at(n, i) - f0.at(n, i)) / di;
    }
    gap[static_cast<std::size_t>(n)] = num::PwLinear{xc, d};
    wgap[static_cast<std::size_t>(n)] = num::PwLinear{xc, wd};
    vel[static_cast<std::size_t>(n)] = num::PwLinear{xc, vv};
  }

  auto velocity = [&](double t, double x) {
    double s = t / dt;
    int n = std::clamp(static_cast<int>(std::floor(s)), 0, nt - 1);
    double w1 = s - n;
    return (1.0 - w1) * vel[static_cast<std::size_t>(n)](x) +
           w1 * vel[static_cast<std::size_t>(n) + 1](x);
  };

  // Interface curves gamma_j started at j/k for |j| <= hk, advanced by RK4.
  const int n_curves = 2 * h * k + 1;
  SliceResult out;
  out.gamma.assign(static_cast<std::size_t>(nt) + 1,
                   std::vector<double>(static_cast<std::size_t>(n_curves)));
  out.width.assign(
      static_cast<std::size_t>(nt) + 1,
      std::vector<double>(static_cast<std::size_t>(n_curves) - 1));
  for (int j = 0; j < n_curves; ++j)
    out.gamma[0][static_cast<std::size_t>(j)] =
        static_cast<double>(j - h * k) / k;
  for (int n = 0; n < nt; ++n) {
    double t = g.t_node(n);
    for (int j = 0; j < n_curves; ++j) {
      double x = out.gamma[static_cast<std::size_t>(n)]
                          [static_cast<std::size_t>(j)];
      double k1 = velocity(t, x);
      double k2 = velocity(t + 0.5 * dt, x + 0.5 * dt * k1);
      double k3 = velocity(t + 0.5 * dt, x + 0.5 * dt * k2);
      double k4 = velocity(t + dt, x + dt * k3);
      out.gamma[static_cast<std::size_t>(n) + 1][static_cast<std::size_t>(j)] =
          x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    for (int j = 0; j + 1 < n_curves; ++j)
      if (out.gamma[static_cast<std::size_t>(n) + 1]
                   [static_cast<std::size_t>(j) + 1] <=
          out.gamma[static_cast<std::size_t>(n) + 1][static_cast<std::size_t>(j)])
        throw CurveCrossing("interface curves " + std::to_string(j - h * k) +
                            " and " + std::to_string(j + 1 - h * k) +
                            " cross at step " + std::to_string(n + 1));
  }

  // Strip widths: per node and strip, the unique root of the moment balance
  //   int_{gamma_j}^{gamma_j + B} gap = int_{gamma_j}^{gamma_{j+1}} beta*gap.
  for (int n = 0; n <= nt; ++n) {
    const auto& G = gap[static_cast<std::size_t>(n)];
    const auto& W = wgap[static_cast<std::size_t>(n)];
    for (int j = 0; j + 1 < n_curves; ++j) {
      double a = out.gamma[static_cast<std::size_t>(n)]
                          [static_cast<std::size_t>(j)];
      double b = out.gamma[static_cast<std::size_t>(n)]
                          [static_cast<std::size_t>(j) + 1];
      double target = pw_integral(W, a, b);
      auto bal = [&](double B) { return pw_integral(G, a, a + B) - target; };
      double span = b - a;
      double B;
      if (bal(span) <= 0.0)
        B = span;  // beta == 1 degenerate: full-width strip
      else if (bal(0.0) >= 0.0)
        B = 0.0;
      else
        B = num::bisect(bal, 0.0, span, opts.beta_tol);
      out.width[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)] = B;
    }
  }

  // Exact cell-averaged occupancy of the nu1 strips (far field is nu1).
  SpaceTimeField theta(g);
  for (int n = 0; n <= nt; ++n) {
    const auto& gam = out.gamma[static_cast<std::size_t>(n)];
    const auto& wid = out.width[static_cast<std::size_t>(n)];
    for (int i = 0; i < nx; ++i) {
      double xl = g.x_interface(i), xr = g.x_interface(i + 1);
      double covered = 0.0;
      covered += std::max(0.0, std::min(xr, gam.front()) - xl);
      covered += std::max(0.0, xr - std::max(xl, gam.back()));
      for (int j = 0; j + 1 < n_curves; ++j) {
        double a = std::max(xl, gam[static_cast<std::size_t>(j)]);
        double b = std::min(
            xr, gam[static_cast<std::size_t>(j)] +
                    wid[static_cast<std::size_t>(j)]);
        covered += std::max(0.0, b - a);
      }
      theta.at(n, i) = std::clamp(covered / dx, 0.0, 1.0);
    }
  }

  out.mu = mix_measures(nu0, nu1, theta);
  out.G = flux_potential(m, out.mu);
  return out;
}

}  // namespace sclab::young
