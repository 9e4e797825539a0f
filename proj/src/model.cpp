#include "sclab/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sclab::model {

void FluxModel::finalize(int n_scan) {
  if (!f || !f_prime || !D || !sigma) throw Error("FluxModel: missing callable");
  const double h = 1.0 / n_scan;
  lipschitz_f = 0.0;
  min_D = num::inf;
  max_D = -num::inf;
  max_sigma = 0.0;
  max_abs_dsigma = 0.0;
  critical_points.clear();
  double prev_fp = f_prime(0.0);
  for (int i = 0; i <= n_scan; ++i) {
    double v = i * h;
    double fp = f_prime(v);
    lipschitz_f = std::max(lipschitz_f, std::abs(fp));
    double dv = D(v);
    min_D = std::min(min_D, dv);
    max_D = std::max(max_D, dv);
    max_sigma = std::max(max_sigma, sigma(v));
    if (i > 0) {
      double ds = (sigma(v) - sigma(v - h)) / h;
      max_abs_dsigma = std::max(max_abs_dsigma, std::abs(ds));
      if ((prev_fp > 0.0) != (fp > 0.0) && (prev_fp != 0.0 || fp != 0.0)) {
        // Sign change of f' in (v-h, v): refine by bisection where possible.
        double root;
        if (prev_fp == 0.0) {
          root = v - h;
        } else if (fp == 0.0) {
          root = v;
        } else {
          root = num::bisect(f_prime, v - h, v, 1e-14);
        }
        // an exact zero of f' is seen from both sides; record it once
        if (root > 1e-12 && root < 1.0 - 1e-12 &&
            (critical_points.empty() ||
             std::abs(critical_points.back().v - root) > 1e-12)) {
          critical_points.push_back({root, f(root)});
        }
      }
    }
    prev_fp = fp;
  }
  if (min_D <= 0.0)
    throw Error("FluxModel '" + name + "': diffusion coefficient must be uniformly positive");
}

double FluxModel::min_f_between(double a, double b) const {
  if (a > b) std::swap(a, b);
  double m = std::min(f(a), f(b));
  for (const auto& cp : critical_points)
    if (cp.v > a && cp.v < b) m = std::min(m, cp.fv);
  return m;
}

double FluxModel::max_f_between(double a, double b) const {
  if (a > b) std::swap(a, b);
  double m = std::max(f(a), f(b));
  for (const auto& cp : critical_points)
    if (cp.v > a && cp.v < b) m = std::max(m, cp.fv);
  return m;
}

FluxModel make_model(std::string name, ScalarFn f, ScalarFn f_prime, ScalarFn D,
                     ScalarFn sigma) {
  FluxModel m;
  m.name = std::move(name);
  m.f = std::move(f);
  m.f_prime = std::move(f_prime);
  m.D = std::move(D);
  m.sigma = std::move(sigma);
  m.finalize();
  return m;
}

namespace {
const ScalarFn kOne = [](double) { return 1.0; };
}

FluxModel make_linear_model(double a, double b) {
  return make_model("linear", [a, b](double u) { return a * u + b; },
                    [a](double) { return a; }, kOne, kOne);
}

FluxModel make_quadratic_model() {
  return make_model("quadratic", [](double u) { return u * (1.0 - u); },
                    [](double u) { return 1.0 - 2.0 * u; }, kOne, kOne);
}

FluxModel make_quadratic_selfcond_model() {
  auto q = [](double u) { return u * (1.0 - u); };
  return make_model("quadratic-selfcond", q,
                    [](double u) { return 1.0 - 2.0 * u; }, kOne, q);
}

FluxModel make_cubic_model() {
  return make_model(
      "cubic", [](double u) { return 4.0 * u * u * u - 6.0 * u * u + 3.0 * u; },
      [](double u) { return 12.0 * u * u - 12.0 * u + 3.0; }, kOne, kOne);
}

FluxModel make_tabulated_model(const std::vector<double>& v,
                               const std::vector<double>& fv) {
  if (v.size() != fv.size() || v.size() < 2)
    throw Error("tabulated flux: need >= 2 rows of equal length");
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] <= v[i - 1])
      throw Error("tabulated flux: abscissae must be strictly increasing");
  if (std::abs(v.front()) > 1e-12 || std::abs(v.back() - 1.0) > 1e-12)
    throw DomainMismatch("tabulated flux: table must cover [0,1]");

  num::PwLinear table{v, fv};
  // Node derivatives by central differences, then pw-linear interpolation.
  std::vector<double> dv(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    size_t a = (i == 0) ? 0 : i - 1;
    size_t b = (i + 1 == v.size()) ? i : i + 1;
    dv[i] = (fv[b] - fv[a]) / (v[b] - v[a]);
  }
  num::PwLinear dtable{v, dv};
  return make_model("tabulated", [table](double u) { return table(u); },
                    [dtable](double u) { return dtable(u); }, kOne, kOne);
}

FluxModel load_tabulated_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("tabulated flux: cannot open '" + path + "'");
  std::vector<double> v, fv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double a, b;
    if (!(ls >> a)) continue;  // blank / comment line
    if (!(ls >> b))
      throw ConfigError("tabulated flux: expected two columns", lineno);
    v.push_back(a);
    fv.push_back(b);
  }
  return make_tabulated_model(v, fv);
}

FluxModel with_coefficients(FluxModel base, ScalarFn D, ScalarFn sigma,
                            std::string suffix) {
  if (D) base.D = std::move(D);
  if (sigma) base.sigma = std::move(sigma);
  if (!suffix.empty()) base.name += suffix;
  base.finalize();
  return base;
}

FluxModel galilean_shift(const FluxModel& base, double V) {
  FluxModel m = base;
  auto f0 = base.f;
  auto fp0 = base.f_prime;
  m.f = [f0, V](double u) { return f0(u) - V * u; };
  m.f_prime = [fp0, V](double u) { return fp0(u) - V; };
  m.name = base.name + "-shifted";
  m.finalize();
  return m;
}

Envelopes envelopes(const FluxModel& m, int n_grid) {
  std::vector<double> xs(n_grid + 1), ys(n_grid + 1);
  for (int i = 0; i <= n_grid; ++i) {
    xs[i] = static_cast<double>(i) / n_grid;
    ys[i] = m.f(xs[i]);
  }
  return {num::lower_convex_hull(xs, ys), num::upper_concave_hull(xs, ys)};
}

EntropyPair make_entropy_pair(const FluxModel& m, ScalarFn eta,
                              ScalarFn eta_prime, ScalarFn eta_second,
                              int n_nodes) {
  std::vector<double> nodes(n_nodes + 1);
  for (int i = 0; i <= n_nodes; ++i) nodes[i] = static_cast<double>(i) / n_nodes;
  auto ep = eta_prime;
  auto fp = m.f_prime;
  auto integrand = [ep, fp](double v) { return ep(v) * fp(v); };
  auto qtab = num::cumulative_integral(integrand, nodes, 0.0);
  EntropyPair pair;
  pair.eta = std::move(eta);
  pair.eta_prime = std::move(eta_prime);
  pair.eta_second = std::move(eta_second);
  pair.q = [qtab](double v) { return qtab(v); };
  return pair;
}

EntropyPair make_quadratic_entropy(const FluxModel& m, double center) {
  return make_entropy_pair(
      m, [center](double v) { return (v - center) * (v - center); },
      [center](double v) { return 2.0 * (v - center); },
      [](double) { return 2.0; });
}

EntropySampler make_product_sampler(const EntropyPair& pair,
                                    const TestFunction& tf) {
  EntropySampler s;
  auto eta = pair.eta;
  auto q = pair.q;
  s.theta = [eta, tf](double v, double t, double x) { return eta(v) * tf.phi(t, x); };
  s.theta_t = [eta, tf](double v, double t, double x) { return eta(v) * tf.phi_t(t, x); };
  s.theta_x = [eta, tf](double v, double t, double x) { return eta(v) * tf.phi_x(t, x); };
  s.Q = [q, tf](double v, double t, double x) { return q(v) * tf.phi(t, x); };
  s.Q_t = [q, tf](double v, double t, double x) { return q(v) * tf.phi_t(t, x); };
  s.Q_x = [q, tf](double v, double t, double x) { return q(v) * tf.phi_x(t, x); };
  return s;
}

EinsteinEntropy einstein_entropy(const FluxModel& m, double v0, double delta) {
  if (delta <= 0.0 || delta >= 0.5)
    throw Error("einstein_entropy: delta must lie in (0, 1/2)");
  const double lo = delta, hi = 1.0 - delta;
  if (v0 <= lo || v0 >= hi)
    throw DomainMismatch("einstein_entropy: v0 outside the clipped interval");

  auto nodes = num::graded_nodes(lo, hi, 8000, 60, 0.01);
  auto Dfn = m.D;
  auto sfn = m.sigma;
  auto ratio = [Dfn, sfn](double v) {
    double s = sfn(v);
    if (s <= 0.0)
      throw DegenerateConductivity(
          "einstein_entropy: sigma <= 0 at v = " + num::format_g17(v));
    return Dfn(v) / s;
  };
  // h' = antiderivative of D/sigma pinned at v0 (this also scans sigma > 0).
  auto hp = num::cumulative_integral(ratio, nodes, v0);
  // h = antiderivative of h', pinned at v0.
  auto h = num::cumulative_integral([&hp](double v) { return hp(v); }, nodes, v0);
  // g' = h' f', pinned at v0.
  auto fp = m.f_prime;
  auto g = num::cumulative_integral(
      [&hp, fp](double v) { return hp(v) * fp(v); }, nodes, v0);

  EinsteinEntropy out;
  out.delta = delta;
  out.v0 = v0;
  out.pair.eta = [h](double v) { return h(v); };
  out.pair.eta_prime = [hp](double v) { return hp(v); };
  out.pair.eta_second = [ratio](double v) { return ratio(v); };
  out.pair.q = [g](double v) { return g(v); };
  out.g = [g](double v) { return g(v); };
  return out;
}

// ---------------------------------------------------------------------
// Relaxation functional
// ---------------------------------------------------------------------

namespace {

// (a - c)^2 / b with the exact-zero convention for b = 0.
inline double deviation_ratio(double a, double b, double c) {
  double n = (a - c) * (a - c);
  if (b <= 0.0) return n == 0.0 ? 0.0 : num::inf;
  return n / b;
}

struct RGrid {
  std::vector<double> v, fv, sv;
};

RGrid sample_grid(const FluxModel& m, const std::vector<double>& vs) {
  RGrid g;
  g.v = vs;
  g.fv.resize(vs.size());
  g.sv.resize(vs.size());
  for (size_t i = 0; i < vs.size(); ++i) {
    g.fv[i] = m.f(vs[i]);
    g.sv[i] = m.sigma(vs[i]);
  }
  return g;
}

struct RBest {
  double value = num::inf;
  std::array<double, 3> support{0.0, 0.0, 0.0};
  int n_support = 0;
};

// Two-point scan: support {v_i, v_j}, weights fixed by the mean constraint.
void scan_pairs(const RGrid& g, double w, double c, RBest& best) {
  const size_t n = g.v.size();
  for (size_t i = 0; i < n; ++i) {
    if (g.v[i] > w) break;
    for (size_t j = n; j-- > 0;) {
      if (g.v[j] < w) break;
      double a, b;
      if (i == j || g.v[j] - g.v[i] < 1e-15) {
        if (std::abs(g.v[i] - w) > 1e-14) continue;
        a = g.fv[i];
        b = g.sv[i];
      } else {
        double al = (g.v[j] - w) / (g.v[j] - g.v[i]);
        a = al * g.fv[i] + (1.0 - al) * g.fv[j];
        b = al * g.sv[i] + (1.0 - al) * g.sv[j];
      }
      double val = deviation_ratio(a, b, c);
      if (val < best.value) {
        best.value = val;
        best.support = {g.v[i], g.v[j], g.v[j]};
        best.n_support = 2;
      }
    }
  }
}

// Three-point family with fixed support {v1, v2, v3}: one weight degree of
// freedom gamma (the mass on v3); the mean constraint fixes the rest.  The
// objective ((P+Q g)^2)/(R+S g) is minimized in closed form over the
// feasible gamma interval.
void try_triple(double v1, double f1, double s1, double v2, double f2,
                double s2, double v3, double f3, double s3, double w, double c,
                RBest& best) {
  double dv = v2 - v1;
  if (dv < 1e-15) return;
  // Weights as affine functions of the third mass g:
  //   alpha + beta = 1 - g,  alpha v1 + beta v2 = w - g v3
  //    => alpha = (A0 + g (v3 - v2)) / dv,  beta = (B0 - g (v3 - v1)) / dv
  double A0 = v2 - w;
  double B0 = w - v1;
  double glo = 0.0, ghi = 1.0;
  auto clip = [&](double c0, double c1) {
    // require c0 + g c1 >= 0
    if (c1 > 0) glo = std::max(glo, -c0 / c1);
    else if (c1 < 0) ghi = std::min(ghi, -c0 / c1);
    else if (c0 < 0) ghi = -1.0;  // infeasible
  };
  clip(A0, v3 - v2);
  clip(B0, -(v3 - v1));
  if (ghi < glo) return;

  double chord_f = ((v2 - w) * f1 + (w - v1) * f2) / dv;
  double chord_s = ((v2 - w) * s1 + (w - v1) * s2) / dv;
  // nu(f) = chord_f + g * (f3 - lf(v3)), with lf the line through
  // (v1,f1),(v2,f2) evaluated at v3; same structure for sigma.
  double line_f3 = ((v2 - v3) * f1 + (v3 - v1) * f2) / dv;
  double line_s3 = ((v2 - v3) * s1 + (v3 - v1) * s2) / dv;
  double P = chord_f - c, Q = f3 - line_f3;
  double R = chord_s, S = s3 - line_s3;

  auto consider = [&](double g) {
    if (!(g >= glo && g <= ghi)) return;
    double val = deviation_ratio(P + Q * g + c, R + S * g, c);
    if (val < best.value) {
      best.value = val;
      best.support = {v1, v2, v3};
      best.n_support = 3;
    }
  };
  consider(glo);
  consider(ghi);
  if (Q != 0.0) consider(-P / Q);
  if (Q != 0.0 && S != 0.0) consider((S * P - 2.0 * Q * R) / (Q * S));
  else if (Q == 0.0 && S != 0.0 && P != 0.0) {
    // objective P^2/(R+Sg): pushed to the feasible end maximizing R+Sg
    consider(S > 0 ? ghi : glo);
  }
}

void scan_triples(const RGrid& g, double w, double c, RBest& best) {
  const size_t n = g.v.size();
  for (size_t i = 0; i < n; ++i) {
    if (g.v[i] > w) break;
    for (size_t j = n; j-- > 0;) {
      if (g.v[j] < w) break;
      if (g.v[j] - g.v[i] < 1e-15) continue;
      for (size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        try_triple(g.v[i], g.fv[i], g.sv[i], g.v[j], g.fv[j], g.sv[j], g.v[k],
                   g.fv[k], g.sv[k], w, c, best);
      }
    }
  }
}

std::vector<double> strided(const std::vector<double>& vs, int stride,
                            double keep) {
  std::vector<double> out;
  for (size_t i = 0; i < vs.size(); i += static_cast<size_t>(stride))
    out.push_back(vs[i]);
  if (out.back() != vs.back()) out.push_back(vs.back());
  out.push_back(keep);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> local_ladder(double center, double half_width, int n) {
  std::vector<double> out;
  for (int k = -n; k <= n; ++k) {
    double v = center + half_width * k / n;
    if (v >= 0.0 && v <= 1.0) out.push_back(v);
  }
  return out;
}

}  // namespace

double r_fsigma(const FluxModel& m, double w, double c,
                const RSearchOptions& opts) {
  if (w < -1e-12 || w > 1.0 + 1e-12)
    throw DomainMismatch("r_fsigma: mean outside [0,1]");
  w = std::clamp(w, 0.0, 1.0);

  std::vector<double> vs(opts.n_grid + 1);
  for (int i = 0; i <= opts.n_grid; ++i)
    vs[i] = static_cast<double>(i) / opts.n_grid;
  vs.push_back(w);
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());

  RGrid fine = sample_grid(m, vs);
  RBest best;
  scan_pairs(fine, w, c, best);

  RGrid coarse = sample_grid(m, strided(vs, opts.coarse_stride, w));
  scan_triples(coarse, w, c, best);

  if (opts.refine && best.n_support > 0 && std::isfinite(best.value)) {
    double h = static_cast<double>(opts.coarse_stride) / opts.n_grid;
    std::vector<double> lad;
    for (int s = 0; s < 3; ++s) {
      auto part = local_ladder(best.support[static_cast<size_t>(s)], h, 16);
      lad.insert(lad.end(), part.begin(), part.end());
    }
    lad.push_back(w);
    std::sort(lad.begin(), lad.end());
    lad.erase(std::unique(lad.begin(), lad.end()), lad.end());
    RGrid local = sample_grid(m, lad);
    scan_pairs(local, w, c, best);
    scan_triples(local, w, c, best);
  }
  return best.value;
}

double r_closed_const_sigma(const Envelopes& env, double w, double c,
                            double s) {
  if (s <= 0.0) throw Error("r_closed_const_sigma: sigma must be positive");
  double lo = env.lower(w), hi = env.upper(w);
  double d = 0.0;
  if (c < lo) d = lo - c;
  else if (c > hi) d = c - hi;
  return d * d / s;
}

double r_closed_f_equals_sigma(const Envelopes& env, double w, double c) {
  double lo = env.lower(w), hi = env.upper(w);
  if (lo < -1e-12)
    throw Error("r_closed_f_equals_sigma: needs f >= 0 on [0,1]");
  lo = std::max(lo, 0.0);
  double ac = std::abs(c);
  if (ac >= lo && ac <= hi) return 2.0 * (ac - c);
  if (ac > hi) {
    double d = hi - c;
    return hi > 0.0 ? d * d / hi : (d == 0.0 ? 0.0 : num::inf);
  }
  double d = lo - c;
  return lo > 0.0 ? d * d / lo : (d == 0.0 ? 0.0 : num::inf);
}

}  // namespace sclab::model
