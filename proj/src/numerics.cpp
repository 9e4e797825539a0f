#include "sclab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sclab::num {

namespace {

struct SimpsonFrame {
  double a, b, fa, fm, fb, whole;
  int depth;
};

double simpson_rule(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

}  // namespace

QuadResult adaptive_simpson(const std::function<double(double)>& fn, double a,
                            double b, double tol, int max_depth) {
  QuadResult out;
  if (a == b) return out;
  double m = 0.5 * (a + b);
  double fa = fn(a), fm = fn(m), fb = fn(b);
  out.evals = 3;
  std::vector<SimpsonFrame> stack;
  stack.push_back({a, b, fa, fm, fb, simpson_rule(a, b, fa, fm, fb), 0});
  while (!stack.empty()) {
    SimpsonFrame fr = stack.back();
    stack.pop_back();
    double mid = 0.5 * (fr.a + fr.b);
    double lm = 0.5 * (fr.a + mid), rm = 0.5 * (mid + fr.b);
    double flm = fn(lm), frm = fn(rm);
    out.evals += 2;
    double left = simpson_rule(fr.a, mid, fr.fa, flm, fr.fm);
    double right = simpson_rule(mid, fr.b, fr.fm, frm, fr.fb);
    double defect = left + right - fr.whole;
    // Local acceptance with tolerance pro-rated by interval length.
    double local_tol = tol * (fr.b - fr.a) / (b - a);
    if (fr.depth >= max_depth || std::abs(defect) <= 15.0 * local_tol) {
      out.value += left + right + defect / 15.0;
      out.error_estimate += std::abs(defect) / 15.0;
    } else {
      stack.push_back({fr.a, mid, fr.fa, flm, fr.fm, left, fr.depth + 1});
      stack.push_back({mid, fr.b, fr.fm, frm, fr.fb, right, fr.depth + 1});
    }
  }
  return out;
}

double composite_simpson(const std::function<double(double)>& fn, double a,
                         double b, int panels) {
  if (panels < 1) panels = 1;
  double h = (b - a) / panels;
  double acc = 0.0;
  for (int k = 0; k < panels; ++k) {
    double x0 = a + k * h, x1 = x0 + h;
    acc += simpson_rule(x0, x1, fn(x0), fn(0.5 * (x0 + x1)), fn(x1));
  }
  return acc;
}

std::pair<double, double> golden_section_min(
    const std::function<double(double)>& fn, double lo, double hi, double xtol,
    int max_iter) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);  // 0.618...
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = fn(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = fn(x2);
    }
  }
  double xm = 0.5 * (a + b);
  return {xm, fn(xm)};
}

double bisect(const std::function<double(double)>& fn, double lo, double hi,
              double xtol, int max_iter) {
  double flo = fn(lo), fhi = fn(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw Error("bisect: no sign change on the given bracket");
  for (int it = 0; it < max_iter && (hi - lo) > xtol; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = fn(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void thomas_solve(std::vector<double>& lower, std::vector<double>& diag,
                  std::vector<double>& upper, std::vector<double>& rhs) {
  const size_t n = diag.size();
  if (n == 0) return;
  for (size_t i = 1; i < n; ++i) {
    double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (size_t i = n - 1; i-- > 0;) {
    rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
  }
}

void cyclic_thomas_solve(std::vector<double> lower, std::vector<double> diag,
                         std::vector<double> upper, double corner_lo,
                         double corner_hi, std::vector<double>& rhs) {
  // Sherman-Morrison reduction: A = B + p q^T with B tridiagonal.
  // corner_lo = A[n-1][0], corner_hi = A[0][n-1].
  const size_t n = diag.size();
  if (n < 3) throw Error("cyclic_thomas_solve: need n >= 3");
  const double gamma = -diag[0];
  std::vector<double> d = diag;
  d[0] -= gamma;
  d[n - 1] -= corner_hi * corner_lo / gamma;
  std::vector<double> p(n, 0.0);
  p[0] = gamma;
  p[n - 1] = corner_lo;
  // q = (1, 0, ..., 0, corner_hi/gamma)
  std::vector<double> l1 = lower, d1 = d, u1 = upper, y = rhs;
  thomas_solve(l1, d1, u1, y);
  std::vector<double> z = p;
  thomas_solve(lower, d, upper, z);
  double qy = y[0] + corner_hi / gamma * y[n - 1];
  double qz = z[0] + corner_hi / gamma * z[n - 1];
  double fact = qy / (1.0 + qz);
  for (size_t i = 0; i < n; ++i) rhs[i] = y[i] - fact * z[i];
}

double PwLinear::operator()(double x) const {
  if (xs.empty()) throw Error("PwLinear: empty table");
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  size_t i = static_cast<size_t>(it - xs.begin());
  double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

namespace {

// Andrew's monotone chain restricted to one side.  `keep_below` builds the
// lower (convex) chain, otherwise the upper (concave) one.
PwLinear half_hull(const std::vector<double>& xs, const std::vector<double>& ys,
                   bool keep_below) {
  const size_t n = xs.size();
  if (n != ys.size() || n < 2) throw Error("hull: need >= 2 samples");
  std::vector<size_t> st;
  st.reserve(n);
  auto cross = [&](size_t a, size_t b, size_t c) {
    return (xs[b] - xs[a]) * (ys[c] - ys[a]) - (ys[b] - ys[a]) * (xs[c] - xs[a]);
  };
  for (size_t i = 0; i < n; ++i) {
    while (st.size() >= 2) {
      double cr = cross(st[st.size() - 2], st[st.size() - 1], i);
      bool pop = keep_below ? (cr <= 0.0) : (cr >= 0.0);
      if (!pop) break;
      st.pop_back();
    }
    st.push_back(i);
  }
  PwLinear out;
  out.xs.reserve(st.size());
  out.ys.reserve(st.size());
  for (size_t i : st) {
    out.xs.push_back(xs[i]);
    out.ys.push_back(ys[i]);
  }
  return out;
}

}  // namespace

PwLinear lower_convex_hull(const std::vector<double>& xs,
                           const std::vector<double>& ys) {
  return half_hull(xs, ys, true);
}

PwLinear upper_concave_hull(const std::vector<double>& xs,
                            const std::vector<double>& ys) {
  return half_hull(xs, ys, false);
}

double CumulativeTable::operator()(double x) const {
  const auto& xs = nodes;
  if (x <= xs.front()) return values.front();
  if (x >= xs.back()) return values.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  size_t i = static_cast<size_t>(it - xs.begin());
  double h = xs[i] - xs[i - 1];
  double t = (x - xs[i - 1]) / h;
  double y0 = values[i - 1], y1 = values[i];
  double m0 = slopes[i - 1] * h, m1 = slopes[i] * h;
  double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
         (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
}

double CumulativeTable::derivative(double x) const {
  PwLinear pl{nodes, slopes};
  return pl(x);
}

CumulativeTable cumulative_integral(const std::function<double(double)>& fn,
                                    const std::vector<double>& nodes,
                                    double x0) {
  if (nodes.size() < 2) throw Error("cumulative_integral: need >= 2 nodes");
  CumulativeTable tab;
  tab.nodes = nodes;
  tab.values.resize(nodes.size());
  tab.slopes.resize(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) tab.slopes[i] = fn(nodes[i]);
  tab.values[0] = 0.0;
  for (size_t i = 1; i < nodes.size(); ++i) {
    double a = nodes[i - 1], b = nodes[i];
    double fm = fn(0.5 * (a + b));
    tab.values[i] =
        tab.values[i - 1] + simpson_rule(a, b, tab.slopes[i - 1], fm, tab.slopes[i]);
  }
  double off = tab(x0);
  for (auto& v : tab.values) v -= off;
  return tab;
}

std::vector<double> graded_nodes(double lo, double hi, int n_bulk, int n_edge,
                                 double edge_width) {
  std::vector<double> nodes;
  double w = std::min(edge_width, 0.25 * (hi - lo));
  double a = lo + w, b = hi - w;
  // Geometric refinement toward `lo`.
  for (int k = n_edge; k >= 1; --k) {
    nodes.push_back(lo + w * std::pow(2.0, -static_cast<double>(k)));
  }
  double h = (b - a) / n_bulk;
  for (int k = 0; k <= n_bulk; ++k) nodes.push_back(a + k * h);
  for (int k = 1; k <= n_edge; ++k) {
    nodes.push_back(hi - w * std::pow(2.0, -static_cast<double>(k)));
  }
  nodes.insert(nodes.begin(), lo);
  nodes.push_back(hi);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("fit_slope: bad input");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace sclab::num
