#include "sclab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>

#include "sclab/numerics.hpp"

namespace sclab::grid {

void SpaceTimeField::check_range(double tol) const {
  for (double v : values) {
    if (!(v >= -tol && v <= 1.0 + tol))
      throw DomainMismatch("field value " + num::format_g17(v) +
                           " outside [0,1]");
  }
}

SpaceTimeField sample_initial(const SpaceTimeGrid& g,
                              const std::function<double(double)>& u0) {
  SpaceTimeField f(g);
  for (int i = 0; i < g.nx; ++i) {
    double v = u0(g.x_center(i));
    for (int n = 0; n <= g.nt; ++n) f.at(n, i) = v;
  }
  return f;
}

SpaceTimeField sample_field(const SpaceTimeGrid& g,
                            const std::function<double(double, double)>& u) {
  SpaceTimeField f(g);
  for (int n = 0; n <= g.nt; ++n)
    for (int i = 0; i < g.nx; ++i) f.at(n, i) = u(g.t_node(n), g.x_center(i));
  return f;
}

// ---------------------------------------------------------------------
// Piecewise BV solutions
// ---------------------------------------------------------------------

double Polyline::position(double time) const {
  if (t.empty()) throw Error("Polyline: empty");
  if (time <= t.front()) return x.front();
  if (time >= t.back()) return x.back();
  auto it = std::upper_bound(t.begin(), t.end(), time);
  size_t i = static_cast<size_t>(it - t.begin());
  double s = (time - t[i - 1]) / (t[i] - t[i - 1]);
  return x[i - 1] + s * (x[i] - x[i - 1]);
}

double Polyline::slope(double time) const {
  if (t.size() < 2) throw Error("Polyline: need >= 2 vertices");
  size_t i = 1;
  while (i + 1 < t.size() && time >= t[i]) ++i;
  return (x[i] - x[i - 1]) / (t[i] - t[i - 1]);
}

void PiecewiseBVSolution::validate() const {
  if (region_values.size() != shocks.size() + 1)
    throw Error("PiecewiseBVSolution: need one more region than shocks");
  for (const auto& s : shocks) {
    if (s.t.size() < 2 || s.t.size() != s.x.size())
      throw Error("PiecewiseBVSolution: malformed shock curve");
    if (std::abs(s.t.front()) > 1e-14 || std::abs(s.t.back() - T) > 1e-14)
      throw DomainMismatch("shock curve does not span [0,T]");
    for (size_t i = 1; i < s.t.size(); ++i)
      if (s.t[i] <= s.t[i - 1])
        throw Error("shock curve vertices must be increasing in t");
  }
  // Ordering / crossing check on a fine time ladder (vertices + samples).
  std::set<double> times{0.0, T};
  for (const auto& s : shocks)
    for (double tv : s.t) times.insert(tv);
  for (int k = 1; k < 64; ++k) times.insert(T * k / 64.0);
  for (double tv : times) {
    double prev = -num::inf;
    for (size_t m = 0; m < shocks.size(); ++m) {
      double p = shocks[m].position(tv);
      if (std::abs(p) >= L)
        throw DomainMismatch("shock curve leaves the spatial domain");
      bool interior = tv > 1e-14 && tv < T - 1e-14;
      if (interior ? (p <= prev) : (p < prev - 1e-14))
        throw CurveCrossing("shock curves cross inside the domain");
      prev = p;
    }
  }
}

void PiecewiseBVSolution::validate_rankine_hugoniot(const model::FluxModel& m,
                                                    double tol) const {
  validate();
  for (size_t k = 0; k < shocks.size(); ++k) {
    double ul = region_values[k], ur = region_values[k + 1];
    if (std::abs(ur - ul) < 1e-14)
      throw RankineHugoniotViolation("curve " + std::to_string(k) +
                                     " carries no jump");
    double s_rh = (m.f(ur) - m.f(ul)) / (ur - ul);
    const auto& c = shocks[k];
    for (size_t i = 1; i < c.t.size(); ++i) {
      double s = (c.x[i] - c.x[i - 1]) / (c.t[i] - c.t[i - 1]);
      if (std::abs(s - s_rh) > tol)
        throw RankineHugoniotViolation(
            "curve " + std::to_string(k) + " segment " + std::to_string(i - 1) +
            ": speed " + num::format_g17(s) + " vs RH " + num::format_g17(s_rh));
    }
  }
}

double PiecewiseBVSolution::value_at(double t, double x) const {
  size_t k = 0;
  while (k < shocks.size() && x >= shocks[k].position(t)) ++k;
  return region_values[k];
}

double PiecewiseBVSolution::cell_average(double t, double xl, double xr) const {
  // Breakpoints inside the cell.
  std::vector<double> cuts{xl};
  for (const auto& s : shocks) {
    double p = s.position(t);
    if (p > xl && p < xr) cuts.push_back(p);
  }
  cuts.push_back(xr);
  std::sort(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    acc += value_at(t, mid) * (cuts[i + 1] - cuts[i]);
  }
  return acc / (xr - xl);
}

PiecewiseBVSolution single_shock(const model::FluxModel& m, double T, double L,
                                 double u_left, double u_right, double x0) {
  double s = (m.f(u_right) - m.f(u_left)) / (u_right - u_left);
  PiecewiseBVSolution u;
  u.T = T;
  u.L = L;
  u.region_values = {u_left, u_right};
  u.shocks = {Polyline{{0.0, T}, {x0, x0 + s * T}}};
  u.validate();
  return u;
}

PiecewiseBVSolution staircase_solution(double T, double L,
                                       const std::vector<double>& b,
                                       double b_next) {
  if (b.empty()) throw Error("staircase: need at least one step");
  for (size_t i = 0; i < b.size(); ++i) {
    if (b[i] <= 0.0 || b[i] > 0.5)
      throw DomainMismatch("staircase: steps must lie in (0, 1/2]");
    if (i > 0 && b[i] >= b[i - 1])
      throw Error("staircase: steps must be strictly decreasing");
  }
  if (b_next <= 0.0 || b_next >= b.back())
    throw Error("staircase: b_next must lie in (0, b.back())");

  PiecewiseBVSolution u;
  u.T = T;
  u.L = L;
  u.region_values.push_back(0.5);
  const double b1 = b[0];
  for (size_t i = 0; i < b.size(); ++i) {
    double off_next = (i + 1 < b.size()) ? b[i + 1] : b_next;
    double left0 = T * (b1 - b[i]);
    double right0 = T * (b1 - off_next);
    u.shocks.push_back(Polyline{{0.0, T}, {left0, left0 - b[i] * T}});
    u.shocks.push_back(Polyline{{0.0, T}, {right0, right0 - b[i] * T}});
    u.region_values.push_back(0.5 + b[i]);
    u.region_values.push_back(0.5);
  }
  u.validate();
  return u;
}

SpaceTimeField rasterize(const PiecewiseBVSolution& u, const SpaceTimeGrid& g) {
  u.validate();
  if (u.T != g.T || u.L != g.L)
    throw GridMismatch("rasterize: solution domain differs from grid domain");
  SpaceTimeField f(g);
  for (int n = 0; n <= g.nt; ++n) {
    double t = g.t_node(n);
    for (int i = 0; i < g.nx; ++i) {
      f.at(n, i) = u.cell_average(t, g.x_interface(i), g.x_interface(i + 1));
    }
  }
  return f;
}

// ---------------------------------------------------------------------
// Dual norm and metrics
// ---------------------------------------------------------------------

double du_norm(std::span<const double> u_cells, const SpaceTimeGrid& g,
               double window_halfwidth) {
  if (static_cast<int>(u_cells.size()) != g.nx)
    throw GridMismatch("du_norm: slice size differs from grid");
  double N = window_halfwidth;
  if (N > g.L + 1e-12)
    throw DomainMismatch("du_norm: window exceeds the spatial domain");
  const double dx = g.dx();
  int i0 = 0, i1 = g.nx - 1;
  while (i0 < g.nx && g.x_center(i0) <= -N) ++i0;
  while (i1 >= 0 && g.x_center(i1) >= N) --i1;
  int m = i1 - i0 + 1;
  if (m < 3)
    throw WindowTooSmall("du_norm: window (-" + num::format_g17(N) + ", " +
                         num::format_g17(N) + ") holds fewer than 3 cells");

  // Dirichlet Poisson solve: -psi'' = u with psi = 0 just outside the window.
  std::vector<double> lower(m, -1.0 / (dx * dx)), diag(m, 2.0 / (dx * dx)),
      upper(m, -1.0 / (dx * dx)), rhs(m);
  for (int k = 0; k < m; ++k) rhs[k] = u_cells[static_cast<size_t>(i0 + k)];
  num::thomas_solve(lower, diag, upper, rhs);

  double acc = 0.0;
  double prev = 0.0;
  for (int k = 0; k <= m; ++k) {
    double cur = (k < m) ? rhs[k] : 0.0;
    double grad = (cur - prev) / dx;
    acc += grad * grad * dx;
    prev = cur;
  }
  return std::sqrt(acc);
}

namespace {

double dyadic_wrap(double v) { return v / (1.0 + v); }

int dyadic_top(double L) { return std::max(1, static_cast<int>(std::ceil(L - 1e-12))); }

}  // namespace

MetricReport dist_U(std::span<const double> a, std::span<const double> b,
                    const SpaceTimeGrid& g) {
  if (a.size() != b.size() || static_cast<int>(a.size()) != g.nx)
    throw GridMismatch("dist_U: incompatible slices");
  std::vector<double> diff(a.size());
  for (size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  MetricReport rep;
  int top = dyadic_top(g.L);
  for (int N = 1; N <= top; ++N) {
    double win = std::min(static_cast<double>(N), g.L);
    double nrm = du_norm(diff, g, win);
    rep.value += std::pow(2.0, -N) * dyadic_wrap(nrm);
  }
  rep.truncation_error = std::pow(2.0, -top);
  return rep;
}

MetricReport dist_scrU(const SpaceTimeField& a, const SpaceTimeField& b) {
  a.grid.require_same_layout(b.grid);
  MetricReport rep;
  for (int n = 0; n <= a.grid.nt; ++n) {
    MetricReport r = dist_U(a.slice(n), b.slice(n), a.grid);
    rep.value = std::max(rep.value, r.value);
    rep.truncation_error = r.truncation_error;
  }
  return rep;
}

MetricReport dist_X(const SpaceTimeField& a, const SpaceTimeField& b) {
  a.grid.require_same_layout(b.grid);
  const auto& g = a.grid;
  MetricReport rep = dist_scrU(a, b);
  int top = dyadic_top(g.L);
  for (int N = 1; N <= top; ++N) {
    double win = std::min(static_cast<double>(N), g.L);
    // Trapezoid in t of the windowed L1 distance of the slices.
    double acc = 0.0;
    for (int n = 0; n <= g.nt; ++n) {
      double l1 = 0.0;
      for (int i = 0; i < g.nx; ++i) {
        if (std::abs(g.x_center(i)) < win)
          l1 += std::abs(a.at(n, i) - b.at(n, i)) * g.dx();
      }
      double w = (n == 0 || n == g.nt) ? 0.5 : 1.0;
      acc += w * l1 * g.dt();
    }
    rep.value += std::pow(2.0, -N) * acc;
  }
  return rep;
}

std::vector<double> box_mollify(std::span<const double> u, int m) {
  if (m <= 0) return {u.begin(), u.end()};
  const int n = static_cast<int>(u.size());
  std::vector<double> out(static_cast<size_t>(n));
  const double w = 1.0 / (2 * m + 1);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = -m; k <= m; ++k) {
      int j = std::clamp(i + k, 0, n - 1);
      acc += u[static_cast<size_t>(j)];
    }
    out[static_cast<size_t>(i)] = acc * w;
  }
  return out;
}

// ---------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------

void write_csv(const SpaceTimeField& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: force LF endings
  if (!out) throw Error("write_csv: cannot open '" + path + "'");
  out << "t,x,u\n";
  for (int n = 0; n <= f.grid.nt; ++n)
    for (int i = 0; i < f.grid.nx; ++i)
      out << num::format_g17(f.grid.t_node(n)) << ','
          << num::format_g17(f.grid.x_center(i)) << ','
          << num::format_g17(f.at(n, i)) << '\n';
}

SpaceTimeField read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("read_csv: cannot open '" + path + "'");
  std::string header;
  std::getline(in, header);
  std::vector<double> ts, xs, us;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double t, x, u;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &x, &u) != 3)
      throw Error("read_csv: malformed row '" + line + "'");
    ts.push_back(t);
    xs.push_back(x);
    us.push_back(u);
  }
  std::set<double> tset(ts.begin(), ts.end()), xset(xs.begin(), xs.end());
  SpaceTimeGrid g;
  g.nt = static_cast<int>(tset.size()) - 1;
  g.nx = static_cast<int>(xset.size());
  if (g.nt < 1 || g.nx < 1) throw Error("read_csv: degenerate grid");
  g.T = *tset.rbegin();
  double x0 = *xset.begin(), x1 = *std::next(xset.begin());
  double dx = x1 - x0;
  g.L = -(x0 - 0.5 * dx);
  SpaceTimeField f(g);
  if (us.size() != f.values.size()) throw Error("read_csv: incomplete table");
  std::map<double, int> tindex, xindex;
  int k = 0;
  for (double t : tset) tindex[t] = k++;
  k = 0;
  for (double x : xset) xindex[x] = k++;
  for (size_t r = 0; r < us.size(); ++r)
    f.at(tindex[ts[r]], xindex[xs[r]]) = us[r];
  return f;
}

void write_binary(const SpaceTimeField& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("write_binary: cannot open '" + path + "'");
  int64_t nt = f.grid.nt, nx = f.grid.nx;
  double T = f.grid.T, L = f.grid.L;
  out.write(reinterpret_cast<const char*>(&nt), 8);
  out.write(reinterpret_cast<const char*>(&nx), 8);
  out.write(reinterpret_cast<const char*>(&T), 8);
  out.write(reinterpret_cast<const char*>(&L), 8);
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * 8));
}

SpaceTimeField read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("read_binary: cannot open '" + path + "'");
  int64_t nt = 0, nx = 0;
  double T = 0, L = 0;
  in.read(reinterpret_cast<char*>(&nt), 8);
  in.read(reinterpret_cast<char*>(&nx), 8);
  in.read(reinterpret_cast<char*>(&T), 8);
  in.read(reinterpret_cast<char*>(&L), 8);
  if (!in || nt < 1 || nx < 1 || nt > (1 << 26) || nx > (1 << 26))
    throw Error("read_binary: malformed header");
  SpaceTimeGrid g;
  g.nt = static_cast<int>(nt);
  g.nx = static_cast<int>(nx);
  g.T = T;
  g.L = L;
  SpaceTimeField f(g);
  in.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * 8));
  if (!in) throw Error("read_binary: truncated payload");
  return f;
}

}  // namespace sclab::grid
