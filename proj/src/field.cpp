#include "nvw/field.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "nvw/errors.hpp"

namespace nvw {

Grid1D::Grid1D(double x_min, double x_max, int n)
    : x_min_(x_min), x_max_(x_max), n_(n) {
  if (n < kMinGridNodes) {
    throw ConfigError(fmt::format("grid.n must be >= {}, got {}", kMinGridNodes, n));
  }
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw ConfigError(fmt::format("grid: need x_min < x_max, got [{}, {}]", x_min, x_max));
  }
  dx_ = (x_max - x_min) / (n - 1);
}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> xs(n_);
  for (int i = 0; i < n_; ++i) xs[i] = x(i);
  return xs;
}

bool Grid1D::contains(double x) const {
  const double tol = 1e-12 * dx_;
  return x >= x_min_ - tol && x <= x_max_ + tol;
}

namespace {

template <class T>
T interpolate_impl(const Grid1D& g, std::span<const T> f, double x) {
  return cubic_stencil(g, x)(f);
}

// Integral from x_min to x of the piecewise-linear interpolant.
template <class T>
T primitive(const Grid1D& g, std::span<const T> f, double x) {
  const int n = g.n();
  const double dx = g.dx();
  const double u = std::clamp((x - g.x_min()) / dx, 0.0, static_cast<double>(n - 1));
  const int i = std::min(static_cast<int>(std::floor(u)), n - 2);
  T acc{};
  for (int k = 0; k < i; ++k) acc += 0.5 * dx * (f[k] + f[k + 1]);
  const double t = u - i;
  acc += dx * (t * f[i] + 0.5 * t * t * (f[i + 1] - f[i]));
  return acc;
}

template <class T>
T integrate_impl(const Grid1D& g, std::span<const T> f, double a, double b) {
  if (a > b) throw DomainError(fmt::format("integrate: reversed bounds [{}, {}]", a, b));
  if (!g.contains(a) || !g.contains(b)) {
    throw DomainError(fmt::format("integrate: [{}, {}] not inside [{}, {}]", a, b,
                                  g.x_min(), g.x_max()));
  }
  return primitive(g, f, b) - primitive(g, f, a);
}

template <class T>
std::vector<T> derivative_impl(const Grid1D& g, std::span<const T> f) {
  const int n = g.n();
  const double inv2 = 1.0 / (2.0 * g.dx());
  std::vector<T> d(n);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2;
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv2;
  for (int i = 1; i < n - 1; ++i) d[i] = (f[i + 1] - f[i - 1]) * inv2;
  return d;
}

double l2_abs(const Grid1D& g, std::span<const cplx> f) {
  std::vector<double> sq(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) sq[i] = std::norm(f[i]);
  return std::sqrt(integrate(g, sq));
}

double sup_abs(std::span<const cplx> f) {
  double m = 0.0;
  for (const auto& z : f) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

CubicStencil cubic_stencil(const Grid1D& g, double x) {
  if (!g.contains(x)) {
    throw DomainError(fmt::format("interpolate: x={} outside [{}, {}]", x, g.x_min(), g.x_max()));
  }
  const int n = g.n();
  const double u = (x - g.x_min()) / g.dx();
  const double r = std::round(u);
  CubicStencil st;
  if (std::abs(u - r) < 1e-12) {
    // exact node hit: single unit weight
    const int i = std::clamp(static_cast<int>(r), 0, n - 1);
    st.j = std::min(i, n - 4);
    st.w[0] = st.w[1] = st.w[2] = st.w[3] = 0.0;
    st.w[i - st.j] = 1.0;
    return st;
  }
  st.j = std::clamp(static_cast<int>(std::floor(u)) - 1, 0, n - 4);
  const double t = u - st.j;  // position in stencil units, nodes at 0..3
  st.w[0] = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
  st.w[1] = t * (t - 2.0) * (t - 3.0) / 2.0;
  st.w[2] = -t * (t - 1.0) * (t - 3.0) / 2.0;
  st.w[3] = t * (t - 1.0) * (t - 2.0) / 6.0;
  return st;
}

double interpolate(const Grid1D& g, std::span<const double> f, double x) {
  return interpolate_impl(g, f, x);
}
cplx interpolate(const Grid1D& g, std::span<const cplx> f, double x) {
  return interpolate_impl(g, f, x);
}

double integrate(const Grid1D& g, std::span<const double> f, double a, double b) {
  return integrate_impl(g, f, a, b);
}
cplx integrate(const Grid1D& g, std::span<const cplx> f, double a, double b) {
  return integrate_impl(g, f, a, b);
}

double integrate(const Grid1D& g, std::span<const double> f) {
  double acc = 0.0;
  for (int k = 0; k + 1 < g.n(); ++k) acc += 0.5 * g.dx() * (f[k] + f[k + 1]);
  return acc;
}

std::vector<double> derivative(const Grid1D& g, std::span<const double> f) {
  return derivative_impl(g, f);
}
std::vector<cplx> derivative(const Grid1D& g, std::span<const cplx> f) {
  return derivative_impl(g, f);
}

void ComplexField::check_invariants(double tol) const {
  const int n = grid.n();
  if (static_cast<int>(zeta.size()) != n || static_cast<int>(zeta_t.size()) != n) {
    throw ConfigError("ComplexField: sample count does not match grid");
  }
  if (std::abs(zeta.front() - far_field) > tol || std::abs(zeta.back() - far_field) > tol) {
    throw DomainError(fmt::format(
        "perturbation reached the truncated boundary at t={} (|zeta-zeta*| = {:.3e}, {:.3e})",
        time, std::abs(zeta.front() - far_field), std::abs(zeta.back() - far_field)));
  }
  if (!(std::abs(far_field) < 1.0)) throw ConfigError("far-field |zeta*| must be < 1");
  const double sup = sup_abs(zeta);
  if (!(sup < 1.0)) throw BudgetError(fmt::format("sup|zeta| = {} >= 1 at t={}", sup, time));
}

StateNorms norms(const ComplexField& f) {
  StateNorms out;
  const auto& g = f.grid;
  std::vector<cplx> pert(f.zeta.size());
  for (std::size_t i = 0; i < pert.size(); ++i) pert[i] = f.zeta[i] - f.far_field;
  const auto zx = derivative(g, std::span<const cplx>(f.zeta));
  out.sup_zeta = sup_abs(f.zeta);
  out.h1_dist = l2_abs(g, pert) + l2_abs(g, zx);
  out.sup_zeta_t = sup_abs(f.zeta_t);
  out.l2_zeta_t = l2_abs(g, f.zeta_t);
  return out;
}

StateNorms norms(const ComplexField& f, const PotentialSpec& p) {
  StateNorms out = norms(f);
  std::vector<double> w(f.zeta.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = p(std::abs(f.zeta[i]));
  out.w0_mass = integrate(f.grid, w);
  return out;
}

double metric_distance(const ComplexField& a, const ComplexField& b, const PotentialSpec& p) {
  const auto& g = a.grid;
  const std::size_t n = a.zeta.size();
  std::vector<cplx> dz(n), dt(n);
  std::vector<double> dw(n);
  for (std::size_t i = 0; i < n; ++i) {
    dz[i] = a.zeta[i] - b.zeta[i];
    dt[i] = a.zeta_t[i] - b.zeta_t[i];
    dw[i] = std::abs(p(std::abs(a.zeta[i])) - p(std::abs(b.zeta[i])));
  }
  const auto dzx = derivative(g, std::span<const cplx>(dz));
  return sup_abs(dz) + sup_abs(dzx) + l2_abs(g, dz) + l2_abs(g, dzx) + sup_abs(dt) +
         l2_abs(g, dt) + integrate(g, dw);
}

std::string fmt_num(double v) { return fmt::format("{:.17g}", v); }

void write_csv(std::ostream& os, const ComplexField& f) {
  os << "x,re_zeta,im_zeta,re_zeta_t,im_zeta_t\n";
  for (int i = 0; i < f.grid.n(); ++i) {
    os << fmt_num(f.grid.x(i)) << ',' << fmt_num(f.zeta[i].real()) << ','
       << fmt_num(f.zeta[i].imag()) << ',' << fmt_num(f.zeta_t[i].real()) << ','
       << fmt_num(f.zeta_t[i].imag()) << '\n';
  }
}

ComplexField read_complex_csv(std::istream& is, cplx far_field) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,re_zeta,im_zeta,re_zeta_t,im_zeta_t", 0) != 0) {
    throw ConfigError("complex field CSV: missing header x,re_zeta,im_zeta,re_zeta_t,im_zeta_t");
  }
  std::vector<double> xs;
  ComplexField f;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    double v[5];
    for (int k = 0; k < 5; ++k) {
      if (!std::getline(ss, cell, ',')) {
        throw ConfigError(fmt::format("complex field CSV: row {} has fewer than 5 columns", row));
      }
      try {
        v[k] = std::stod(cell);
      } catch (const std::exception&) {
        throw ConfigError(fmt::format("complex field CSV: row {} column {} not a number", row, k + 1));
      }
    }
    xs.push_back(v[0]);
    f.zeta.emplace_back(v[1], v[2]);
    f.zeta_t.emplace_back(v[3], v[4]);
  }
  if (xs.size() < static_cast<std::size_t>(kMinGridNodes)) {
    throw ConfigError("complex field CSV: too few rows");
  }
  f.grid = Grid1D(xs.front(), xs.back(), static_cast<int>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i] - f.grid.x(static_cast<int>(i))) > 1e-9 * (1.0 + std::abs(xs[i]))) {
      throw ConfigError(fmt::format("complex field CSV: nodes not uniform at row {}", i + 2));
    }
  }
  f.far_field = far_field;
  return f;
}

}  // namespace nvw
