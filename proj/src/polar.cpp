#include "nvw/polar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "nvw/errors.hpp"

namespace nvw {

namespace {

double sup_abs(const std::vector<double>& f, double shift = 0.0) {
  double m = 0.0;
  for (double x : f) m = std::max(m, std::abs(x - shift));
  return m;
}

}  // namespace

PolarState PolarState::equilibrium(const Grid1D& g, double psi_inf, double s_inf) {
  PolarState u;
  u.grid = g;
  const int n = g.n();
  u.psi.assign(n, psi_inf);
  u.s.assign(n, s_inf);
  u.phi.assign(n, 0.0);
  u.v.assign(n, 0.0);
  u.omega.assign(n, 0.0);
  u.r.assign(n, 0.0);
  u.psi_inf = psi_inf;
  u.s_inf = s_inf;
  return u;
}

void PolarState::make_compatible(const WaveSpeed& ws) {
  const auto px = derivative(grid, std::span<const double>(psi));
  const auto sx = derivative(grid, std::span<const double>(s));
  for (int i = 0; i < grid.n(); ++i) {
    const double c = ws.c(psi[i]);
    omega[i] = c * px[i];
    r[i] = c * sx[i];
  }
}

void PolarState::check_invariants(double tol) const {
  const std::size_t n = static_cast<std::size_t>(grid.n());
  for (const auto* f : {&psi, &s, &phi, &v, &omega, &r}) {
    if (f->size() != n) throw ConfigError("PolarState: field size does not match grid");
  }
  const double ms = min_s();
  if (!(ms > 0.0)) {
    throw DegeneracyError(fmt::format("order parameter reached s = {} at t = {}", ms, time));
  }
  for (std::size_t i : {std::size_t{0}, std::size_t{1}, n - 2, n - 1}) {
    const double dev = std::max({std::abs(psi[i] - psi_inf), std::abs(s[i] - s_inf),
                                 std::abs(phi[i]), std::abs(v[i]), std::abs(omega[i]),
                                 std::abs(r[i])});
    if (dev > tol) {
      throw DomainError(fmt::format(
          "perturbation reached the truncated boundary at t = {} (deviation {:.3e})", time, dev));
    }
  }
}

double PolarState::min_s() const { return *std::min_element(s.begin(), s.end()); }

double PolarState::w1inf_norm() const {
  double m = 0.0;
  const std::pair<const std::vector<double>*, double> comps[] = {
      {&psi, psi_inf}, {&s, s_inf}, {&phi, 0.0}, {&v, 0.0}, {&omega, 0.0}, {&r, 0.0}};
  for (const auto& [f, shift] : comps) {
    const auto d = derivative(grid, std::span<const double>(*f));
    m = std::max(m, sup_abs(*f, shift) + sup_abs(d));
  }
  return m;
}

PolarState to_polar(const ComplexField& f, const WaveSpeed& ws) {
  const int n = f.grid.n();
  PolarState u = PolarState::equilibrium(f.grid, std::arg(f.far_field), std::abs(f.far_field));
  double prev = std::arg(f.zeta[0]);
  for (int i = 0; i < n; ++i) {
    const cplx z = f.zeta[i];
    const double s = std::abs(z);
    if (!(s > 0.0)) throw DegeneracyError("to_polar: zeta vanishes, polar form undefined");
    double a = std::arg(z);
    a += 2.0 * std::numbers::pi * std::round((prev - a) / (2.0 * std::numbers::pi));
    prev = a;
    u.psi[i] = a;
    u.s[i] = s;
    const cplx q = std::conj(z) * f.zeta_t[i];
    u.phi[i] = q.imag() / (s * s);
    u.v[i] = q.real() / s;
  }
  // unwrapping may shift the whole profile by 2 pi k; anchor at the far field
  const double shift = 2.0 * std::numbers::pi *
                       std::round((u.psi[0] - u.psi_inf) / (2.0 * std::numbers::pi));
  for (double& x : u.psi) x -= shift;
  u.time = f.time;
  u.make_compatible(ws);
  return u;
}

ComplexField to_complex(const PolarState& u) {
  ComplexField f;
  f.grid = u.grid;
  const int n = u.grid.n();
  f.zeta.resize(n);
  f.zeta_t.resize(n);
  for (int i = 0; i < n; ++i) {
    const cplx e = std::polar(1.0, u.psi[i]);
    f.zeta[i] = u.s[i] * e;
    f.zeta_t[i] = (u.v[i] + cplx(0.0, 1.0) * u.s[i] * u.phi[i]) * e;
  }
  f.far_field = std::polar(u.s_inf, u.psi_inf);
  f.time = u.time;
  return f;
}

double w1inf_distance(const PolarState& a, const PolarState& b) {
  double m = 0.0;
  const std::pair<const std::vector<double>*, const std::vector<double>*> comps[] = {
      {&a.psi, &b.psi}, {&a.s, &b.s},         {&a.phi, &b.phi},
      {&a.v, &b.v},     {&a.omega, &b.omega}, {&a.r, &b.r}};
  std::vector<double> d(a.psi.size());
  for (const auto& [x, y] : comps) {
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = (*x)[i] - (*y)[i];
    const auto dd = derivative(a.grid, std::span<const double>(d));
    m = std::max(m, sup_abs(d) + sup_abs(dd));
  }
  return m;
}

}  // namespace nvw
