#include "nvw/hs2.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "nvw/errors.hpp"

namespace nvw {

std::string gauge_label(Gauge g) {
  return g == Gauge::left ? "C(t)=0" : "C(t)=-E/2 (u_t+uu_x->0 at +inf)";
}

Gauge parse_gauge(const std::string& s) {
  if (s == "left") return Gauge::left;
  if (s == "right") return Gauge::right;
  throw ConfigError(fmt::format("unknown gauge '{}' (expected left or right)", s));
}

namespace {

double trapezoid_sum(const std::vector<double>& f, double h) {
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < f.size(); ++j) acc += 0.5 * h * (f[j] + f[j + 1]);
  return acc;
}

}  // namespace

double MarkerState::total_energy() const {
  std::vector<double> e(size());
  for (std::size_t j = 0; j < e.size(); ++j) e[j] = (alpha[j] * alpha[j] + rho[j] * rho[j]) * J[j];
  return trapezoid_sum(e, dxi);
}

double MarkerState::total_mass() const {
  std::vector<double> e(size());
  for (std::size_t j = 0; j < e.size(); ++j) e[j] = rho[j] * J[j];
  return trapezoid_sum(e, dxi);
}

MarkerState make_markers(double a, double b, int count, const std::function<double(double)>& u,
                         const std::function<double(double)>& ux,
                         const std::function<double(double)>& rho, Gauge gauge) {
  if (count < 2 || !(b > a)) throw ConfigError("make_markers: need count >= 2 and a < b");
  MarkerState m;
  m.dxi = (b - a) / (count - 1);
  m.gauge = gauge;
  for (int j = 0; j < count; ++j) {
    const double xi = a + j * m.dxi;
    m.xi.push_back(xi);
    m.x.push_back(xi);
    m.u.push_back(u(xi));
    m.alpha.push_back(ux(xi));
    m.rho.push_back(rho(xi));
    m.J.push_back(1.0);
  }
  return m;
}

MarkerRates marker_rhs(const MarkerState& m) {
  const std::size_t n = m.size();
  MarkerRates d;
  d.x = m.u;
  d.u.resize(n);
  d.alpha.resize(n);
  d.rho.resize(n);
  d.J.resize(n);
  std::vector<double> e(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!(m.J[j] > 0.0)) {
      throw WavebreakingError(
          fmt::format("Jacobian J = {} <= 0 at marker {} (t = {})", m.J[j], j, m.time), m.time);
    }
    const double a = m.alpha[j], r = m.rho[j];
    e[j] = (a * a + r * r) * m.J[j];
    d.alpha[j] = 0.5 * r * r - 0.5 * a * a;
    d.rho[j] = -a * r;
    d.J[j] = a * m.J[j];
  }
  double Q = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j > 0) Q += 0.5 * m.dxi * (e[j - 1] + e[j]);
    d.u[j] = 0.5 * Q;
  }
  if (m.gauge == Gauge::right) {
    for (auto& du : d.u) du -= 0.5 * Q;
  }
  return d;
}

namespace {

MarkerState axpy(const MarkerState& m, const MarkerRates& d, double h) {
  MarkerState o = m;
  for (std::size_t j = 0; j < m.size(); ++j) {
    o.x[j] += h * d.x[j];
    o.u[j] += h * d.u[j];
    o.alpha[j] += h * d.alpha[j];
    o.rho[j] += h * d.rho[j];
    o.J[j] += h * d.J[j];
  }
  o.time += h;
  return o;
}

MarkerState rk4_step(const MarkerState& m, double h) {
  const auto k1 = marker_rhs(m);
  const auto k2 = marker_rhs(axpy(m, k1, 0.5 * h));
  const auto k3 = marker_rhs(axpy(m, k2, 0.5 * h));
  const auto k4 = marker_rhs(axpy(m, k3, h));
  MarkerState o = m;
  auto comb = [h](double y, double a, double b, double c, double d) {
    return y + h / 6.0 * (a + 2.0 * b + 2.0 * c + d);
  };
  for (std::size_t j = 0; j < m.size(); ++j) {
    o.x[j] = comb(m.x[j], k1.x[j], k2.x[j], k3.x[j], k4.x[j]);
    o.u[j] = comb(m.u[j], k1.u[j], k2.u[j], k3.u[j], k4.u[j]);
    o.alpha[j] = comb(m.alpha[j], k1.alpha[j], k2.alpha[j], k3.alpha[j], k4.alpha[j]);
    o.rho[j] = comb(m.rho[j], k1.rho[j], k2.rho[j], k3.rho[j], k4.rho[j]);
    o.J[j] = comb(m.J[j], k1.J[j], k2.J[j], k3.J[j], k4.J[j]);
  }
  o.time = m.time + h;
  return o;
}

}  // namespace

HS2Result evolve(const MarkerState& m0, double t_final, double dt, int record_every) {
  if (!(dt > 0.0) || !(t_final >= 0.0)) throw ConfigError("hs2: need dt > 0 and t_final >= 0");
  if (m0.size() < 2) throw ConfigError("hs2: need at least two markers");
  double amax = 0.0;
  for (double a : m0.alpha) amax = std::max(amax, std::abs(a));
  if (dt * amax > 0.1) {
    throw ConfigError(
        fmt::format("hs2: dt * max|alpha0| = {} exceeds 0.1; reduce dt", dt * amax));
  }
  const long N = static_cast<long>(std::ceil(t_final / dt - 1e-9));
  const double h = N > 0 ? t_final / N : dt;

  HS2Result res;
  res.trajectory.push_back(m0);
  MarkerState cur = m0;
  const double t0 = m0.time;
  for (long k = 1; k <= N; ++k) {
    MarkerState next = rk4_step(cur, h);
    next.time = t0 + k * h;
    std::size_t worst = 0;
    for (std::size_t j = 1; j < next.size(); ++j) {
      if (next.alpha[j] < next.alpha[worst]) worst = j;
    }
    const double minJ = *std::min_element(next.J.begin(), next.J.end());
    if (!(minJ > 0.0) || h * -next.alpha[worst] > 0.5 || !std::isfinite(next.alpha[worst])) {
      // last trustworthy state is `cur` if the step itself overshot
      const MarkerState& base = (minJ > 0.0 && std::isfinite(next.alpha[worst])) ? next : cur;
      std::size_t w = 0;
      for (std::size_t j = 1; j < base.size(); ++j) {
        if (base.alpha[j] < base.alpha[w]) w = j;
      }
      res.blowup.broke = true;
      res.blowup.marker_index = static_cast<int>(w);
      res.blowup.t_star = base.alpha[w] < 0.0 ? base.time - 2.0 / base.alpha[w] : base.time;
      res.trajectory.push_back(base);
      return res;
    }
    cur = std::move(next);
    if ((record_every > 0 && k % record_every == 0) || k == N) res.trajectory.push_back(cur);
  }
  if (N == 0) res.trajectory.push_back(cur);
  return res;
}

double hermite_eval(const std::vector<double>& x, const std::vector<double>& f,
                    const std::vector<double>& df, double q) {
  const std::size_t n = x.size();
  const double tol = 1e-12 * std::max(1.0, std::abs(x.back() - x.front()));
  if (q < x.front() - tol || q > x.back() + tol) {
    throw DomainError(fmt::format("hermite_eval: {} outside marker range [{}, {}]", q, x.front(),
                                  x.back()));
  }
  std::size_t j = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), q) - x.begin());
  j = std::clamp<std::size_t>(j, 1, n - 1) - 1;
  const double h = x[j + 1] - x[j];
  if (!(h > 0.0)) return f[j];
  const double sec = (f[j + 1] - f[j]) / h;
  double d0 = df[j], d1 = df[j + 1];
  auto same_sign = [](double a, double b) { return (a > 0.0 && b > 0.0) || (a < 0.0 && b < 0.0); };
  const double prev = j > 0 ? (f[j] - f[j - 1]) / (x[j] - x[j - 1]) : sec;
  const double next = j + 2 < n ? (f[j + 2] - f[j + 1]) / (x[j + 2] - x[j + 1]) : sec;
  if (same_sign(prev, sec) && same_sign(sec, next)) {
    // Fritsch-Carlson on a strictly monotone stretch
    double a = d0 / sec, b = d1 / sec;
    a = std::max(a, 0.0);
    b = std::max(b, 0.0);
    const double rr = a * a + b * b;
    if (rr > 9.0) {
      const double tau = 3.0 / std::sqrt(rr);
      a *= tau;
      b *= tau;
    }
    d0 = a * sec;
    d1 = b * sec;
  }
  const double t = (q - x[j]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * f[j] + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * f[j + 1] +
         (t3 - t2) * h * d1;
}

EulerianFields sample_eulerian(const MarkerState& m, const Grid1D& grid) {
  const std::size_t n = m.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (!(m.J[j] > 0.0)) {
      throw WavebreakingError(fmt::format("sample_eulerian: J <= 0 at marker {}", j), m.time);
    }
  }
  const double tol = 1e-12 * std::max(1.0, grid.x_max() - grid.x_min());
  if (grid.x_min() < m.x.front() - tol || grid.x_max() > m.x.back() + tol) {
    throw DomainError(fmt::format("sample_eulerian: markers cover [{}, {}], grid needs [{}, {}]",
                                  m.x.front(), m.x.back(), grid.x_min(), grid.x_max()));
  }
  std::vector<double> M(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) {
    M[j] = M[j - 1] + 0.5 * m.dxi * (m.rho[j - 1] * m.J[j - 1] + m.rho[j] * m.J[j]);
  }
  EulerianFields out;
  const int gn = grid.n();
  out.u.resize(gn);
  out.rho.resize(gn);
  auto mass = [&](double q) { return hermite_eval(m.x, M, m.rho, q); };
  std::vector<double> Mh(gn + 1);  // at cell faces x_{i-1/2}, clamped to the grid ends
  for (int i = 0; i <= gn; ++i) {
    const double xf = std::clamp(grid.x_min() + (i - 0.5) * grid.dx(), grid.x_min(), grid.x_max());
    Mh[i] = mass(xf);
  }
  for (int i = 0; i < gn; ++i) {
    out.u[i] = hermite_eval(m.x, m.u, m.alpha, grid.x(i));
    const double w = (i == 0 || i == gn - 1) ? 0.5 * grid.dx() : grid.dx();
    out.rho[i] = (Mh[i + 1] - Mh[i]) / w;
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const std::vector<MarkerState>& traj) {
  os << "t,xi,x,u,alpha,rho,J\n";
  for (const auto& m : traj) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      os << fmt_num(m.time) << ',' << fmt_num(m.xi[j]) << ',' << fmt_num(m.x[j]) << ','
         << fmt_num(m.u[j]) << ',' << fmt_num(m.alpha[j]) << ',' << fmt_num(m.rho[j]) << ','
         << fmt_num(m.J[j]) << '\n';
    }
  }
}

std::string blowup_json(const BlowupReport& b) {
  nlohmann::ordered_json j;
  j["broke"] = b.broke;
  j["t_star"] = b.t_star;
  j["marker_index"] = b.marker_index;
  return j.dump(2);
}

}  // namespace nvw
