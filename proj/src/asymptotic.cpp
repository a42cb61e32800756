#include "nvw/asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>

#include "nvw/diagnostics.hpp"
#include "nvw/errors.hpp"

namespace nvw {

double Bump::operator()(double y) const {
  const double z = (y - center) / width;
  return amplitude * std::exp(-z * z);
}

double Bump::d1(double y) const {
  const double z = (y - center) / width;
  return -2.0 * z / width * amplitude * std::exp(-z * z);
}

double Bump::d2(double y) const {
  const double z = (y - center) / width;
  return (4.0 * z * z - 2.0) / (width * width) * amplitude * std::exp(-z * z);
}

double Bump::radius(double tol) const {
  const double a = std::abs(amplitude);
  if (a <= tol) return 0.0;
  return std::abs(center) + width * std::sqrt(std::log(a / tol) + 1.0);
}

void AsymptoticConfig::validate() const {
  if (!(s0 > 0.0 && s0 < 1.0)) throw ConfigError(fmt::format("asymptotic: s0 = {} not in (0,1)", s0));
  if (!(epsilon >= 0.0)) throw ConfigError("asymptotic: epsilon must be >= 0");
  if (!(u_init.width > 0.0) || !(r_init.width > 0.0)) {
    throw ConfigError("asymptotic: profile widths must be positive");
  }
  if (std::abs(cprime0()) < 1e-12) {
    throw ConfigError(
        fmt::format("asymptotic: c'(psi0) = {} vanishes, the reduction degenerates", cprime0()));
  }
}

PolarState embed(const AsymptoticConfig& cfg, const Grid1D& grid) {
  cfg.validate();
  const double eps = cfg.epsilon;
  const double c0 = cfg.c0();
  PolarState u = PolarState::equilibrium(grid, cfg.psi0, cfg.s0);
  for (int i = 0; i < grid.n(); ++i) {
    const double x = grid.x(i);
    u.psi[i] = cfg.psi0 + eps * cfg.u_init(x);
    u.s[i] = cfg.s0 + eps * cfg.r_init(x);
    u.phi[i] = -c0 * eps * cfg.u_init.d1(x);
    u.v[i] = -c0 * eps * cfg.r_init.d1(x);
    if (!(u.s[i] > 0.0 && u.s[i] < 1.0)) {
      throw ConfigError(fmt::format("embed: s = {} leaves (0,1) at x = {}", u.s[i], x));
    }
  }
  u.make_compatible(cfg.ws);
  return u;
}

SlowFields extract(const PolarState& U, const AsymptoticConfig& cfg, double tau,
                   const Grid1D& frame) {
  const double eps = cfg.epsilon;
  if (!(eps > 0.0)) throw ConfigError("extract: epsilon must be positive");
  const double t_fast = tau / eps;
  if (std::abs(U.time - t_fast) > 1e-9 * std::max(1.0, t_fast)) {
    throw ConfigError(fmt::format("extract: state is at t = {}, slow time {} needs t = {}", U.time,
                                  tau, t_fast));
  }
  const double shift = cfg.c0() * t_fast;
  SlowFields out;
  out.u.resize(frame.n());
  out.rho.resize(frame.n());
  for (int i = 0; i < frame.n(); ++i) {
    const auto st = cubic_stencil(U.grid, frame.x(i) + shift);
    const double psi = st(U.psi);
    out.u[i] = (psi - cfg.psi0) / eps;
    out.rho[i] = st(U.r) / (cfg.ws.c(psi) * eps);
  }
  return out;
}

LagrangianCoefficients lagrangian_coefficients(const AsymptoticConfig& cfg) {
  const double c0 = cfg.c0();
  const double ccp = c0 * cfg.cprime0();
  const double s2 = cfg.s0 * cfg.s0;
  return {s2 * c0, s2 * ccp, c0, ccp};
}

Rescaling rescaling_map(const LagrangianCoefficients& k) {
  if (k.a == 0.0 || k.b == 0.0 || k.d == 0.0) {
    throw ConfigError("rescaling_map: coefficients a, b, d must be nonzero");
  }
  const double scale = std::max({std::abs(k.e * k.a), std::abs(k.d * k.b), 1e-300});
  if (std::abs(k.e * k.a - k.d * k.b) > 1e-12 * scale) {
    throw ConfigError("rescaling_map: e a != d b, no time rescaling reaches the standard system");
  }
  if (!(k.e / k.b > 0.0)) throw ConfigError("rescaling_map: e/b must be positive");
  return {k.b / k.a, std::sqrt(k.e / k.b)};
}

Rescaling rescaling_map(const AsymptoticConfig& cfg) {
  cfg.validate();
  return rescaling_map(lagrangian_coefficients(cfg));
}

ELResiduals discrete_el_residual(const LagrangianCoefficients& k, const SpaceTimeField& uf,
                                 const SpaceTimeField& rf) {
  const auto& u = uf.values;
  const auto& r = rf.values;
  const double ht = uf.h_t, hy = uf.h_y;
  const int K = static_cast<int>(u.size());
  const int N = K > 0 ? static_cast<int>(u[0].size()) : 0;
  if (K < 5 || N < 5 || static_cast<int>(r.size()) != K) {
    throw ConfigError("discrete_el_residual: need matching grids of at least 5x5 nodes");
  }
  // centred-difference Lagrangian at an interior node, with a trial change of
  // one nodal value
  auto lag = [&](int kk, int ii, int pk, int pi, double du, double dr) {
    auto U = [&](int a, int b) { return u[a][b] + ((a == pk && b == pi) ? du : 0.0); };
    auto R = [&](int a, int b) { return r[a][b] + ((a == pk && b == pi) ? dr : 0.0); };
    const double ut = (U(kk + 1, ii) - U(kk - 1, ii)) / (2.0 * ht);
    const double uy = (U(kk, ii + 1) - U(kk, ii - 1)) / (2.0 * hy);
    const double rt = (R(kk + 1, ii) - R(kk - 1, ii)) / (2.0 * ht);
    const double ry = (R(kk, ii + 1) - R(kk, ii - 1)) / (2.0 * hy);
    const double uc = U(kk, ii);
    return k.a * ut * uy + k.b * uc * uy * uy + k.d * rt * ry + k.e * uc * ry * ry;
  };
  auto local_action = [&](int kk, int ii, double du, double dr) {
    const int nb[5][2] = {{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    double s = 0.0;
    for (const auto& o : nb) s += lag(kk + o[0], ii + o[1], kk, ii, du, dr);
    return s * ht * hy;
  };
  // exact for the cubic dependence on a single nodal value
  auto grad = [&](int kk, int ii, bool wrt_u) {
    const double h = 1e-2;
    auto S = [&](double d) { return wrt_u ? local_action(kk, ii, d, 0.0) : local_action(kk, ii, 0.0, d); };
    return (8.0 * (S(h) - S(-h)) - (S(2 * h) - S(-2 * h))) / (12.0 * h);
  };

  ELResiduals out;
  for (int kk = 2; kk < K - 2; ++kk) {
    for (int ii = 2; ii < N - 2; ++ii) {
      const double au = -grad(kk, ii, true) / (ht * hy);
      const double ar = -grad(kk, ii, false) / (ht * hy);
      const double uty = (u[kk + 1][ii + 1] - u[kk + 1][ii - 1] - u[kk - 1][ii + 1] +
                          u[kk - 1][ii - 1]) / (4.0 * ht * hy);
      const double rty = (r[kk + 1][ii + 1] - r[kk + 1][ii - 1] - r[kk - 1][ii + 1] +
                          r[kk - 1][ii - 1]) / (4.0 * ht * hy);
      const double uy = (u[kk][ii + 1] - u[kk][ii - 1]) / (2.0 * hy);
      const double ry = (r[kk][ii + 1] - r[kk][ii - 1]) / (2.0 * hy);
      const double uyy = (u[kk][ii + 1] - 2.0 * u[kk][ii] + u[kk][ii - 1]) / (hy * hy);
      const double ryy = (r[kk][ii + 1] - 2.0 * r[kk][ii] + r[kk][ii - 1]) / (hy * hy);
      const double uc = u[kk][ii];
      const double su = 2.0 * k.a * uty + 2.0 * k.b * (uy * uy + uc * uyy) - k.b * uy * uy -
                        k.e * ry * ry;
      const double sr = 2.0 * k.d * rty + 2.0 * k.e * (uy * ry + uc * ryy);
      const double w = ht * hy;
      out.action_u += au * au * w;
      out.action_r += ar * ar * w;
      out.strong_u += su * su * w;
      out.strong_r += sr * sr * w;
      out.diff_u += (au - su) * (au - su) * w;
      out.diff_r += (ar - sr) * (ar - sr) * w;
    }
  }
  for (double* v : {&out.action_u, &out.action_r, &out.strong_u, &out.strong_r, &out.diff_u,
                    &out.diff_r}) {
    *v = std::sqrt(*v);
  }
  return out;
}

double reduction_error(const AsymptoticConfig& cfg, const PotentialSpec& p, double t_slow,
                       const StudyOptions& opt) {
  cfg.validate();
  if (!p.flat_point || std::abs(*p.flat_point - cfg.s0) > 1e-12) {
    throw ConfigError(fmt::format(
        "asymptotic: potential '{}' must have its flat point at s0 = {}", p.name, cfg.s0));
  }
  if (!(cfg.epsilon > 0.0)) throw ConfigError("asymptotic: epsilon must be positive");
  if (!(t_slow > 0.0)) throw ConfigError("asymptotic: t_slow must be positive");
  const Rescaling rs = rescaling_map(cfg);

  // full system on the embedded data
  const double t_fast = t_slow / cfg.epsilon;
  const double R = std::max(cfg.u_init.radius(1e-13), cfg.r_init.radius(1e-13));
  const double half = cfg.ws.c_max() * t_fast + R + 2.0;
  const int n = static_cast<int>(std::ceil(2.0 * half / opt.dx)) + 1;
  const Grid1D grid(-half, half, n);
  const PolarState U0 = embed(cfg, grid);
  QuasilinearConfig qc;
  qc.cfl = opt.cfl;
  qc.T_local = opt.T_local;
  qc.fixpoint_tol = opt.fixpoint_tol;
  const auto full = evolve(U0, p, cfg.ws, qc, t_fast);

  // reduced system in standard form; (t, x) -> (-t, -x) handles c'(psi0) < 0
  const double T = rs.time_scale * t_slow;
  const bool flip = T < 0.0;
  const double sg = flip ? -1.0 : 1.0;
  const Gauge gauge = flip ? (cfg.gauge == Gauge::left ? Gauge::right : Gauge::left) : cfg.gauge;
  const double Rm = R + 1.0;
  const Bump u0 = cfg.u_init, r0 = cfg.r_init;
  const double rsc = rs.rho_scale;
  const MarkerState m0 = make_markers(
      -Rm, Rm, opt.markers, [&](double y) { return u0(sg * y); },
      [&](double y) { return sg * u0.d1(sg * y); },
      [&](double y) { return rsc * r0.d1(sg * y); }, gauge);
  const auto reduced = evolve(m0, std::abs(T), opt.hs2_dt);
  if (reduced.blowup.broke) {
    throw WavebreakingError(
        fmt::format("reduced system breaks at t* = {} before the comparison time", reduced.blowup.t_star),
        reduced.blowup.t_star);
  }
  const MarkerState& mT = reduced.trajectory.back();
  const double lo = flip ? -mT.x.back() : mT.x.front();
  const double hi = flip ? -mT.x.front() : mT.x.back();
  const Grid1D cmp(lo, hi, opt.compare_points);
  EulerianFields hs = sample_eulerian(mT, flip ? Grid1D(-hi, -lo, opt.compare_points) : cmp);
  if (flip) {
    std::reverse(hs.u.begin(), hs.u.end());
    std::reverse(hs.rho.begin(), hs.rho.end());
  }

  const SlowFields ex = extract(full.final, cfg, t_slow, cmp);
  std::vector<double> sq(cmp.n());
  for (int i = 0; i < cmp.n(); ++i) {
    const double du = ex.u[i] - hs.u[i];
    const double dr = rsc * ex.rho[i] - hs.rho[i];
    sq[i] = du * du + dr * dr;
  }
  return std::sqrt(integrate(cmp, sq));
}

StudyResult convergence_study(const AsymptoticConfig& base, const PotentialSpec& p,
                              const std::vector<double>& epsilons, double t_slow,
                              const StudyOptions& opt) {
  StudyResult res;
  res.epsilons = epsilons;
  res.gauge = gauge_label(base.gauge);
  res.rescaling = rescaling_map(base);
  res.t_slow = t_slow;
  const auto policy = opt.parallel ? std::launch::async : std::launch::deferred;
  std::vector<std::future<double>> jobs;
  for (double eps : epsilons) {
    AsymptoticConfig c = base;
    c.epsilon = eps;
    jobs.push_back(std::async(policy, [c, &p, t_slow, opt] { return reduction_error(c, p, t_slow, opt); }));
  }
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    try {
      res.errors.push_back(jobs[j].get());
    } catch (const std::exception& e) {
      res.errors.push_back(std::numeric_limits<double>::quiet_NaN());
      res.failures.push_back(fmt::format("eps={}: {}", epsilons[j], e.what()));
    }
  }
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t j = 0; j < epsilons.size(); ++j) pairs.emplace_back(epsilons[j], res.errors[j]);
  std::sort(pairs.begin(), pairs.end(), [](auto& a, auto& b) { return a.first > b.first; });
  try {
    res.fitted_order = fit_order(pairs);
    res.order_available = true;
  } catch (const ConfigError&) {
    res.order_available = false;
  }
  return res;
}

std::string study_json(const StudyResult& r) {
  nlohmann::ordered_json j;
  j["epsilons"] = r.epsilons;
  auto errs = nlohmann::json::array();
  for (double e : r.errors) {
    if (std::isfinite(e)) {
      errs.push_back(e);
    } else {
      errs.push_back(nullptr);
    }
  }
  j["errors"] = errs;
  if (r.order_available) {
    j["fitted_order"] = r.fitted_order;
  } else {
    j["fitted_order"] = nullptr;
  }
  j["gauge"] = r.gauge;
  j["rescaling"] = {{"time_scale", r.rescaling.time_scale}, {"rho_scale", r.rescaling.rho_scale}};
  j["t_slow"] = r.t_slow;
  j["failures"] = r.failures;
  return j.dump(2);
}

}  // namespace nvw
