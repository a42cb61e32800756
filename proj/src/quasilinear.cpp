#include "nvw/quasilinear.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "nvw/diagnostics.hpp"
#include "nvw/errors.hpp"

namespace nvw {

Vec6 rhs_F(const Vec6& U, const PotentialSpec& p, const WaveSpeed& ws) {
  const auto [psi, s, phi, v, omega, r] = U;
  if (!(s > 0.0)) {
    throw DegeneracyError(fmt::format("order parameter s = {} is not positive", s));
  }
  const auto [c, cp] = wave_speed(ws, psi);
  const double q = cp / c;
  return {phi,
          v,
          -(2.0 / s) * (phi * v - omega * r) - q * (r / s) * (r / s),
          s * (phi * phi - omega * omega) + q * omega * r - p.d(1, s),
          q * phi * omega,
          q * phi * r};
}

double PsiHistory::at(double t, double x) const {
  if (psi.empty()) throw ConfigError("PsiHistory: empty");
  const double tol = 1e-12 * std::max(1.0, std::abs(t));
  if (t < t0 - tol || t > t_end() + tol) {
    throw DomainError(fmt::format("PsiHistory: t = {} outside [{}, {}]", t, t0, t_end()));
  }
  const auto st = cubic_stencil(grid, x);
  if (psi.size() == 1) return st(psi[0]);
  const double u = std::clamp((t - t0) / dt, 0.0, static_cast<double>(psi.size() - 1));
  const std::size_t l = std::min(static_cast<std::size_t>(u), psi.size() - 2);
  const double th = u - static_cast<double>(l);
  return (1.0 - th) * st(psi[l]) + th * st(psi[l + 1]);
}

double trace_characteristics(const PsiHistory& h, const WaveSpeed& ws, double t, double x,
                             double tau, int sign) {
  if (tau > t) throw ConfigError("trace_characteristics: need tau <= t");
  if (sign != 1 && sign != -1) throw ConfigError("trace_characteristics: sign must be +1 or -1");
  const double sg = sign;
  double cur = t;
  while (cur > tau) {
    // next breakpoint: the history level strictly below cur, or tau
    const double u = (cur - h.t0) / h.dt;
    double lvl = std::ceil(u - 1e-12) - 1.0;
    double next = std::max(tau, h.t0 + lvl * h.dt);
    if (h.psi.size() == 1) next = tau;
    const double d = cur - next;
    const double xm = x + sg * ws.c(h.at(cur, x)) * 0.5 * d;
    x = x + sg * ws.c(h.at(cur - 0.5 * d, xm)) * d;
    cur = next;
  }
  return x;
}

PolarState transport_step(const PolarState& U, const PolarState& hat_k, const PolarState& hat_k1,
                          const PotentialSpec& p, const WaveSpeed& ws, double dt) {
  const Grid1D& g = U.grid;
  const int n = g.n();
  PolarState out = PolarState::equilibrium(g, U.psi_inf, U.s_inf);
  out.time = U.time + dt;

  for (int i = 1; i < n - 1; ++i) {
    const double x = g.x(i);
    double riem[2][2];  // [family][phi-part, v-part]
    for (int fam = 0; fam < 2; ++fam) {
      const double sg = fam == 0 ? 1.0 : -1.0;
      const double xm = x + sg * ws.c(hat_k1.psi[i]) * 0.5 * dt;
      const auto sm = cubic_stencil(g, xm);
      const double c2 = ws.c(0.5 * (sm(hat_k.psi) + sm(hat_k1.psi)));
      const double xf = x + sg * c2 * dt;
      const double xc = 0.5 * (x + xf);
      const auto sc = cubic_stencil(g, xc);
      const Vec6 Um{0.5 * (sc(hat_k.psi) + sc(hat_k1.psi)), 0.5 * (sc(hat_k.s) + sc(hat_k1.s)),
                    0.5 * (sc(hat_k.phi) + sc(hat_k1.phi)), 0.5 * (sc(hat_k.v) + sc(hat_k1.v)),
                    0.5 * (sc(hat_k.omega) + sc(hat_k1.omega)),
                    0.5 * (sc(hat_k.r) + sc(hat_k1.r))};
      const Vec6 F = rhs_F(Um, p, ws);
      const auto sf = cubic_stencil(g, xf);
      // family 0: phi+omega, v+r along x_+; family 1: phi-omega, v-r along x_-
      riem[fam][0] = sf(U.phi) + sg * sf(U.omega) + dt * (F[2] + sg * F[4]);
      riem[fam][1] = sf(U.v) + sg * sf(U.r) + dt * (F[3] + sg * F[5]);
    }
    out.phi[i] = 0.5 * (riem[0][0] + riem[1][0]);
    out.omega[i] = 0.5 * (riem[0][0] - riem[1][0]);
    out.v[i] = 0.5 * (riem[0][1] + riem[1][1]);
    out.r[i] = 0.5 * (riem[0][1] - riem[1][1]);
    out.psi[i] = U.psi[i] + dt * 0.5 * (hat_k.phi[i] + hat_k1.phi[i]);
    out.s[i] = U.s[i] + dt * 0.5 * (hat_k.v[i] + hat_k1.v[i]);
  }
  return out;
}

double total_energy(const PolarState& u, const PotentialSpec& p, const WaveSpeed& ws) {
  return integrate(u.grid, energy_density_polar(u, p, ws).E);
}

double quasilinear_dt(const Grid1D& g, const WaveSpeed& ws, const QuasilinearConfig& cfg,
                      double t_final) {
  if (!(cfg.cfl > 0.0 && cfg.cfl <= 0.9)) {
    throw ConfigError(fmt::format("quasilinear: cfl = {} must lie in (0, 0.9]", cfg.cfl));
  }
  const double dt_max = cfg.cfl * g.dx() / ws.c_max();
  double dt = cfg.dt > 0.0 ? cfg.dt : dt_max;
  if (dt > dt_max * (1.0 + 1e-12)) {
    throw ConfigError(fmt::format("quasilinear: dt = {} violates CFL {} (max {})", dt, cfg.cfl,
                                  dt_max));
  }
  if (t_final > 0.0) {
    const double steps = std::ceil(t_final / dt - 1e-9);
    dt = t_final / steps;
  }
  return dt;
}

namespace {

enum class Trip { none, energy, norm, degenerate };

struct Budgets {
  double E_prime;
  double L_prime;
  const PotentialSpec* p;
  const WaveSpeed* ws;

  Trip check(const PolarState& u, std::string& detail) const {
    const double ms = u.min_s();
    if (!(ms > 0.0) || !(1.0 / ms <= L_prime)) {
      detail = fmt::format("sup 1/s = {} exceeds L' = {} at t = {}", 1.0 / ms, L_prime, u.time);
      return Trip::degenerate;
    }
    const double E = total_energy(u, *p, *ws);
    if (!(E <= E_prime * (1.0 + 1e-12) + 1e-14)) {
      detail = fmt::format("energy {} exceeds E' = {} at t = {}", E, E_prime, u.time);
      return Trip::energy;
    }
    const double nrm = u.w1inf_norm();
    if (!(nrm <= L_prime)) {
      detail = fmt::format("|U|_W1inf = {} exceeds L' = {} at t = {} (gradient blow-up)", nrm,
                           L_prime, u.time);
      return Trip::norm;
    }
    return Trip::none;
  }
};

struct TripSignal {
  Trip kind;
  std::string detail;
  double time;
};

}  // namespace

WindowResult fixpoint_solve(const PolarState& U0, const PotentialSpec& p, const WaveSpeed& ws,
                            const QuasilinearConfig& cfg, double dt, long steps,
                            double E_prime) {
  if (steps < 1) throw ConfigError("fixpoint_solve: need at least one step");
  if (!(cfg.fixpoint_tol > 0.0) || cfg.fixpoint_max < 1) {
    throw ConfigError("quasilinear: fixpoint_tol must be > 0 and fixpoint_max >= 1");
  }
  U0.check_invariants();
  const double L_prime =
      cfg.L_budget > 0.0 ? cfg.L_budget : 2.0 * std::max(U0.w1inf_norm(), 1.0 / U0.min_s());
  const Budgets budgets{E_prime, L_prime, &p, &ws};

  long m = steps;
  WindowResult res;
  res.trace.t_start = U0.time;
  for (int h = 0;; ++h) {
    res.trace.halvings = h;
    res.trace.diffs.clear();
    res.trace.converged = false;
    try {
      auto guard = [&](const PolarState& u) {
        std::string detail;
        const Trip t = budgets.check(u, detail);
        if (t != Trip::none) throw TripSignal{t, detail, u.time};
      };
      // explicit predictor: coefficients frozen at the current level
      std::vector<PolarState> old(m + 1);
      old[0] = U0;
      for (long k = 0; k < m; ++k) {
        old[k + 1] = transport_step(old[k], old[k], old[k], p, ws, dt);
        guard(old[k + 1]);
      }
      res.trace.iterations = 1;
      for (int it = 1; it < cfg.fixpoint_max && !res.trace.converged; ++it) {
        std::vector<PolarState> fresh(m + 1);
        fresh[0] = U0;
        double diff = 0.0;
        for (long k = 0; k < m; ++k) {
          fresh[k + 1] = transport_step(fresh[k], old[k], old[k + 1], p, ws, dt);
          guard(fresh[k + 1]);
          diff = std::max(diff, w1inf_distance(fresh[k + 1], old[k + 1]));
        }
        res.trace.diffs.push_back(diff);
        res.trace.iterations = it + 1;
        old = std::move(fresh);
        res.trace.converged = diff < cfg.fixpoint_tol;
      }
      if (!res.trace.converged) {
        std::string hist;
        for (double d : res.trace.diffs) hist += fmt::format(" {:.3e}", d);
        throw NonContractionError(fmt::format(
            "outer fixed point did not reach tol {} in {} iterations from t = {}; diffs:{}",
            cfg.fixpoint_tol, cfg.fixpoint_max, U0.time, hist));
      }
      res.trajectory = std::move(old);
      res.achieved_T = m * dt;
      res.trace.achieved_T = res.achieved_T;
      return res;
    } catch (const TripSignal& sig) {
      if (m == 1 || h >= cfg.max_halvings) {
        const std::string msg =
            fmt::format("budget monitor tripped after {} window halvings: {}", h, sig.detail);
        switch (sig.kind) {
          case Trip::degenerate:
            throw DegeneracyError(msg);
          case Trip::norm:
            throw WavebreakingError(msg, sig.time);
          default:
            throw BudgetError(msg);
        }
      }
      m = std::max(1L, m / 2);
    }
  }
}

QuasilinearResult evolve(const PolarState& U0, const PotentialSpec& p, const WaveSpeed& ws,
                         const QuasilinearConfig& cfg, double t_final,
                         const PolarObserver& observer) {
  if (!(t_final >= 0.0)) throw ConfigError("quasilinear: t_final must be >= 0");
  if (!(cfg.T_local > 0.0)) throw ConfigError("quasilinear: T_local must be positive");
  U0.check_invariants();
  QuasilinearResult res;
  res.dt = quasilinear_dt(U0.grid, ws, cfg, t_final);
  const double E0 = total_energy(U0, p, ws);
  res.E_prime = cfg.E_budget > 0.0 ? cfg.E_budget : std::max(2.0 * E0, 1e-12);
  if (E0 > res.E_prime) {
    throw BudgetError(fmt::format("initial energy {} exceeds E' = {}", E0, res.E_prime));
  }
  const long N = t_final > 0.0 ? std::lround(t_final / res.dt) : 0;
  const long per_window = std::max(1L, std::lround(cfg.T_local / res.dt));

  PolarState current = U0;
  if (observer) observer(current);
  long k = 0;
  while (k < N) {
    auto w = fixpoint_solve(current, p, ws, cfg, res.dt, std::min(per_window, N - k), res.E_prime);
    const long m = static_cast<long>(w.trajectory.size()) - 1;
    for (long q = 1; q <= m; ++q) {
      w.trajectory[q].time = U0.time + (k + q) * res.dt;
      w.trajectory[q].check_invariants();
      if (observer) observer(w.trajectory[q]);
    }
    current = std::move(w.trajectory[m]);
    res.traces.push_back(std::move(w.trace));
    k += m;
  }
  res.final = std::move(current);
  return res;
}

void write_csv(std::ostream& os, const PolarState& u) {
  os << "x,psi,s,phi,v,omega,r\n";
  for (int i = 0; i < u.grid.n(); ++i) {
    os << fmt_num(u.grid.x(i)) << ',' << fmt_num(u.psi[i]) << ',' << fmt_num(u.s[i]) << ','
       << fmt_num(u.phi[i]) << ',' << fmt_num(u.v[i]) << ',' << fmt_num(u.omega[i]) << ','
       << fmt_num(u.r[i]) << '\n';
  }
}

}  // namespace nvw
