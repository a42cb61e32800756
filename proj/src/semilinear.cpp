#include "nvw/semilinear.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nvw/diagnostics.hpp"
#include "nvw/errors.hpp"

namespace nvw {

namespace {

// Node-indexed view of grid data continued by a constant outside the grid.
struct Continued {
  const std::vector<cplx>* f;
  cplx outside;
  cplx operator()(long m) const {
    const long n = static_cast<long>(f->size());
    return (m < 0 || m >= n) ? outside : (*f)[m];
  }
};

// Trapezoid prefix integral of f from node 0, continued linearly with slope
// `outside` beyond the grid (the exact integral of the continued data).
struct Prefix {
  std::vector<cplx> pre;
  cplx outside{};
  double dx = 0.0;

  Prefix() = default;
  Prefix(const std::vector<cplx>& f, cplx out, double h) : pre(f.size()), outside(out), dx(h) {
    pre[0] = 0.0;
    for (std::size_t m = 1; m < f.size(); ++m) pre[m] = pre[m - 1] + 0.5 * h * (f[m - 1] + f[m]);
  }
  cplx operator()(long m) const {
    const long n = static_cast<long>(pre.size());
    if (m < 0) return static_cast<double>(m) * dx * outside;
    if (m >= n) return pre[n - 1] + static_cast<double>(m - n + 1) * dx * outside;
    return pre[m];
  }
};

// Initial data of a cone evaluation, with the d'Alembert part on nodes.
struct FreeData {
  std::vector<cplx> z0, t0, zx0;
  cplx far{};
  Prefix R;
  double c = 1.0;

  FreeData(const ComplexField& f, double speed)
      : z0(f.zeta), t0(f.zeta_t), far(f.far_field), c(speed) {
    zx0 = derivative(f.grid, std::span<const cplx>(f.zeta));
    R = Prefix(t0, 0.0, f.grid.dx());
  }

  // free solution at level k (t = k dx / c), node i
  cplx zeta(long k, long i) const {
    const Continued Z{&z0, far};
    return 0.5 * (Z(i - k) + Z(i + k)) + (R(i + k) - R(i - k)) / (2.0 * c);
  }
  cplx zeta_t(long k, long i) const {
    const Continued Zx{&zx0, 0.0};
    const Continued T{&t0, 0.0};
    return 0.5 * c * (Zx(i + k) - Zx(i - k)) + 0.5 * (T(i + k) + T(i - k));
  }
};

std::vector<cplx> sources(const PotentialSpec& p, const std::vector<cplx>& z) {
  std::vector<cplx> s(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) s[i] = source_term(p, z[i]);
  return s;
}

// Running diagonal sums of the source history:
//   ap_plus[m] = sum_j P_j(m - j),  ap_minus[m] = sum_j P_j(m + j)
//   as_plus[m] = sum_j S_j(m - j),  as_minus[m] = sum_j S_j(m + j)
// over the levels added so far, for node indices m in [-K, n-1+K].
struct Accumulators {
  long off = 0;
  std::vector<cplx> ap_plus, ap_minus, as_plus, as_minus;

  Accumulators(long n, long K) : off(K) {
    const std::size_t size = static_cast<std::size_t>(n + 2 * K);
    ap_plus.assign(size, 0.0);
    ap_minus.assign(size, 0.0);
    as_plus.assign(size, 0.0);
    as_minus.assign(size, 0.0);
  }

  void add(long k, const std::vector<cplx>& S, cplx s_far, double dx) {
    const Prefix P(S, s_far, dx);
    const Continued Sc{&S, s_far};
    const long size = static_cast<long>(ap_plus.size());
    for (long idx = 0; idx < size; ++idx) {
      const long m = idx - off;
      ap_plus[idx] += P(m - k);
      ap_minus[idx] += P(m + k);
      as_plus[idx] += Sc(m - k);
      as_minus[idx] += Sc(m + k);
    }
  }
  std::size_t at(long m) const { return static_cast<std::size_t>(m + off); }
};

void check_aligned(const Grid1D& g, double c, double dt) {
  if (!(c > 0.0)) throw ConfigError("semilinear: wave speed c must be positive");
  if (std::abs(dt * c / g.dx() - 1.0) > 1e-12) {
    throw ConfigError(fmt::format("semilinear: dt = {} is not grid-aligned (dx/c = {})", dt,
                                  g.dx() / c));
  }
}

long aligned_steps(double t, double dt, const char* what) {
  const double q = t / dt;
  const long k = std::lround(q);
  if (k < 0 || std::abs(q - k) > 1e-9 * std::max(1.0, q)) {
    throw ConfigError(fmt::format("{}: t = {} is not a multiple of dt = {}", what, t, dt));
  }
  return k;
}

void check_boundary(const ComplexField& f) {
  const double tol = 1e-10;
  const double a = std::abs(f.zeta.front() - f.far_field);
  const double b = std::abs(f.zeta.back() - f.far_field);
  if (a > tol || b > tol) {
    throw DomainError(fmt::format(
        "perturbation reached the truncated boundary at t = {} (|zeta - zeta*| = {:.3e}, {:.3e})",
        f.time, a, b));
  }
}

}  // namespace

cplx source_term(const PotentialSpec& p, cplx z) {
  const double s = std::abs(z);
  if (!(s < 1.0)) {
    throw BudgetError(fmt::format("state escape: |zeta| = {} >= 1", s));
  }
  if (s == 0.0) return p.d(2, 0.0) * z;
  return (p.d(1, s) / s) * z;
}

double window_bound(const PotentialSpec& p, double E, double c, double E_prime_factor) {
  if (!(E_prime_factor > 1.0)) throw ConfigError("semilinear: E' must exceed E");
  const double Ep = E_prime_factor * E;
  const auto k = apriori_constants(p, Ep, c);
  return (1.0 / (2.0 * std::sqrt(k.kE))) * (1.0 - E / Ep);
}

SemilinearConfig make_semilinear_config(const Grid1D& g, double c, const PotentialSpec& p,
                                        double E, double E_prime_factor) {
  SemilinearConfig cfg;
  cfg.c = c;
  cfg.dt = g.dx() / c;
  cfg.E_budget = E;
  cfg.E_prime_factor = E_prime_factor;
  cfg.T_window = window_bound(p, E, c, E_prime_factor);
  return cfg;
}

ComplexField free_wave(const ComplexField& f0, double c, double t) {
  const double dt = f0.grid.dx() / c;
  check_aligned(f0.grid, c, dt);
  const long k = aligned_steps(t, dt, "free_wave");
  const FreeData d(f0, c);
  ComplexField out = f0;
  out.time = f0.time + t;
  for (long i = 0; i < f0.grid.n(); ++i) {
    out.zeta[i] = d.zeta(k, i);
    out.zeta_t[i] = d.zeta_t(k, i);
  }
  check_boundary(out);
  return out;
}

DuhamelCorrection duhamel_apply(const std::vector<ComplexField>& history,
                                const PotentialSpec& p, double c, double t) {
  if (history.empty()) throw ConfigError("duhamel_apply: empty history");
  const Grid1D& g = history.front().grid;
  const double dt = g.dx() / c;
  const long k = aligned_steps(t - history.front().time, dt, "duhamel_apply");
  if (static_cast<long>(history.size()) <= k) {
    throw ConfigError(fmt::format("duhamel_apply: history has {} levels, {} needed",
                                  history.size(), k + 1));
  }
  const long n = g.n();
  DuhamelCorrection out{std::vector<cplx>(n, 0.0), std::vector<cplx>(n, 0.0)};
  if (k == 0) return out;
  const cplx s_far = source_term(p, history.front().far_field);
  std::vector<std::vector<cplx>> S(k + 1);
  std::vector<Prefix> P(k + 1);
  for (long j = 0; j <= k; ++j) {
    S[j] = sources(p, history[j].zeta);
    P[j] = Prefix(S[j], s_far, g.dx());
  }
  for (long i = 0; i < n; ++i) {
    cplx az = 0.0, at = 0.0;
    for (long j = 0; j <= k; ++j) {
      const double w = (j == 0 || j == k) ? 0.5 : 1.0;
      const Continued Sc{&S[j], s_far};
      az += w * (P[j](i + k - j) - P[j](i - k + j));
      at += w * (Sc(i + k - j) + Sc(i - k + j));
    }
    out.zeta[i] = -(dt / (2.0 * c)) * az;
    out.zeta_t[i] = -(dt / 2.0) * at;
  }
  return out;
}

double total_energy(const ComplexField& f, const PotentialSpec& p, double c) {
  return integrate(f.grid, energy_density_complex(f, p, c).E);
}

SemilinearResult picard_solve(const ComplexField& f0, const PotentialSpec& p,
                              const SemilinearConfig& cfg, double t_final,
                              const FieldObserver& observer) {
  const Grid1D& g = f0.grid;
  const double c = cfg.c;
  const double dt = cfg.dt > 0.0 ? cfg.dt : g.dx() / c;
  check_aligned(g, c, dt);
  if (!(t_final >= 0.0)) throw ConfigError("semilinear: t_final must be >= 0");
  if (!(cfg.picard_tol > 0.0) || cfg.picard_max < 1) {
    throw ConfigError("semilinear: picard_tol must be > 0 and picard_max >= 1");
  }
  f0.check_invariants();

  SemilinearResult res;
  const bool budgeted = p.validated && cfg.E_budget > 0.0;
  if (budgeted) {
    res.cE = apriori_constants(p, cfg.E_budget, c).cE;
    const double bound = window_bound(p, cfg.E_budget, c, cfg.E_prime_factor);
    if (cfg.T_window > bound * (1.0 + 1e-9)) {
      throw ConfigError(fmt::format(
          "semilinear: T_window = {} exceeds the contraction bound {} for E = {}", cfg.T_window,
          bound, cfg.E_budget));
    }
  }
  if (!(cfg.T_window > 0.0)) throw ConfigError("semilinear: T_window must be positive");
  const double sup_bound = res.cE + 1e-6;

  const long n = g.n();
  const long K = static_cast<long>(std::ceil(t_final / dt - 1e-9));
  const long per_window = std::max(1L, static_cast<long>(std::floor(cfg.T_window / dt + 1e-9)));

  const FreeData data(f0, c);
  const cplx s_far = source_term(p, f0.far_field);
  const std::vector<cplx> S0 = sources(p, f0.zeta);
  const Prefix P0(S0, s_far, g.dx());
  Accumulators acc(n, K);
  acc.add(0, S0, s_far, g.dx());

  auto monitor = [&](const ComplexField& f) {
    double sup = 0.0;
    for (const auto& z : f.zeta) sup = std::max(sup, std::abs(z));
    res.max_sup = std::max(res.max_sup, sup);
    if (budgeted && sup > sup_bound) {
      res.apriori_violated = true;
      if (cfg.enforce_apriori) {
        throw BudgetError(fmt::format("a priori bound exceeded: sup|zeta| = {} > cE = {} at t = {}",
                                      sup, res.cE, f.time));
      }
    }
    if (observer) observer(f);
  };

  ComplexField current = f0;
  monitor(current);

  auto level_field = [&](long k, std::vector<cplx> z, std::vector<cplx> zt) {
    ComplexField f;
    f.grid = g;
    f.zeta = std::move(z);
    f.zeta_t = std::move(zt);
    f.far_field = f0.far_field;
    f.time = f0.time + k * dt;
    return f;
  };

  long k0 = 0;
  while (k0 < K) {
    const long W = std::min(per_window, K - k0);
    PicardTrace trace;
    trace.t_start = f0.time + k0 * dt;
    trace.t_end = f0.time + (k0 + W) * dt;
    const Accumulators checkpoint = acc;

    // first iterate: free evolution of the window's initial state
    std::vector<ComplexField> old(W + 1);
    {
      const FreeData start(current, c);
      for (long q = 1; q <= W; ++q) {
        std::vector<cplx> z(n), zt(n);
        for (long i = 0; i < n; ++i) {
          z[i] = start.zeta(q, i);
          zt[i] = start.zeta_t(q, i);
        }
        old[q] = level_field(k0 + q, std::move(z), std::move(zt));
      }
    }
    std::vector<std::vector<cplx>> old_S(W + 1);
    for (long q = 1; q <= W; ++q) old_S[q] = sources(p, old[q].zeta);

    for (int it = 0; it < cfg.picard_max && !trace.converged; ++it) {
      acc = checkpoint;
      std::vector<ComplexField> fresh(W + 1);
      double diff = 0.0;
      for (long q = 1; q <= W; ++q) {
        const long k = k0 + q;
        std::vector<cplx> z(n), zt(n);
        for (long i = 0; i < n; ++i) {
          const cplx corr = acc.ap_plus[acc.at(i + k)] - acc.ap_minus[acc.at(i - k)] -
                            0.5 * (P0(i + k) - P0(i - k));
          z[i] = data.zeta(k, i) - (dt / (2.0 * c)) * corr;
        }
        acc.add(k, old_S[q], s_far, g.dx());
        const Continued S0c{&S0, s_far};
        for (long i = 0; i < n; ++i) {
          const cplx corr = acc.as_plus[acc.at(i + k)] + acc.as_minus[acc.at(i - k)] -
                            0.5 * (S0c(i + k) + S0c(i - k)) - old_S[q][i];
          zt[i] = data.zeta_t(k, i) - 0.5 * dt * corr;
        }
        fresh[q] = level_field(k, std::move(z), std::move(zt));
        diff = std::max(diff, metric_distance(fresh[q], old[q], p));
      }
      trace.diff_norms.push_back(diff);
      trace.iterate_count = it + 1;
      old = std::move(fresh);
      for (long q = 1; q <= W; ++q) old_S[q] = sources(p, old[q].zeta);
      trace.converged = diff < cfg.picard_tol;
    }
    if (!trace.converged) {
      std::string hist;
      for (double d : trace.diff_norms) hist += fmt::format(" {:.3e}", d);
      throw NonContractionError(fmt::format(
          "Picard iteration did not reach tol {} in {} iterations on [{}, {}]; diffs:{}",
          cfg.picard_tol, cfg.picard_max, trace.t_start, trace.t_end, hist));
    }

    acc = checkpoint;
    for (long q = 1; q <= W; ++q) acc.add(k0 + q, old_S[q], s_far, g.dx());
    for (long q = 1; q <= W; ++q) {
      check_boundary(old[q]);
      monitor(old[q]);
    }
    current = std::move(old[W]);
    res.traces.push_back(std::move(trace));
    k0 += W;
  }
  res.final = std::move(current);
  return res;
}

}  // namespace nvw
