#include <cmath>
#include <functional>

#include <gtest/gtest.h>

#include "nvw/coefficients.hpp"
#include "nvw/errors.hpp"
#include "nvw/quasilinear.hpp"
#include "nvw/semilinear.hpp"

using namespace nvw;

namespace {

using Fn = std::function<double(double, double)>;

double dt_(const Fn& f, double t, double x, double h = 1e-4) {
  return (f(t + h, x) - f(t - h, x)) / (2 * h);
}
double dx_(const Fn& f, double t, double x, double h = 1e-4) {
  return (f(t, x + h) - f(t, x - h)) / (2 * h);
}

PolarState bump_state(const Grid1D& g, const WaveSpeed& ws, double psi_inf, double s_inf,
                      double a_psi, double a_s, double width, int direction) {
  auto u = PolarState::equilibrium(g, psi_inf, s_inf);
  for (int i = 0; i < g.n(); ++i) {
    const double x = g.x(i);
    const double b = std::exp(-x * x / (width * width));
    const double bx = -2 * x / (width * width) * b;
    u.psi[i] += a_psi * b;
    u.s[i] += a_s * b;
    u.phi[i] = -direction * ws.c(u.psi[i]) * a_psi * bx;
    u.v[i] = -direction * ws.c(u.psi[i]) * a_s * bx;
  }
  u.make_compatible(ws);
  return u;
}

}  // namespace

TEST(RhsF, DegenerateOrderParameterThrows) {
  const auto p = reference_potential();
  EXPECT_THROW(rhs_F({0, 0.0, 0, 0, 0, 0}, p, WaveSpeed(1, 1)), DegeneracyError);
  EXPECT_THROW(rhs_F({0, -0.1, 0, 0, 0, 0}, p, WaveSpeed(1, 1)), DegeneracyError);
}

TEST(RhsF, IsotropicCaseHasNoSpeedTerms) {
  const auto p = reference_potential();
  const Vec6 U{0.3, 0.4, 0.5, -0.2, 0.7, 0.1};
  const auto F = rhs_F(U, p, WaveSpeed(1.5, 1.5));
  EXPECT_DOUBLE_EQ(F[0], 0.5);
  EXPECT_DOUBLE_EQ(F[1], -0.2);
  EXPECT_NEAR(F[2], -(2 / 0.4) * (0.5 * -0.2 - 0.7 * 0.1), 1e-15);
  EXPECT_NEAR(F[3], 0.4 * (0.25 - 0.49) - p.d(1, 0.4), 1e-15);
  EXPECT_DOUBLE_EQ(F[4], 0.0);
  EXPECT_DOUBLE_EQ(F[5], 0.0);
}

TEST(RhsF, AgreesWithEulerLagrangeEquationsOfTheLagrangian) {
  // For arbitrary smooth psi, s the first-order system must reproduce the EL
  // residuals of L = 1/2 (s^2 psi_t^2 + s_t^2) - 1/2 c(psi)^2 (s^2 psi_x^2 + s_x^2) - W0(s):
  //   phi_t - c omega_x - F3 = R_psi / s^2,   v_t - c r_x - F4 = R_s,
  //   omega_t - c phi_x = F5,  r_t - c v_x = F6.
  const auto p = reference_potential();
  const WaveSpeed ws(2.0, 1.0);
  const Fn psi = [](double t, double x) { return 0.7 + 0.3 * std::sin(x + 0.5 * t); };
  const Fn s = [](double t, double x) { return 0.5 + 0.1 * std::cos(2 * x - t); };
  using L6 = std::function<double(double, double, double, double, double, double)>;
  const L6 lag = [&](double ps, double ss, double pt, double px, double st, double sx) {
    const double c = ws.c(ps);
    return 0.5 * (ss * ss * pt * pt + st * st) - 0.5 * c * c * (ss * ss * px * px + sx * sx) - p(ss);
  };
  auto args = [&](double t, double x) {
    return std::array<double, 6>{psi(t, x), s(t, x), dt_(psi, t, x), dx_(psi, t, x), dt_(s, t, x),
                                 dx_(s, t, x)};
  };
  auto partial = [&](int k, double t, double x) {
    auto a = args(t, x);
    const double h = 1e-5;
    auto b = a;
    a[k] += h;
    b[k] -= h;
    return (lag(a[0], a[1], a[2], a[3], a[4], a[5]) - lag(b[0], b[1], b[2], b[3], b[4], b[5])) /
           (2 * h);
  };
  for (double t : {0.0, 0.3}) {
    for (double x : {-0.4, 0.2, 1.1}) {
      const double H = 1e-3;
      auto el = [&](int kv, int kt, int kx) {
        return (partial(kt, t + H, x) - partial(kt, t - H, x)) / (2 * H) +
               (partial(kx, t, x + H) - partial(kx, t, x - H)) / (2 * H) - partial(kv, t, x);
      };
      const double Rpsi = el(0, 2, 3);
      const double Rs = el(1, 4, 5);

      const Fn phi = [&](double tt, double xx) { return dt_(psi, tt, xx); };
      const Fn v = [&](double tt, double xx) { return dt_(s, tt, xx); };
      const Fn om = [&](double tt, double xx) { return ws.c(psi(tt, xx)) * dx_(psi, tt, xx); };
      const Fn r = [&](double tt, double xx) { return ws.c(psi(tt, xx)) * dx_(s, tt, xx); };
      const double c = ws.c(psi(t, x));
      const Vec6 U{psi(t, x), s(t, x), phi(t, x), v(t, x), om(t, x), r(t, x)};
      const auto F = rhs_F(U, p, ws);
      const double H2 = 1e-3;
      const double sv = s(t, x);
      EXPECT_NEAR(dt_(phi, t, x, H2) - c * dx_(om, t, x, H2) - F[2], Rpsi / (sv * sv), 2e-4);
      EXPECT_NEAR(dt_(v, t, x, H2) - c * dx_(r, t, x, H2) - F[3], Rs, 2e-4);
      EXPECT_NEAR(dt_(om, t, x, H2) - c * dx_(phi, t, x, H2), F[4], 2e-5);
      EXPECT_NEAR(dt_(r, t, x, H2) - c * dx_(v, t, x, H2), F[5], 2e-5);
      EXPECT_GT(std::abs(F[2]), 1e-2);
    }
  }
}

TEST(Characteristics, ConstantStateGivesStraightLines) {
  const WaveSpeed ws(2.0, 1.0);
  PsiHistory h{Grid1D(-5, 5, 101), 0.0, 0.1, {}};
  for (int k = 0; k < 6; ++k) h.psi.emplace_back(101, 0.6);
  const double c = ws.c(0.6);
  EXPECT_NEAR(trace_characteristics(h, ws, 0.5, 0.3, 0.0, +1), 0.3 + 0.5 * c, 1e-13);
  EXPECT_NEAR(trace_characteristics(h, ws, 0.5, 0.3, 0.17, -1), 0.3 - 0.33 * c, 1e-13);
  EXPECT_THROW(trace_characteristics(h, ws, 0.2, 0.3, 0.4, 1), ConfigError);
  EXPECT_THROW(h.at(0.6, 0.0), DomainError);
}

TEST(Characteristics, SecondOrderAgainstRefinedIntegration) {
  // psi(t, x) = 0.5 + 0.3 sin(x - t): compare with a fine RK4 integration of dx/dtau = -c
  const WaveSpeed ws(2.0, 1.0);
  auto psi = [](double t, double x) { return 0.5 + 0.3 * std::sin(x - t); };
  auto reference = [&](double t, double x, double tau) {
    const int N = 20000;
    const double h = (t - tau) / N;
    double y = x;
    double s = t;
    auto f = [&](double ss, double yy) { return ws.c(psi(ss, yy)); };  // going backwards
    for (int k = 0; k < N; ++k) {
      const double k1 = f(s, y), k2 = f(s - h / 2, y + h / 2 * k1), k3 = f(s - h / 2, y + h / 2 * k2),
                   k4 = f(s - h, y + h * k3);
      y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      s -= h;
    }
    return y;
  };
  double prev = 0.0;
  for (int levels : {8, 16, 32}) {
    PsiHistory h{Grid1D(-6, 6, 1201), 0.0, 1.0 / levels, {}};
    for (int k = 0; k <= levels; ++k) {
      std::vector<double> row;
      for (double x : h.grid.nodes()) row.push_back(psi(k * h.dt, x));
      h.psi.push_back(row);
    }
    const double err = std::abs(trace_characteristics(h, ws, 1.0, 0.2, 0.0, +1) - reference(1.0, 0.2, 0.0));
    if (prev > 0) EXPECT_GT(prev / err, 3.0);
    prev = err;
  }
}

TEST(Transport, EquilibriumIsStationary) {
  const auto p = validate_or_throw(flat4_potential(0.5));
  const WaveSpeed ws(2.0, 1.0);
  const auto u = PolarState::equilibrium(Grid1D(-4, 4, 81), 0.8, 0.5);
  const auto v = transport_step(u, u, u, p, ws, 0.05);
  EXPECT_LT(w1inf_distance(u, v), 1e-14);
}

TEST(StepSize, CflAndDivisibility) {
  const Grid1D g(-8, 8, 257);
  const WaveSpeed ws(2.0, 1.0);
  QuasilinearConfig cfg;
  const double dt = quasilinear_dt(g, ws, cfg, 1.0);
  EXPECT_LE(dt, 0.9 * g.dx() / std::sqrt(2.0) * (1 + 1e-12));
  EXPECT_NEAR(1.0 / dt, std::round(1.0 / dt), 1e-9);
  cfg.cfl = 0.95;
  EXPECT_THROW(quasilinear_dt(g, ws, cfg, 1.0), ConfigError);
  cfg.cfl = 0.9;
  cfg.dt = g.dx();
  EXPECT_THROW(quasilinear_dt(g, ws, cfg, 1.0), ConfigError);
}

TEST(Evolve, MatchesSemilinearSolverWhenIsotropic) {
  const auto p = validate_or_throw(flat4_potential(0.5));
  const WaveSpeed ws(1.0, 1.0);
  const int n = 257;
  ComplexField f;
  f.grid = Grid1D(-8, 8, n);
  f.far_field = 0.5;
  for (double x : f.grid.nodes()) {
    double b = std::exp(-2 * x * x);
    if (std::abs(x) > 4.5) b = 0;
    f.zeta.push_back(std::polar(0.5 + 0.1 * b, 0.3 * b));
    f.zeta_t.push_back(cplx(0.05, 0.1) * b * (1 - x * x));
  }
  SemilinearConfig sc;
  sc.T_window = 0.05;
  const auto rs = picard_solve(f, p, sc, 0.5);
  QuasilinearConfig qc;
  qc.T_local = 0.1;
  const auto rq = evolve(to_polar(f, ws), p, ws, qc, 0.5);
  EXPECT_NEAR(rq.final.time, 0.5, 1e-12);
  const auto zq = to_complex(rq.final);
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = std::norm(zq.zeta[i] - rs.final.zeta[i]);
  EXPECT_LT(std::sqrt(integrate(f.grid, d)), 1.5e-3);
}

TEST(Evolve, AnisotropicEnergyDriftShrinksUnderRefinement) {
  const auto p = validate_or_throw(flat4_potential(0.5));
  const WaveSpeed ws(2.0, 1.0);
  double prev = 0.0;
  for (int n : {161, 321}) {
    const auto u0 = bump_state(Grid1D(-8, 8, n), ws, 0.6, 0.5, 0.2, 0.05, 0.8, 1);
    const double E0 = total_energy(u0, p, ws);
    const auto res = evolve(u0, p, ws, QuasilinearConfig{}, 0.5);
    const double drift = std::abs(total_energy(res.final, p, ws) - E0) / E0;
    EXPECT_LT(drift, 1e-2);
    if (prev > 0) EXPECT_LT(drift, 0.5 * prev);
    prev = drift;
    for (const auto& tr : res.traces) EXPECT_TRUE(tr.converged);
  }
}

TEST(Evolve, ReflectionSymmetry) {
  // x -> -x maps solutions to solutions with omega, r changing sign
  const auto p = validate_or_throw(flat4_potential(0.5));
  const WaveSpeed ws(2.0, 1.0);
  const Grid1D g(-6, 6, 161);
  const auto a0 = bump_state(g, ws, 0.6, 0.5, 0.2, 0.05, 0.8, 1);
  auto b0 = a0;
  const int n = g.n();
  for (int i = 0; i < n; ++i) {
    b0.psi[i] = a0.psi[n - 1 - i];
    b0.s[i] = a0.s[n - 1 - i];
    b0.phi[i] = a0.phi[n - 1 - i];
    b0.v[i] = a0.v[n - 1 - i];
    b0.omega[i] = -a0.omega[n - 1 - i];
    b0.r[i] = -a0.r[n - 1 - i];
  }
  const auto a = evolve(a0, p, ws, QuasilinearConfig{}, 0.4).final;
  const auto b = evolve(b0, p, ws, QuasilinearConfig{}, 0.4).final;
  for (int i = 0; i < n; ++i) {
    EXPECT_NEAR(a.psi[i], b.psi[n - 1 - i], 1e-11);
    EXPECT_NEAR(a.s[i], b.s[n - 1 - i], 1e-11);
    EXPECT_NEAR(a.omega[i], -b.omega[n - 1 - i], 1e-10);
  }
}

TEST(Evolve, BudgetTripsMapToErrors) {
  const auto p = validate_or_throw(flat4_potential(0.5));
  const WaveSpeed ws(2.0, 1.0);
  const Grid1D g(-8, 8, 161);
  auto u0 = bump_state(g, ws, 0.6, 0.5, 0.2, 0.05, 0.8, 1);

  QuasilinearConfig cfg;
  cfg.E_budget = 0.5 * total_energy(u0, p, ws);
  EXPECT_THROW(evolve(u0, p, ws, cfg, 0.2), BudgetError);

  cfg = QuasilinearConfig{};
  cfg.max_halvings = 3;
  const auto steep = bump_state(g, ws, 0.6, 0.5, 1.0, 0.0, 0.6, 1);
  cfg.L_budget = 1.0001 * std::max(steep.w1inf_norm(), 1.0 / steep.min_s());
  EXPECT_THROW(evolve(steep, p, ws, cfg, 1.0), WavebreakingError);

  auto bad = u0;
  bad.s[80] = -0.01;
  EXPECT_THROW(evolve(bad, p, ws, QuasilinearConfig{}, 0.2), DegeneracyError);

  cfg = QuasilinearConfig{};
  cfg.fixpoint_max = 2;
  cfg.fixpoint_tol = 1e-15;
  EXPECT_THROW(evolve(u0, p, ws, cfg, 0.2), NonContractionError);
}

TEST(Evolve, PerturbationReachingBoundaryIsDomainError) {
  const auto p = validate_or_throw(flat4_potential(0.5));
  const WaveSpeed ws(2.0, 1.0);
  const auto u0 = bump_state(Grid1D(-3, 3, 121), ws, 0.6, 0.5, 0.1, 0.0, 0.4, 1);
  EXPECT_THROW(evolve(u0, p, ws, QuasilinearConfig{}, 3.0), DomainError);
}
