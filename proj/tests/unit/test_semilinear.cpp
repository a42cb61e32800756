#include <cmath>

#include <gtest/gtest.h>

#include "nvw/coefficients.hpp"
#include "nvw/errors.hpp"
#include "nvw/semilinear.hpp"

using namespace nvw;

namespace {

// Gaussian packet on [-L, L] with n nodes; zeta_t optional.
ComplexField packet(int n, double L, double amp, double width, bool moving, cplx far = 0.0) {
  ComplexField f;
  f.grid = Grid1D(-L, L, n);
  f.far_field = far;
  for (double x : f.grid.nodes()) {
    const double y = x / width;
    const double b = std::exp(-y * y);
    f.zeta.push_back(far + amp * b * cplx(1.0, 0.5));
    f.zeta_t.push_back(moving ? amp * b * cplx(0.2, 1.0) * (-2.0 * y / width) : cplx(0.0));
  }
  return f;
}

cplx gauss(double x, double amp, double width) {
  const double y = x / width;
  return amp * std::exp(-y * y) * cplx(1.0, 0.5);
}

}  // namespace

TEST(SourceTerm, LimitAtOriginAndEscape) {
  const auto p = reference_potential();
  EXPECT_EQ(source_term(p, 0.0), cplx(0.0));
  // W0'(s)/s = 2 / (1-s)^3
  const cplx z(0.3, 0.4);
  const cplx got = source_term(p, z);
  EXPECT_NEAR(std::abs(got - 2.0 / std::pow(0.5, 3) * z), 0.0, 1e-12);
  EXPECT_THROW(source_term(p, cplx(0.6, 0.8)), BudgetError);
  EXPECT_THROW(source_term(p, 1.5), BudgetError);
}

TEST(FreeWave, MatchesDAlembertExactlyForStaticData) {
  const auto f0 = packet(513, 8.0, 0.3, 1.0, false);
  const auto f = free_wave(f0, 1.0, 1.0);
  for (int i = 0; i < 513; ++i) {
    const double x = f0.grid.x(i);
    const cplx exact = 0.5 * (gauss(x - 1.0, 0.3, 1.0) + gauss(x + 1.0, 0.3, 1.0));
    EXPECT_NEAR(std::abs(f.zeta[i] - exact), 0.0, 1e-15);
  }
}

TEST(FreeWave, VelocityPartConvergesAtSecondOrder) {
  // zeta_t = g'(x): d'Alembert gives (g(x+t) - g(x-t)) / 2 for the velocity contribution
  double prev = 0.0;
  for (int n : {257, 513, 1025}) {
    auto f0 = packet(n, 8.0, 0.0, 1.0, false);
    for (int i = 0; i < n; ++i) {
      const double x = f0.grid.x(i);
      f0.zeta_t[i] = -2.0 * x * std::exp(-x * x);
    }
    const auto f = free_wave(f0, 1.0, 1.0);
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = f0.grid.x(i);
      const double exact = 0.5 * (std::exp(-(x + 1) * (x + 1)) - std::exp(-(x - 1) * (x - 1)));
      err = std::max(err, std::abs(f.zeta[i] - exact));
    }
    if (prev > 0) EXPECT_NEAR(prev / err, 4.0, 0.3);
    prev = err;
  }
}

TEST(FreeWave, RejectsUnalignedTimesAndBoundaryContact) {
  const auto f0 = packet(257, 8.0, 0.3, 1.0, false);
  EXPECT_THROW(free_wave(f0, 1.0, 0.01), ConfigError);
  EXPECT_THROW(free_wave(f0, 1.0, 7.0), DomainError);
}

TEST(Picard, ZeroSourceReproducesFreeWave) {
  const auto p = zero_potential();
  const auto f0 = packet(513, 8.0, 0.3, 1.0, true, cplx(0.1, 0.0));
  SemilinearConfig cfg;
  cfg.T_window = 1.0;
  const auto res = picard_solve(f0, p, cfg, 1.0);
  const auto ref = free_wave(f0, 1.0, 1.0);
  for (int i = 0; i < 513; ++i) {
    EXPECT_NEAR(std::abs(res.final.zeta[i] - ref.zeta[i]), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(res.final.zeta_t[i] - ref.zeta_t[i]), 0.0, 1e-13);
  }
}

TEST(Picard, SolutionIsFixedPointOfDirectDuhamelSum) {
  const auto p = validate_or_throw(reference_potential());
  const auto f0 = packet(257, 8.0, 0.3, 0.7, true);
  auto cfg = make_semilinear_config(f0.grid, 1.0, p, total_energy(f0, p, 1.0));
  std::vector<ComplexField> hist;
  const auto res = picard_solve(f0, p, cfg, 0.75, [&](const ComplexField& f) { hist.push_back(f); });
  ASSERT_GT(res.traces.size(), 1u) << "expect several windows";
  const double t = res.final.time;
  const auto free = free_wave(f0, 1.0, t);
  const auto corr = duhamel_apply(hist, p, 1.0, t);
  double err = 0.0;
  for (int i = 0; i < 257; ++i) {
    err = std::max(err, std::abs(free.zeta[i] + corr.zeta[i] - res.final.zeta[i]));
    err = std::max(err, std::abs(free.zeta_t[i] + corr.zeta_t[i] - res.final.zeta_t[i]));
  }
  EXPECT_LT(err, 1e-9);
}

TEST(Picard, SmallAmplitudeMeanOscillatesAtKleinGordonFrequency) {
  // d^2/dt^2 int zeta = -int W0'(|zeta|)/|zeta| zeta ~ -W0''(0) int zeta, W0''(0) = 2
  const auto p = validate_or_throw(reference_potential());
  const auto f0 = packet(513, 8.0, 1e-4, 1.0, false);
  const double m0 = integrate(f0.grid, [&] {
    std::vector<double> re;
    for (auto z : f0.zeta) re.push_back(z.real());
    return re;
  }());
  auto cfg = make_semilinear_config(f0.grid, 1.0, p, total_energy(f0, p, 1.0));
  std::vector<std::pair<double, double>> means;
  picard_solve(f0, p, cfg, 2.0, [&](const ComplexField& f) {
    std::vector<double> re;
    for (auto z : f.zeta) re.push_back(z.real());
    means.emplace_back(f.time, integrate(f.grid, re));
  });
  for (const auto& [t, m] : means) {
    EXPECT_NEAR(m, m0 * std::cos(std::sqrt(2.0) * t), 2e-3 * m0) << t;
  }
}

TEST(Picard, EnergyDriftIsSecondOrder) {
  const auto p = validate_or_throw(reference_potential());
  double drift[2];
  int k = 0;
  for (int n : {257, 513}) {
    const auto f0 = packet(n, 8.0, 0.3, 0.5, true);
    const double E0 = total_energy(f0, p, 1.0);
    const auto res = picard_solve(f0, p, make_semilinear_config(f0.grid, 1.0, p, E0), 0.5);
    drift[k++] = std::abs(total_energy(res.final, p, 1.0) - E0);
  }
  EXPECT_GT(drift[0] / drift[1], 3.0);
  EXPECT_LT(drift[0] / drift[1], 5.0);
}

TEST(Picard, IteratesContract) {
  const auto p = validate_or_throw(reference_potential());
  const auto f0 = packet(257, 8.0, 0.3, 0.7, true);
  const auto res =
      picard_solve(f0, p, make_semilinear_config(f0.grid, 1.0, p, total_energy(f0, p, 1.0)), 0.5);
  for (const auto& tr : res.traces) {
    EXPECT_TRUE(tr.converged);
    for (std::size_t j = 1; j < tr.diff_norms.size(); ++j) {
      if (tr.diff_norms[j - 1] > 0) EXPECT_LE(tr.diff_norms[j], 0.9 * tr.diff_norms[j - 1]);
    }
  }
  EXPECT_FALSE(res.apriori_violated);
  EXPECT_LE(res.max_sup, res.cE + 1e-6);
}

TEST(Picard, FailureModes) {
  const auto p = validate_or_throw(reference_potential());
  const auto f0 = packet(257, 8.0, 0.3, 0.7, true);
  const double E0 = total_energy(f0, p, 1.0);

  auto cfg = make_semilinear_config(f0.grid, 1.0, p, E0);
  cfg.picard_max = 1;
  cfg.picard_tol = 1e-14;
  EXPECT_THROW(picard_solve(f0, p, cfg, 0.25), NonContractionError);

  cfg = make_semilinear_config(f0.grid, 1.0, p, E0);
  cfg.T_window *= 2.0;
  EXPECT_THROW(picard_solve(f0, p, cfg, 0.25), ConfigError);

  cfg = make_semilinear_config(f0.grid, 1.0, p, E0);
  cfg.dt *= 0.5;
  EXPECT_THROW(picard_solve(f0, p, cfg, 0.25), ConfigError);

  // budget far below the actual energy: the a priori monitor trips
  cfg = make_semilinear_config(f0.grid, 1.0, p, 1e-3 * E0);
  cfg.enforce_apriori = true;
  EXPECT_THROW(picard_solve(f0, p, cfg, 0.25), BudgetError);
  cfg.enforce_apriori = false;
  EXPECT_TRUE(picard_solve(f0, p, cfg, 0.25).apriori_violated);
}

TEST(Picard, WindowBoundShrinksWithEnergy) {
  const auto p = validate_or_throw(reference_potential());
  const double a = window_bound(p, 0.01, 1.0, 2.0);
  const double b = window_bound(p, 1.0, 1.0, 2.0);
  EXPECT_GT(a, b);
  EXPECT_GT(b, 0.0);
  // small energy: kE' = 4 (1 + 4 cE') + O(cE'^2), bound -> (1/4)(1/2) / sqrt(1 + 4 cE')
  const double cEp = apriori_constants(p, 2e-6, 1.0).cE;
  EXPECT_NEAR(window_bound(p, 1e-6, 1.0, 2.0), 0.125 / std::sqrt(1.0 + 4.0 * cEp), 1e-5);
  EXPECT_THROW(window_bound(p, 1.0, 1.0, 1.0), ConfigError);
}
