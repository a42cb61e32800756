#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "nvw/coefficients.hpp"
#include "nvw/errors.hpp"
#include "nvw/field.hpp"

using namespace nvw;

TEST(Grid, RejectsTooFewNodesAndEmptyInterval) {
  EXPECT_THROW(Grid1D(0.0, 1.0, 15), ConfigError);
  EXPECT_THROW(Grid1D(1.0, 1.0, 32), ConfigError);
  const Grid1D g(-1.0, 1.0, 21);
  EXPECT_DOUBLE_EQ(g.dx(), 0.1);
  EXPECT_DOUBLE_EQ(g.x(20), 1.0);
  EXPECT_TRUE(g.contains(1.0));
  EXPECT_FALSE(g.contains(1.001));
}

TEST(Interpolation, ExactForCubicsIncludingEnds) {
  const Grid1D g(-2.0, 3.0, 26);
  std::vector<double> f;
  auto cubic = [](double x) { return 1.0 - 2.0 * x + 0.5 * x * x - 0.25 * x * x * x; };
  for (double x : g.nodes()) f.push_back(cubic(x));
  for (double x : {-2.0, -1.97, -0.333, 0.5, 2.91, 3.0}) {
    EXPECT_NEAR(interpolate(g, f, x), cubic(x), 1e-12) << x;
  }
  EXPECT_THROW(interpolate(g, f, 3.1), DomainError);
  EXPECT_THROW(cubic_stencil(g, -2.5), DomainError);
}

TEST(Interpolation, FourthOrderOnSmoothData) {
  double prev = 0.0;
  for (int n : {41, 81, 161}) {
    const Grid1D g(0.0, 2.0, n);
    std::vector<double> f;
    for (double x : g.nodes()) f.push_back(std::sin(3 * x));
    double err = 0.0;
    for (int k = 0; k < 97; ++k) {
      const double x = 2.0 * (k + 0.37) / 97.0;
      err = std::max(err, std::abs(interpolate(g, f, x) - std::sin(3 * x)));
    }
    if (prev > 0) EXPECT_GT(prev / err, 12.0);
    prev = err;
  }
}

TEST(Integration, ExactForLinearAndSecondOrderOtherwise) {
  const Grid1D g(0.0, std::numbers::pi, 33);
  std::vector<double> lin, s;
  for (double x : g.nodes()) {
    lin.push_back(2.0 * x + 1.0);
    s.push_back(std::sin(x));
  }
  const double a = 0.123, b = 2.71;
  EXPECT_NEAR(integrate(g, lin, a, b), (b * b + b) - (a * a + a), 1e-13);
  EXPECT_NEAR(integrate(g, lin, a, a), 0.0, 0.0);
  EXPECT_THROW(integrate(g, lin, b, a), DomainError);
  double prev = 0.0;
  for (int n : {33, 65, 129}) {
    const Grid1D h(0.0, std::numbers::pi, n);
    std::vector<double> f;
    for (double x : h.nodes()) f.push_back(std::sin(x));
    const double err = std::abs(integrate(h, f) - 2.0);
    if (prev > 0) EXPECT_NEAR(prev / err, 4.0, 0.1);
    prev = err;
  }
}

TEST(Derivative, SecondOrderEverywhere) {
  double prev = 0.0;
  for (int n : {41, 81, 161}) {
    const Grid1D g(0.0, 1.0, n);
    std::vector<double> f;
    for (double x : g.nodes()) f.push_back(std::exp(x));
    const auto d = derivative(g, f);
    double err = 0.0;
    for (int i = 0; i < n; ++i) err = std::max(err, std::abs(d[i] - std::exp(g.x(i))));
    if (prev > 0) EXPECT_NEAR(prev / err, 4.0, 0.3);
    prev = err;
  }
  const Grid1D g(0.0, 1.0, 17);
  std::vector<double> q;
  for (double x : g.nodes()) q.push_back(x * x);
  const auto dq = derivative(g, q);
  for (int i = 0; i < 17; ++i) EXPECT_NEAR(dq[i], 2 * g.x(i), 1e-13);
}

namespace {

ComplexField bump_field(int n) {
  ComplexField f;
  f.grid = Grid1D(-6.0, 6.0, n);
  f.far_field = {0.2, -0.1};
  for (double x : f.grid.nodes()) {
    const double b = std::exp(-x * x);
    f.zeta.push_back(f.far_field + cplx(0.3 * b, 0.1 * b));
    f.zeta_t.push_back(cplx(-x * b, 0.5 * b));
  }
  return f;
}

}  // namespace

TEST(ComplexFieldTest, CsvRoundTripIsByteIdentical) {
  const auto f = bump_field(65);
  std::ostringstream a;
  write_csv(a, f);
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "x,re_zeta,im_zeta,re_zeta_t,im_zeta_t");
  std::istringstream in(a.str());
  const auto g = read_complex_csv(in, f.far_field);
  std::ostringstream b;
  write_csv(b, g);
  EXPECT_EQ(a.str(), b.str());
  for (std::size_t i = 0; i < f.zeta.size(); ++i) {
    EXPECT_EQ(f.zeta[i], g.zeta[i]);
    EXPECT_EQ(f.zeta_t[i], g.zeta_t[i]);
  }
}

TEST(ComplexFieldTest, MalformedCsvIsRejected) {
  std::istringstream bad("x,y\n1,2\n");
  EXPECT_THROW(read_complex_csv(bad, 0.0), ConfigError);
}

TEST(ComplexFieldTest, InvariantsDetectBoundaryAndEscape) {
  auto f = bump_field(65);
  EXPECT_NO_THROW(f.check_invariants());
  f.zeta.back() += 1e-3;
  EXPECT_THROW(f.check_invariants(), DomainError);
  f = bump_field(65);
  f.zeta[32] = 1.01;
  EXPECT_THROW(f.check_invariants(), BudgetError);
}

TEST(Metric, ZeroOnIdenticalStatesAndSymmetric) {
  const auto p = reference_potential();
  const auto a = bump_field(129);
  auto b = a;
  EXPECT_DOUBLE_EQ(metric_distance(a, a, p), 0.0);
  for (auto& z : b.zeta_t) z *= 1.1;
  const double d = metric_distance(a, b, p);
  EXPECT_GT(d, 0.0);
  EXPECT_DOUBLE_EQ(d, metric_distance(b, a, p));
  const auto nz = norms(a, p);
  EXPECT_NEAR(nz.sup_zeta, std::abs(cplx(0.2 + 0.3, -0.1 + 0.1)), 1e-12);
  EXPECT_GT(nz.w0_mass, 0.0);
}

TEST(Formatting, SeventeenSignificantDigits) {
  EXPECT_EQ(fmt_num(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(fmt_num(1.0 / 3.0)), 1.0 / 3.0);
}
