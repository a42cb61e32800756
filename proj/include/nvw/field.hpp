#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nvw/coefficients.hpp"

namespace nvw {

using cplx = std::complex<double>;

/// Uniform grid on [x_min, x_max] with n nodes.
class Grid1D {
 public:
  Grid1D() = default;
  Grid1D(double x_min, double x_max, int n);  // throws ConfigError

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  int n() const { return n_; }
  double dx() const { return dx_; }
  double x(int i) const { return x_min_ + i * dx_; }
  std::vector<double> nodes() const;
  bool contains(double x) const;

 private:
  double x_min_ = 0.0;
  double x_max_ = 1.0;
  int n_ = 16;
  double dx_ = 1.0 / 15.0;
};

inline constexpr int kMinGridNodes = 16;

/// 4-point cubic Lagrange interpolation; the stencil is shifted inwards near
/// the ends so the rule stays cubic-exact everywhere. Throws DomainError for
/// queries outside [x_min, x_max].
double interpolate(const Grid1D& g, std::span<const double> f, double x);
cplx interpolate(const Grid1D& g, std::span<const cplx> f, double x);

/// Weights of the same 4-point rule, reusable across several fields sampled
/// on one grid.
struct CubicStencil {
  int j = 0;
  double w[4] = {1.0, 0.0, 0.0, 0.0};

  template <class T>
  T operator()(std::span<const T> f) const {
    return w[0] * f[j] + w[1] * f[j + 1] + w[2] * f[j + 2] + w[3] * f[j + 3];
  }
  double operator()(const std::vector<double>& f) const {
    return (*this)(std::span<const double>(f));
  }
};
CubicStencil cubic_stencil(const Grid1D& g, double x);  // throws DomainError

/// Integral over [a, b] of the piecewise-linear interpolant of f: composite
/// trapezoid on whole cells, exact linear pieces on partial cells.
double integrate(const Grid1D& g, std::span<const double> f, double a, double b);
cplx integrate(const Grid1D& g, std::span<const cplx> f, double a, double b);
/// Whole-domain trapezoid rule.
double integrate(const Grid1D& g, std::span<const double> f);

/// Second-order centred differences; one-sided second-order at the ends.
std::vector<double> derivative(const Grid1D& g, std::span<const double> f);
std::vector<cplx> derivative(const Grid1D& g, std::span<const cplx> f);

/// Sampled (zeta, zeta_t) with far-field constant zeta*.
struct ComplexField {
  Grid1D grid;
  std::vector<cplx> zeta;
  std::vector<cplx> zeta_t;
  cplx far_field{0.0, 0.0};
  double time = 0.0;

  /// Throws DomainError / BudgetError if the compact-perturbation or
  /// |zeta| < 1 invariants fail.
  void check_invariants(double tol = 1e-10) const;
};

struct StateNorms {
  double sup_zeta = 0.0;
  double h1_dist = 0.0;  // ||zeta - zeta*||_2 + ||zeta_x||_2
  double sup_zeta_t = 0.0;
  double l2_zeta_t = 0.0;
  double w0_mass = 0.0;  // ||W0(|zeta|)||_1
};

StateNorms norms(const ComplexField& f, const PotentialSpec& p);
/// Same, with W0 mass omitted (reported as 0).
StateNorms norms(const ComplexField& f);

/// Distance of two states in the solution-space metric:
/// W^{1,inf} + H^1 of the zeta difference, sup + L^2 of the zeta_t
/// difference, L^1 of the W0(|zeta|) difference.
double metric_distance(const ComplexField& a, const ComplexField& b,
                       const PotentialSpec& p);

/// CSV snapshot: x, re_zeta, im_zeta, re_zeta_t, im_zeta_t.
void write_csv(std::ostream& os, const ComplexField& f);
ComplexField read_complex_csv(std::istream& is, cplx far_field);

/// Fixed-format number used in every CSV we emit (17 significant digits).
std::string fmt_num(double v);

}  // namespace nvw
