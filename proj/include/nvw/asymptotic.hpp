#pragma once

#include <string>
#include <vector>

#include "nvw/coefficients.hpp"
#include "nvw/field.hpp"
#include "nvw/hs2.hpp"
#include "nvw/polar.hpp"
#include "nvw/quasilinear.hpp"

namespace nvw {

/// A exp(-((y - center) / width)^2) with derivatives.
struct Bump {
  double amplitude = 0.0;
  double center = 0.0;
  double width = 1.0;

  double operator()(double y) const;
  double d1(double y) const;
  double d2(double y) const;
  /// radius beyond which |bump| < tol
  double radius(double tol) const;
};

struct AsymptoticConfig {
  double psi0 = 0.7853981633974483;
  double s0 = 0.5;
  double epsilon = 0.1;
  WaveSpeed ws{2.0, 1.0};
  Bump u_init{1.0, 0.0, 1.0};
  Bump r_init{0.5, 0.0, 1.0};  // rho_init = r_init'
  Gauge gauge = Gauge::right;

  double c0() const { return ws.c(psi0); }
  double cprime0() const { return ws.cprime(psi0); }
  /// Throws ConfigError for c'(psi0) = 0, s0 outside (0,1) or epsilon < 0.
  void validate() const;
};

/// psi = psi0 + eps u(0, x), s = s0 + eps r(0, x), psi_t = -c0 eps u_x,
/// s_t = -c0 eps r_x; omega and r by compatibility.
PolarState embed(const AsymptoticConfig& cfg, const Grid1D& grid);

struct SlowFields {
  std::vector<double> u;
  std::vector<double> rho;
};

/// u(tau, y) = (psi(tau/eps, y + c0 tau/eps) - psi0) / eps and
/// rho(tau, y) = r(., .) / (c(psi) eps), sampled at the nodes of `frame`.
/// Throws DomainError if the shifted frame leaves the state's grid.
SlowFields extract(const PolarState& u, const AsymptoticConfig& cfg, double tau,
                   const Grid1D& frame);

struct LagrangianCoefficients {
  double a = 1.0, b = 1.0, d = 1.0, e = 1.0;
};

/// a = s0^2 c0, b = s0^2 (cc')0, d = c0, e = (cc')0.
LagrangianCoefficients lagrangian_coefficients(const AsymptoticConfig& cfg);

struct Rescaling {
  double time_scale = 1.0;
  double rho_scale = 1.0;
};

/// Map of a u_t u_x + b u u_x^2 + d r_t r_x + e u r_x^2 onto the unit-coefficient
/// system: tau_std = (b/a) tau, rho_std = sqrt(e/b) rho. Requires e a = d b.
Rescaling rescaling_map(const LagrangianCoefficients& k);
Rescaling rescaling_map(const AsymptoticConfig& cfg);

/// Fields on a space-time grid: values[k][i] at time index k, space index i.
struct SpaceTimeField {
  double h_t = 1.0;
  double h_y = 1.0;
  std::vector<std::vector<double>> values;
};

struct ELResiduals {
  double action_u = 0.0, action_r = 0.0;  // L2 norms of -grad S / (h_t h_y)
  double strong_u = 0.0, strong_r = 0.0;  // L2 norms of the strong-form residuals
  double diff_u = 0.0, diff_r = 0.0;      // L2 norms of the differences
};

/// Action of the third-order Lagrangian with centred differences at interior
/// nodes; its nodal gradient by finite differences against the strong-form
/// residuals 2a u_ty + 2b (u u_y)_y - b u_y^2 - e r_y^2 and 2d r_ty + 2e (u r_y)_y.
/// Norms are over nodes at least two away from the grid edges.
ELResiduals discrete_el_residual(const LagrangianCoefficients& k, const SpaceTimeField& u,
                                 const SpaceTimeField& r);

struct StudyOptions {
  double dx = 0.025;
  double cfl = 0.9;
  double T_local = 0.25;
  double fixpoint_tol = 1e-10;
  int markers = 2001;
  double hs2_dt = 1e-3;
  int compare_points = 801;
  bool parallel = true;
};

struct StudyResult {
  std::vector<double> epsilons;
  std::vector<double> errors;  // NaN where the sub-run failed
  std::vector<std::string> failures;  // failed sub-runs only
  double fitted_order = 0.0;
  bool order_available = false;
  std::string gauge;
  Rescaling rescaling;
  double t_slow = 0.0;
};

/// Error of the extracted, standardised (u, rho) against hs2 at slow time
/// t_slow for one epsilon. Throws solver errors.
double reduction_error(const AsymptoticConfig& cfg, const PotentialSpec& p, double t_slow,
                       const StudyOptions& opt);

/// Runs reduction_error over the epsilons (concurrently if requested).
StudyResult convergence_study(const AsymptoticConfig& base, const PotentialSpec& p,
                              const std::vector<double>& epsilons, double t_slow,
                              const StudyOptions& opt = {});

std::string study_json(const StudyResult& r);

}  // namespace nvw
