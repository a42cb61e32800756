#pragma once

#include <vector>

#include "nvw/coefficients.hpp"
#include "nvw/field.hpp"

namespace nvw {

/// U = (psi, s, phi, v, omega, r) with phi = psi_t, v = s_t,
/// omega = c(psi) psi_x, r = c(psi) s_x.
struct PolarState {
  Grid1D grid;
  std::vector<double> psi, s, phi, v, omega, r;
  double time = 0.0;
  double psi_inf = 0.0;
  double s_inf = 1.0;

  static PolarState equilibrium(const Grid1D& g, double psi_inf, double s_inf);

  /// Recompute omega, r from psi, s by centred differences times c(psi).
  void make_compatible(const WaveSpeed& ws);

  /// Throws DegeneracyError if min s <= 0, ConfigError on size mismatch,
  /// DomainError if the boundary nodes left the far field.
  void check_invariants(double tol = 1e-10) const;

  double min_s() const;
  /// max over components of sup|U - U_inf| and sup|D_x U|.
  double w1inf_norm() const;
};

/// Build a polar state from a complex field via zeta = s e^{i psi}. The phase
/// is unwrapped along the grid. Requires |zeta| > 0 everywhere.
PolarState to_polar(const ComplexField& f, const WaveSpeed& ws);
ComplexField to_complex(const PolarState& u);

/// W^{1,inf} distance: sup of component differences and of their centred
/// derivatives.
double w1inf_distance(const PolarState& a, const PolarState& b);

}  // namespace nvw
