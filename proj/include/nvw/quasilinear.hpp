#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

#include "nvw/coefficients.hpp"
#include "nvw/field.hpp"
#include "nvw/polar.hpp"

namespace nvw {

using Vec6 = std::array<double, 6>;  // (psi, s, phi, v, omega, r)

/// Right side F(U) of the first-order system, transport parts excluded:
///   (phi, v, -(2/s)(phi v - omega r) - (c'/c)(r/s)^2,
///    s(phi^2 - omega^2) + (c'/c) omega r - W0'(s), (c'/c) phi omega, (c'/c) phi r).
/// Throws DegeneracyError if s <= 0.
Vec6 rhs_F(const Vec6& U, const PotentialSpec& p, const WaveSpeed& ws);

/// psi sampled at equally spaced times; linear in time, cubic in space.
struct PsiHistory {
  Grid1D grid;
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<std::vector<double>> psi;

  double at(double t, double x) const;  // throws DomainError outside the history
  double t_end() const { return t0 + dt * static_cast<double>(psi.size() - 1); }
};

/// Backward characteristic x_sign(tau; t, x) with dx/dtau = -sign c(psi(tau, x)),
/// midpoint RK2 on the history's time levels (partial first/last substeps).
double trace_characteristics(const PsiHistory& h, const WaveSpeed& ws, double t, double x,
                             double tau, int sign);

/// One step from U (time t_k) to t_k + dt with coefficients frozen at the
/// iterate levels hat_k, hat_k1. Boundary nodes are pinned to the far field.
PolarState transport_step(const PolarState& U, const PolarState& hat_k, const PolarState& hat_k1,
                          const PotentialSpec& p, const WaveSpeed& ws, double dt);

struct QuasilinearConfig {
  double dt = 0.0;  // 0: largest dt <= cfl dx / c_max dividing the run length
  double cfl = 0.9;
  double E_budget = 0.0;  // E'; 0: twice the initial energy
  double L_budget = 0.0;  // L'; 0: 2 max(|U0|_{W^{1,inf}}, sup 1/s0), per window
  double fixpoint_tol = 1e-10;
  int fixpoint_max = 60;
  double T_local = 0.25;
  int max_halvings = 20;
};

struct FixpointTrace {
  std::vector<double> diffs;  // sup-in-time W^{1,inf} differences of iterates
  int iterations = 0;
  bool converged = false;
  int halvings = 0;
  double t_start = 0.0;
  double achieved_T = 0.0;
};

struct WindowResult {
  std::vector<PolarState> trajectory;  // levels 0..m, level 0 = U0
  double achieved_T = 0.0;
  FixpointTrace trace;
};

/// Local solve on one window of `steps` steps of size dt, halving on budget
/// violations.
WindowResult fixpoint_solve(const PolarState& U0, const PotentialSpec& p, const WaveSpeed& ws,
                            const QuasilinearConfig& cfg, double dt, long steps,
                            double E_prime);

/// Step size used by evolve for a run of length t_final.
double quasilinear_dt(const Grid1D& g, const WaveSpeed& ws, const QuasilinearConfig& cfg,
                      double t_final);

double total_energy(const PolarState& u, const PotentialSpec& p, const WaveSpeed& ws);

struct QuasilinearResult {
  PolarState final;
  std::vector<FixpointTrace> traces;
  double dt = 0.0;
  double E_prime = 0.0;
};

using PolarObserver = std::function<void(const PolarState&)>;

/// Window-by-window evolution to t_final; the observer sees every level.
QuasilinearResult evolve(const PolarState& U0, const PotentialSpec& p, const WaveSpeed& ws,
                         const QuasilinearConfig& cfg, double t_final,
                         const PolarObserver& observer = {});

/// CSV snapshot: x, psi, s, phi, v, omega, r.
void write_csv(std::ostream& os, const PolarState& u);

}  // namespace nvw
