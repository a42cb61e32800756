#pragma once

#include <functional>
#include <vector>

#include "nvw/coefficients.hpp"
#include "nvw/field.hpp"

namespace nvw {

/// Solver settings for zeta_tt - c^2 zeta_xx + W0'(|zeta|)/|zeta| zeta = 0.
struct SemilinearConfig {
  double c = 1.0;
  double dt = 0.0;        // must equal dx / c
  double T_window = 0.0;  // Picard window length
  double E_budget = 0.0;  // E; 0 disables the a priori monitor and window check
  double E_prime_factor = 2.0;
  double picard_tol = 1e-10;
  int picard_max = 60;
  bool enforce_apriori = false;  // throw BudgetError when the monitor trips
};

/// Config with dt = dx/c and the largest window the contraction bound allows
/// for E' = factor * E. Requires a validated potential.
SemilinearConfig make_semilinear_config(const Grid1D& g, double c, const PotentialSpec& p,
                                        double E, double E_prime_factor = 2.0);

/// (1 / (2 sqrt(kE'))) (1 - E/E') for E' = factor * E.
double window_bound(const PotentialSpec& p, double E, double c, double E_prime_factor);

struct PicardTrace {
  int iterate_count = 0;
  std::vector<double> diff_norms;
  bool converged = false;
  double t_start = 0.0;
  double t_end = 0.0;
};

/// W0'(|z|)/|z| z, equal to W0''(0) z at the origin. Throws BudgetError if |z| >= 1.
cplx source_term(const PotentialSpec& p, cplx z);

/// d'Alembert evolution ignoring the potential, at t a multiple of dx/c.
/// Data are continued by the far field outside the grid. Throws DomainError if
/// the perturbation reaches the grid ends, ConfigError if t is not aligned.
ComplexField free_wave(const ComplexField& f0, double c, double t);

struct DuhamelCorrection {
  std::vector<cplx> zeta;
  std::vector<cplx> zeta_t;
};

/// Duhamel corrections at t = k dt from a history sampled at spacing dt = dx/c
/// (history[j].time = j dt), by trapezoid quadrature over node-aligned cones.
/// Direct summation, independent of the incremental path in picard_solve.
DuhamelCorrection duhamel_apply(const std::vector<ComplexField>& history,
                                const PotentialSpec& p, double c, double t);

struct SemilinearResult {
  ComplexField final;
  std::vector<PicardTrace> traces;  // one per window
  double cE = 1.0;                  // a priori bound used by the monitor
  double max_sup = 0.0;
  bool apriori_violated = false;
};

using FieldObserver = std::function<void(const ComplexField&)>;

/// Windowed Picard iteration of the strong form. The observer sees every
/// accepted time level, including t = 0. The run ends at the first multiple of
/// dt at or beyond t_final.
SemilinearResult picard_solve(const ComplexField& f0, const PotentialSpec& p,
                              const SemilinearConfig& cfg, double t_final,
                              const FieldObserver& observer = {});

/// Total energy int 1/2|zeta_t|^2 + 1/2 c^2 |zeta_x|^2 + W0(|zeta|).
double total_energy(const ComplexField& f, const PotentialSpec& p, double c);

}  // namespace nvw
