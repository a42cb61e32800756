#pragma once

#include <iosfwd>
#include <limits>
#include <utility>
#include <vector>

#include "nvw/coefficients.hpp"
#include "nvw/field.hpp"
#include "nvw/polar.hpp"

namespace nvw {

/// Pointwise energy E and flux F plus the two conserved-law fluxes:
///   E_t - (c2F)_x = 0,   F_t - (E_minus_2W)_x = 0.
struct Densities {
  std::vector<double> E;
  std::vector<double> F;
  std::vector<double> c2F;
  std::vector<double> E_minus_2W;
};

/// E = 1/2 (s^2 (phi^2 + omega^2) + v^2 + r^2) + W0(s), F = (s^2 phi omega + v r) / c.
Densities energy_density_polar(const PolarState& u, const PotentialSpec& p,
                               const WaveSpeed& ws);
/// E = 1/2 |zeta_t|^2 + 1/2 c^2 |zeta_x|^2 + W0(|zeta|), F = Re(conj(zeta_t) zeta_x).
Densities energy_density_complex(const ComplexField& f, const PotentialSpec& p,
                                 double c);

struct EnergyReport {
  double time = 0.0;
  double total_E = 0.0;
  double total_F = 0.0;
  double residual_E = std::numeric_limits<double>::quiet_NaN();
  double residual_F = std::numeric_limits<double>::quiet_NaN();
  double sup_state = 0.0;
  bool apriori_violated = false;
};

/// L1 norms over interior nodes of the centred-in-time residuals of the two
/// laws, using the snapshots before and after `mid`. `dt` is the snapshot
/// spacing.
std::pair<double, double> conservation_residuals(const Grid1D& g, const Densities& prev,
                                                 const Densities& mid, const Densities& next,
                                                 double dt);

/// Accumulates reports from equally spaced snapshots. Residuals of a row are
/// filled once its successor arrives; the first and last rows keep NaN.
class EnergyMonitor {
 public:
  explicit EnergyMonitor(Grid1D g,
                         double sup_bound = std::numeric_limits<double>::infinity());

  void push(double t, Densities d, double sup_state);
  const std::vector<EnergyReport>& reports() const { return reports_; }
  bool violated() const { return violated_; }
  double max_sup() const { return max_sup_; }
  double sup_bound() const { return sup_bound_; }

 private:
  Grid1D grid_;
  double sup_bound_;
  bool violated_ = false;
  double max_sup_ = 0.0;
  std::vector<EnergyReport> reports_;
  std::vector<Densities> last_;  // at most two
};

/// Least-squares slope of log(error) against log(h). Needs >= 3 pairs with h
/// strictly decreasing and every error > 0; throws ConfigError otherwise.
double fit_order(const std::vector<std::pair<double, double>>& pairs);

void write_energy_csv(std::ostream& os, const std::vector<EnergyReport>& rows);

}  // namespace nvw
