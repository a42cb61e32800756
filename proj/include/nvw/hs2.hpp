#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "nvw/field.hpp"

namespace nvw {

/// Integration constant of u_t + u u_x = 1/2 int_{-inf}^x (u_x^2 + rho^2) + C(t).
enum class Gauge {
  left,   // C = 0: u_t + u u_x -> 0 at -inf
  right,  // C = -1/2 total energy: u_t + u u_x -> 0 at +inf
};

std::string gauge_label(Gauge g);
Gauge parse_gauge(const std::string& s);  // "left" / "right"; throws ConfigError

struct MarkerState {
  std::vector<double> xi, x, u, alpha, rho, J;
  double dxi = 1.0;
  double time = 0.0;
  Gauge gauge = Gauge::left;

  std::size_t size() const { return xi.size(); }
  /// sum of (alpha^2 + rho^2) J dxi, trapezoid weights
  double total_energy() const;
  /// sum of rho J dxi, trapezoid weights
  double total_mass() const;
};

/// Markers uniform in xi on [a, b] with x = xi, J = 1.
MarkerState make_markers(double a, double b, int count, const std::function<double(double)>& u,
                         const std::function<double(double)>& ux,
                         const std::function<double(double)>& rho, Gauge gauge = Gauge::left);

struct MarkerRates {
  std::vector<double> x, u, alpha, rho, J;
};

/// Lagrangian time derivatives. Throws WavebreakingError if any J <= 0.
MarkerRates marker_rhs(const MarkerState& m);

struct BlowupReport {
  bool broke = false;
  double t_star = 0.0;
  int marker_index = -1;
};

struct HS2Result {
  std::vector<MarkerState> trajectory;  // initial state, recorded states, last state
  BlowupReport blowup;
};

/// Classical RK4. Requires dt max|alpha0| <= 0.1 (ConfigError otherwise).
/// Records every `record_every` steps (0: only the first and last states).
/// Stops at the first J <= 0 or once dt max(-alpha) > 0.5 and extrapolates the
/// breaking time from 1/alpha, which is exactly linear when rho = 0.
HS2Result evolve(const MarkerState& m0, double t_final, double dt, int record_every = 0);

struct EulerianFields {
  std::vector<double> u;
  std::vector<double> rho;
};

/// u by piecewise cubic Hermite interpolation (slopes alpha) over marker
/// positions; rho as dual-cell differences of the Hermite-interpolated
/// cumulative mass (slopes rho), so the trapezoid integral of rho equals the
/// marker mass over the grid interval. Throws DomainError on a coverage gap.
EulerianFields sample_eulerian(const MarkerState& m, const Grid1D& grid);

/// Hermite interpolant of (x_j, f_j, f'_j); slopes limited on monotone stretches.
double hermite_eval(const std::vector<double>& x, const std::vector<double>& f,
                    const std::vector<double>& df, double q);

void write_trajectory_csv(std::ostream& os, const std::vector<MarkerState>& traj);
std::string blowup_json(const BlowupReport& b);

}  // namespace nvw
