#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nvw {

/// Order-parameter potential W0 on [0,1) with its first four derivatives.
///
/// Built-in potentials come from the factories below; custom ones can be
/// assembled directly. `validated` is only set by `validate_or_throw`.
struct PotentialSpec {
  std::string name;
  std::array<std::function<double(double)>, 5> derivs;
  std::vector<double> zeros;         // caller-supplied zero set
  std::optional<double> flat_point;  // W0' = W0'' = W0''' = 0 there
  bool validated = false;
  double s_tilde = 0.0;  // W0, W0' > 0 on (s_tilde, 1); set on validation

  double operator()(double s) const { return derivs[0](s); }
  double d(int order, double s) const { return derivs.at(order)(s); }
};

/// W0(s) = s^2 / (1-s)^2.
PotentialSpec reference_potential();
/// W0(s) = s^2 (s-s0)^4 / (1-s)^2, flat to third order at s0.
PotentialSpec flat4_potential(double s0);
/// W0(s) = s^2. Fails the blow-up-at-one requirement.
PotentialSpec quadratic_potential();
/// W0 = 0. Used as a source-free surrogate.
PotentialSpec zero_potential();

/// One factor (sign * (s - root))^exponent of a product potential.
struct PowerFactor {
  double root = 0.0;
  double exponent = 1.0;
  double sign = 1.0;
};

/// W0(s) = scale * prod_j factor_j(s), differentiated exactly by the
/// Leibniz rule. Factored evaluation keeps high-order zeros accurate.
PotentialSpec product_potential(std::string name, double scale,
                                std::vector<PowerFactor> factors,
                                std::vector<double> zeros,
                                std::optional<double> flat_point);

/// Look up a built-in potential: "reference", "flat4" (param "s0"),
/// "quadratic", "zero".
PotentialSpec make_potential(const std::string& name,
                             const std::map<std::string, double>& params);

struct ClauseResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ClauseResult> clauses;
  bool valid = false;
  double s_tilde = 0.0;
  std::vector<double> deltas;            // tail cut-offs used by the divergence test
  std::vector<double> partial_integrals; // int_0^{1-delta} W0(u)(1-u) du

  const ClauseResult* clause(const std::string& name) const;
  /// Comma-separated names of the failing clauses (empty when valid).
  std::string failed_clauses() const;
};

// Clause names, as they appear in reports.
inline constexpr const char* kClauseEvaluation = "evaluation";
inline constexpr const char* kClauseNonNegative = "non_negativity";
inline constexpr const char* kClauseSmoothness = "c4_smoothness";
inline constexpr const char* kClauseZeroSet = "zero_set";
inline constexpr const char* kClauseDivergence = "divergence";
inline constexpr const char* kClauseTail = "positive_tail";

/// Check W0 against the admissibility requirements numerically. Never throws
/// for an inadmissible potential; the report says which clause failed.
ValidationReport validate_potential(const PotentialSpec& p,
                                    int tail_samples = 20000);

/// Returns a copy of `p` marked validated, or throws ConfigError naming the
/// failing clauses.
PotentialSpec validate_or_throw(PotentialSpec p, int tail_samples = 20000);

/// Frank constants of the anisotropic wave speed
/// c(psi)^2 = K1 sin^2 psi + K3 cos^2 psi.
struct WaveSpeed {
  double K1 = 1.0;
  double K3 = 1.0;

  WaveSpeed() = default;
  WaveSpeed(double k1, double k3);  // throws ConfigError unless both > 0

  double c(double psi) const;
  double cprime(double psi) const;
  double c_max() const;
  double c_min() const;
  bool isotropic() const { return K1 == K3; }
};

struct SpeedValue {
  double c;
  double cprime;
};

SpeedValue wave_speed(const WaveSpeed& ws, double psi);

struct AprioriConstants {
  double cE = 0.0;    // sup |zeta| bound, < 1
  double CE = 0.0;    // W0(cE)
  double kE = 0.0;    // W0'^2 <= kE W0 on [0, cE]
  double LE = 0.0;    // sup |W0'|
  double LEp = 0.0;   // sup |W0'/s|
  double LEpp = 0.0;  // sup |W0''|
  double E_budget = 0.0;
};

/// Energy-dependent bounds for a validated potential at constant speed c.
///
/// cE solves  int_{s~}^{S} W0(u) (S-u) du = E^2 / (8 c^2)  for S. This is the
/// bound obtained from the Sobolev estimate |zeta(x)-zeta(y)| <= sqrt(2E/c^2
/// |x-y|) with the change of variables carried through exactly.
AprioriConstants apriori_constants(const PotentialSpec& p, double E, double c,
                                   int scan_points = 100000);

/// int_{lo}^{S} W0(u) (S-u) du, adaptive Gauss-Kronrod.
double tail_moment(const PotentialSpec& p, double lo, double S);

}  // namespace nvw
