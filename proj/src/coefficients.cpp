#include "nvw/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "nvw/errors.hpp"

namespace nvw {

namespace {

// k-th derivative of (sign (s - root))^exponent.
double factor_derivative(const PowerFactor& f, int k, double s) {
  const double u = f.sign * (s - f.root);
  const bool integral = f.exponent >= 0.0 && std::floor(f.exponent) == f.exponent;
  double falling = 1.0;
  for (int j = 0; j < k; ++j) {
    const double e = f.exponent - j;
    if (integral && e == 0.0) return 0.0;
    falling *= e;
  }
  return std::pow(f.sign, k) * falling * std::pow(u, f.exponent - k);
}

double product_derivative(double scale, const std::vector<PowerFactor>& factors,
                          int order, double s) {
  std::array<double, 5> acc{1.0, 0.0, 0.0, 0.0, 0.0};
  for (const auto& f : factors) {
    std::array<double, 5> fv{};
    for (int k = 0; k <= order; ++k) fv[k] = factor_derivative(f, k, s);
    std::array<double, 5> next{};
    for (int k = 0; k <= order; ++k) {
      double binom = 1.0;
      double sum = 0.0;
      for (int j = 0; j <= k; ++j) {
        sum += binom * acc[j] * fv[k - j];
        binom = binom * (k - j) / (j + 1);
      }
      next[k] = sum;
    }
    acc = next;
  }
  return scale * acc[order];
}

bool all_finite(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

constexpr double kTailDeltaMin = 1e-6;

}  // namespace

PotentialSpec product_potential(std::string name, double scale,
                                std::vector<PowerFactor> factors,
                                std::vector<double> zeros,
                                std::optional<double> flat_point) {
  PotentialSpec p;
  p.name = std::move(name);
  for (int k = 0; k < 5; ++k) {
    p.derivs[k] = [scale, factors, k](double s) {
      return product_derivative(scale, factors, k, s);
    };
  }
  p.zeros = std::move(zeros);
  p.flat_point = flat_point;
  return p;
}

PotentialSpec reference_potential() {
  return product_potential("reference", 1.0, {{0.0, 2.0, 1.0}, {1.0, -2.0, -1.0}},
                           {0.0}, std::nullopt);
}

PotentialSpec flat4_potential(double s0) {
  if (!(s0 > 0.0 && s0 < 1.0)) {
    throw ConfigError(fmt::format("potential.s0 must lie in (0,1), got {}", s0));
  }
  return product_potential("flat4", 1.0,
                           {{0.0, 2.0, 1.0}, {s0, 4.0, 1.0}, {1.0, -2.0, -1.0}},
                           {0.0, s0}, s0);
}

PotentialSpec quadratic_potential() {
  return product_potential("quadratic", 1.0, {{0.0, 2.0, 1.0}}, {0.0}, std::nullopt);
}

PotentialSpec zero_potential() {
  PotentialSpec p;
  p.name = "zero";
  for (auto& d : p.derivs) d = [](double) { return 0.0; };
  return p;
}

PotentialSpec make_potential(const std::string& name,
                             const std::map<std::string, double>& params) {
  auto no_params = [&] {
    if (!params.empty()) {
      throw ConfigError(fmt::format("potential.params: '{}' takes no parameters", name));
    }
  };
  if (name == "reference") {
    no_params();
    return reference_potential();
  }
  if (name == "flat4") {
    for (const auto& [k, v] : params) {
      if (k != "s0") throw ConfigError(fmt::format("potential.params.{}: unknown key", k));
    }
    auto it = params.find("s0");
    return flat4_potential(it == params.end() ? 0.5 : it->second);
  }
  if (name == "quadratic") {
    no_params();
    return quadratic_potential();
  }
  if (name == "zero") {
    no_params();
    return zero_potential();
  }
  throw ConfigError(fmt::format("potential.name: unknown potential '{}'", name));
}

const ClauseResult* ValidationReport::clause(const std::string& name) const {
  for (const auto& c : clauses) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string ValidationReport::failed_clauses() const {
  std::string out;
  for (const auto& c : clauses) {
    if (c.passed) continue;
    if (!out.empty()) out += ", ";
    out += c.name;
  }
  return out;
}

ValidationReport validate_potential(const PotentialSpec& p, int tail_samples) {
  ValidationReport rep;
  const int n = std::max(tail_samples, 100);
  const double s_last = 1.0 - kTailDeltaMin;

  std::vector<double> ss(n + 1), w(n + 1), wp(n + 1);
  bool finite = true;
  std::string bad;
  for (int j = 0; j <= n; ++j) {
    ss[j] = s_last * j / n;
    try {
      w[j] = p(ss[j]);
      wp[j] = p.d(1, ss[j]);
    } catch (const std::exception& e) {
      w[j] = wp[j] = std::numeric_limits<double>::quiet_NaN();
    }
    if (!all_finite({w[j], wp[j]}) && finite) {
      finite = false;
      bad = fmt::format("non-finite value at s={}", ss[j]);
    }
  }
  rep.clauses.push_back({kClauseEvaluation, finite, finite ? "" : bad});

  // Non-negativity.
  {
    double worst = 0.0;
    double at = 0.0;
    for (int j = 0; j <= n; ++j) {
      if (std::isfinite(w[j]) && w[j] < worst) {
        worst = w[j];
        at = ss[j];
      }
    }
    const bool ok = worst >= -1e-14;
    rep.clauses.push_back({kClauseNonNegative, ok,
                           ok ? "" : fmt::format("W0({}) = {}", at, worst)});
  }

  // C^4 consistency: centred differences of W0^(k) against W0^(k+1).
  {
    bool ok = true;
    std::string detail;
    const int m = 400;
    for (int k = 0; k < 4 && ok; ++k) {
      for (int j = 1; j < m; ++j) {
        const double s = 0.99 * j / m;
        const double h = 1e-4 * std::min(std::max(s, 0.01), 1.0 - s);
        if (s - h < 0.0) continue;
        const double fd = (p.d(k, s + h) - p.d(k, s - h)) / (2.0 * h);
        const double exact = p.d(k + 1, s);
        const double scale =
            std::max({std::abs(exact), std::abs(p.d(k, s)) / (1.0 - s), 1.0});
        if (!all_finite({fd, exact}) || std::abs(fd - exact) > 1e-5 * scale) {
          ok = false;
          detail = fmt::format("derivative {} inconsistent at s={} (fd {}, eval {})",
                               k + 1, s, fd, exact);
          break;
        }
      }
    }
    rep.clauses.push_back({kClauseSmoothness, ok, detail});
  }

  // Zero set: listed zeros must be genuine double-root-type zeros, and
  // the quadratic limit at s = 0 must be finite.
  {
    bool ok = true;
    std::string detail;
    for (double z : p.zeros) {
      const double w0 = p(z);
      const double w2 = p.d(2, z);
      if (!(std::abs(w0) <= 1e-12) || !std::isfinite(w2) || w2 < -1e-10) {
        ok = false;
        detail = fmt::format("zero s*={}: W0={}, W0''={}", z, w0, w2);
        break;
      }
    }
    if (ok && !std::isfinite(p.d(2, 0.0))) {
      ok = false;
      detail = "W0''(0) is not finite";
    }
    if (ok && p.flat_point) {
      const double s0 = *p.flat_point;
      for (int k = 1; k <= 3; ++k) {
        if (!(std::abs(p.d(k, s0)) <= 1e-10)) {
          ok = false;
          detail = fmt::format("flat point {}: |W0^({})| = {}", s0, k, std::abs(p.d(k, s0)));
          break;
        }
      }
    }
    rep.clauses.push_back({kClauseZeroSet, ok, detail});
  }

  // Divergence of int_s^1 W0(u)(1-u) du, probed decade by decade. A
  // convergent tail shows geometrically shrinking increments; anything at
  // least logarithmically divergent keeps them from decaying.
  {
    using boost::math::quadrature::gauss_kronrod;
    auto integrand = [&](double u) { return p(u) * (1.0 - u); };
    rep.deltas = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    double lo = 0.0;
    double acc = 0.0;
    std::vector<double> incr;
    bool ok = finite;
    for (double delta : rep.deltas) {
      const double hi = 1.0 - delta;
      double piece = 0.0;
      try {
        piece = gauss_kronrod<double, 31>::integrate(integrand, lo, hi, 15, 1e-12);
      } catch (const std::exception&) {
        piece = std::numeric_limits<double>::quiet_NaN();
      }
      acc += piece;
      rep.partial_integrals.push_back(acc);
      if (lo > 0.0) incr.push_back(piece);
      lo = hi;
    }
    std::string detail;
    if (!std::isfinite(acc)) {
      ok = false;
      detail = "partial integral not finite";
    } else {
      for (double d : incr) ok = ok && d > 0.0;
      if (ok && incr.back() < 0.5 * incr.front()) ok = false;
      if (!ok) {
        detail = fmt::format(
            "partial integrals of W0(u)(1-u) level off: last decade adds {:.3e} "
            "vs first {:.3e} (total {:.6g} at delta=1e-6)",
            incr.back(), incr.front(), acc);
      }
    }
    rep.clauses.push_back({kClauseDivergence, ok, detail});
  }

  // s~ : W0 > 0 and W0' > 0 on (s~, 1).
  {
    double st = 0.0;
    for (int j = n; j >= 0; --j) {
      if (!(w[j] > 0.0 && wp[j] > 0.0)) {
        st = ss[j];
        break;
      }
    }
    rep.s_tilde = st;
    const bool ok = finite && st < 0.999;
    rep.clauses.push_back(
        {kClauseTail, ok, ok ? "" : fmt::format("W0 or W0' not positive near s={}", st)});
  }

  rep.valid = std::all_of(rep.clauses.begin(), rep.clauses.end(),
                          [](const ClauseResult& c) { return c.passed; });
  return rep;
}

PotentialSpec validate_or_throw(PotentialSpec p, int tail_samples) {
  const auto rep = validate_potential(p, tail_samples);
  if (!rep.valid) {
    std::string msg = fmt::format("potential '{}' rejected; failing clause(s): {}",
                                  p.name, rep.failed_clauses());
    for (const auto& c : rep.clauses) {
      if (!c.passed && !c.detail.empty()) msg += fmt::format(" [{}: {}]", c.name, c.detail);
    }
    throw ConfigError(msg);
  }
  p.validated = true;
  p.s_tilde = rep.s_tilde;
  return p;
}

WaveSpeed::WaveSpeed(double k1, double k3) : K1(k1), K3(k3) {
  if (!(k1 > 0.0) || !std::isfinite(k1)) {
    throw ConfigError(fmt::format("wave_speed.K1 must be positive, got {}", k1));
  }
  if (!(k3 > 0.0) || !std::isfinite(k3)) {
    throw ConfigError(fmt::format("wave_speed.K3 must be positive, got {}", k3));
  }
}

double WaveSpeed::c(double psi) const {
  const double sn = std::sin(psi);
  const double cs = std::cos(psi);
  return std::sqrt(K1 * sn * sn + K3 * cs * cs);
}

double WaveSpeed::cprime(double psi) const {
  return (K1 - K3) * std::sin(psi) * std::cos(psi) / c(psi);
}

double WaveSpeed::c_max() const { return std::sqrt(std::max(K1, K3)); }
double WaveSpeed::c_min() const { return std::sqrt(std::min(K1, K3)); }

SpeedValue wave_speed(const WaveSpeed& ws, double psi) {
  return {ws.c(psi), ws.cprime(psi)};
}

double tail_moment(const PotentialSpec& p, double lo, double S) {
  using boost::math::quadrature::gauss_kronrod;
  if (S <= lo) return 0.0;
  auto f = [&](double u) { return p(u) * (S - u); };
  // capped depth: for tiny S the relative tolerance chases round-off
  return gauss_kronrod<double, 31>::integrate(f, lo, S, 10, 1e-13);
}

AprioriConstants apriori_constants(const PotentialSpec& p, double E, double c,
                                   int scan_points) {
  if (!p.validated) {
    throw ConfigError(fmt::format("apriori_constants: potential '{}' not validated", p.name));
  }
  if (!(E > 0.0)) throw ConfigError(fmt::format("apriori_constants: E must be > 0, got {}", E));
  if (!(c > 0.0)) throw ConfigError(fmt::format("apriori_constants: c must be > 0, got {}", c));

  AprioriConstants out;
  out.E_budget = E;
  const double target = E * E / (8.0 * c * c);
  double lo = p.s_tilde;
  double hi = 1.0 - 1e-15;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (tail_moment(p, p.s_tilde, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.cE = 0.5 * (lo + hi);
  out.CE = p(out.cE);

  const int m = std::max(scan_points, 10);
  for (int j = 0; j <= m; ++j) {
    const double s = out.cE * j / m;
    const double w = p(s);
    const double w1 = p.d(1, s);
    const double w2 = p.d(2, s);
    double ratio;
    if (w < 1e-250) {
      const auto near = std::find_if(p.zeros.begin(), p.zeros.end(),
                                     [&](double z) { return std::abs(z - s) < 1e-3; });
      if (near == p.zeros.end()) {
        throw ConfigError(fmt::format(
            "apriori_constants: W0'^2/W0 unbounded near s={} (no listed zero)", s));
      }
      ratio = 2.0 * p.d(2, *near);
    } else {
      ratio = w1 * w1 / w;
    }
    if (!std::isfinite(ratio)) {
      throw ConfigError(fmt::format("apriori_constants: W0'^2/W0 not finite at s={}", s));
    }
    out.kE = std::max(out.kE, ratio);
    out.LE = std::max(out.LE, std::abs(w1));
    out.LEp = std::max(out.LEp, s > 0.0 ? std::abs(w1 / s) : std::abs(w2));
    out.LEpp = std::max(out.LEpp, std::abs(w2));
  }
  return out;
}

}  // namespace nvw
