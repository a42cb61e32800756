#include "nvw/diagnostics.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "nvw/errors.hpp"

namespace nvw {

Densities energy_density_polar(const PolarState& u, const PotentialSpec& p,
                               const WaveSpeed& ws) {
  const int n = u.grid.n();
  Densities d;
  d.E.resize(n);
  d.F.resize(n);
  d.c2F.resize(n);
  d.E_minus_2W.resize(n);
  for (int i = 0; i < n; ++i) {
    const double s = u.s[i];
    const double c = ws.c(u.psi[i]);
    const double w = p(s);
    const double kin = 0.5 * (s * s * (u.phi[i] * u.phi[i] + u.omega[i] * u.omega[i]) +
                              u.v[i] * u.v[i] + u.r[i] * u.r[i]);
    const double flux = s * s * u.phi[i] * u.omega[i] + u.v[i] * u.r[i];
    d.E[i] = kin + w;
    d.F[i] = flux / c;
    d.c2F[i] = flux * c;
    d.E_minus_2W[i] = kin - w;
  }
  return d;
}

Densities energy_density_complex(const ComplexField& f, const PotentialSpec& p, double c) {
  const int n = f.grid.n();
  const auto zx = derivative(f.grid, std::span<const cplx>(f.zeta));
  Densities d;
  d.E.resize(n);
  d.F.resize(n);
  d.c2F.resize(n);
  d.E_minus_2W.resize(n);
  for (int i = 0; i < n; ++i) {
    const double kin = 0.5 * std::norm(f.zeta_t[i]) + 0.5 * c * c * std::norm(zx[i]);
    const double w = p(std::abs(f.zeta[i]));
    const double flux = (std::conj(f.zeta_t[i]) * zx[i]).real();
    d.E[i] = kin + w;
    d.F[i] = flux;
    d.c2F[i] = c * c * flux;
    d.E_minus_2W[i] = kin - w;
  }
  return d;
}

std::pair<double, double> conservation_residuals(const Grid1D& g, const Densities& prev,
                                                 const Densities& mid, const Densities& next,
                                                 double dt) {
  const int n = g.n();
  const auto gx = derivative(g, std::span<const double>(mid.c2F));
  const auto hx = derivative(g, std::span<const double>(mid.E_minus_2W));
  std::vector<double> re(n, 0.0), rf(n, 0.0);
  for (int i = 1; i < n - 1; ++i) {
    re[i] = std::abs((next.E[i] - prev.E[i]) / (2.0 * dt) - gx[i]);
    rf[i] = std::abs((next.F[i] - prev.F[i]) / (2.0 * dt) - hx[i]);
  }
  return {integrate(g, re), integrate(g, rf)};
}

EnergyMonitor::EnergyMonitor(Grid1D g, double sup_bound)
    : grid_(std::move(g)), sup_bound_(sup_bound) {}

void EnergyMonitor::push(double t, Densities d, double sup_state) {
  EnergyReport row;
  row.time = t;
  row.total_E = integrate(grid_, d.E);
  row.total_F = integrate(grid_, d.F);
  row.sup_state = sup_state;
  row.apriori_violated = sup_state > sup_bound_;
  violated_ = violated_ || row.apriori_violated;
  max_sup_ = std::max(max_sup_, sup_state);
  reports_.push_back(row);

  if (last_.size() == 2) {
    const std::size_t k = reports_.size();
    const double dt = 0.5 * (reports_[k - 1].time - reports_[k - 3].time);
    auto [re, rf] = conservation_residuals(grid_, last_[0], last_[1], d, dt);
    reports_[k - 2].residual_E = re;
    reports_[k - 2].residual_F = rf;
    last_.erase(last_.begin());
  }
  last_.push_back(std::move(d));
}

double fit_order(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw ConfigError("fit_order: need at least 3 (h, error) pairs");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!(pairs[i].second > 0.0) || !std::isfinite(pairs[i].second)) {
      throw ConfigError(fmt::format("fit_order: error #{} is not positive ({})", i,
                                    pairs[i].second));
    }
    if (!(pairs[i].first > 0.0)) throw ConfigError("fit_order: h must be positive");
    if (i > 0 && !(pairs[i].first < pairs[i - 1].first)) {
      throw ConfigError("fit_order: h must be strictly decreasing");
    }
  }
  double mx = 0.0, my = 0.0;
  const double m = static_cast<double>(pairs.size());
  for (const auto& [h, e] : pairs) {
    mx += std::log(h) / m;
    my += std::log(e) / m;
  }
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [h, e] : pairs) {
    const double dx = std::log(h) - mx;
    sxy += dx * (std::log(e) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

void write_energy_csv(std::ostream& os, const std::vector<EnergyReport>& rows) {
  os << "t,total_E,total_F,residual_E,residual_F,sup_state,apriori_violated\n";
  for (const auto& r : rows) {
    os << fmt_num(r.time) << ',' << fmt_num(r.total_E) << ',' << fmt_num(r.total_F) << ','
       << fmt_num(r.residual_E) << ',' << fmt_num(r.residual_F) << ',' << fmt_num(r.sup_state)
       << ',' << (r.apriori_violated ? 1 : 0) << '\n';
  }
}

}  // namespace nvw
