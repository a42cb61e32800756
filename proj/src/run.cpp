#include "nvw/run.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>

#include <fmt/format.h>

#include "nvw/diagnostics.hpp"
#include "nvw/errors.hpp"
#include "nvw/quasilinear.hpp"
#include "nvw/semilinear.hpp"

namespace nvw {

namespace fs = std::filesystem;

namespace {

// Profile g and g' of the configured family (gaussian or sine-packet).
struct Profile {
  std::string family;
  double center = 0.0, width = 1.0, k = 0.0;

  explicit Profile(const ojson& d)
      : family(d.value("family", std::string("gaussian"))),
        center(d.value("center", 0.0)),
        width(d.value("width", 1.0)),
        k(d.value("wavenumber", 0.0)) {}

  double env(double x) const {
    const double y = (x - center) / width;
    return std::exp(-y * y);
  }
  double env1(double x) const { return -2.0 * (x - center) / (width * width) * env(x); }
  double operator()(double x) const {
    return family == "sine-packet" ? env(x) * std::cos(k * (x - center)) : env(x);
  }
  double d1(double x) const {
    if (family != "sine-packet") return env1(x);
    const double ph = k * (x - center);
    return env1(x) * std::cos(ph) - k * env(x) * std::sin(ph);
  }
};

Grid1D config_grid(const RunConfig& cfg) { return Grid1D(cfg.x_min, cfg.x_max, cfg.n); }

cplx pair_value(const ojson& a) { return {a.at(0).get<double>(), a.at(1).get<double>()}; }

ComplexField read_field_file(const std::string& path, cplx far, const Grid1D& g) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("initial_data.path: cannot open '{}'", path));
  ComplexField f = read_complex_csv(in, far);
  if (f.grid.n() != g.n() || std::abs(f.grid.x_min() - g.x_min()) > 1e-9 ||
      std::abs(f.grid.x_max() - g.x_max()) > 1e-9) {
    throw ConfigError(fmt::format("initial_data.path: file grid [{}, {}] x {} differs from grid",
                                  f.grid.x_min(), f.grid.x_max(), f.grid.n()));
  }
  return f;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError(fmt::format("outputs.out_dir: cannot create '{}': {}", dir, ec.message()));
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", p.string()));
  out << text;
}

template <class Fn>
void write_stream(const fs::path& p, Fn&& fn) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", p.string()));
  fn(out);
}

// Snapshot writer: the first level within half a step of each requested time.
class Snapshots {
 public:
  Snapshots(const RunConfig& cfg, fs::path dir) : times_(cfg.snapshot_times), dir_(std::move(dir)) {
    done_.assign(times_.size(), false);
  }

  template <class State>
  void offer(const State& s, double dt) {
    for (std::size_t j = 0; j < times_.size(); ++j) {
      if (done_[j] || std::abs(s.time - times_[j]) > 0.5 * dt + 1e-12) continue;
      done_[j] = true;
      const auto name = fmt::format("snapshot_{:03d}.csv", j);
      write_stream(dir_ / name, [&](std::ostream& os) { write_csv(os, s); });
      written_.push_back(name);
    }
  }
  const std::vector<std::string>& written() const { return written_; }

 private:
  std::vector<double> times_;
  fs::path dir_;
  std::vector<bool> done_;
  std::vector<std::string> written_;
};

struct Outcome {
  int code = 0;
  std::string status = "ok";
  std::string message;
  double achieved_T = 0.0;
  std::vector<std::string> artifacts;
  ojson extra = ojson::object();
};

void run_validate(const RunConfig& cfg, const fs::path& dir, Outcome& o) {
  const PotentialSpec p = make_potential(cfg.potential_name, cfg.potential_params);
  const auto rep =
      validate_potential(p, static_cast<int>(cfg.solver_options["tail_samples"].get<std::int64_t>()));
  ojson j;
  j["potential"] = cfg.potential_name;
  j["valid"] = rep.valid;
  j["s_tilde"] = rep.s_tilde;
  j["failed_clauses"] = rep.failed_clauses();
  ojson clauses = ojson::array();
  for (const auto& c : rep.clauses) {
    clauses.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  j["clauses"] = clauses;
  j["deltas"] = rep.deltas;
  j["partial_integrals"] = rep.partial_integrals;
  write_text(dir / "report.json", j.dump(2) + "\n");
  o.artifacts.push_back("report.json");
  if (!rep.valid) {
    o.code = static_cast<int>(ExitCode::failure);
    o.status = "rejected";
    o.message = fmt::format("potential '{}' rejected; failing clause(s): {}", cfg.potential_name,
                            rep.failed_clauses());
  } else {
    o.message = fmt::format("potential '{}' admissible", cfg.potential_name);
  }
}

void flush_energy(const fs::path& dir, const EnergyMonitor& mon, Outcome& o) {
  write_stream(dir / "energy.csv", [&](std::ostream& os) { write_energy_csv(os, mon.reports()); });
  o.artifacts.push_back("energy.csv");
}

void run_semilinear(const RunConfig& cfg, const fs::path& dir, Outcome& o) {
  if (cfg.K1 != cfg.K3) throw ConfigError("wave_speed.K3: the semilinear solver needs K1 == K3");
  const double c = std::sqrt(cfg.K1);
  const PotentialSpec p = run_potential(cfg);
  const ComplexField f0 = semilinear_initial(cfg);
  const auto& so = cfg.solver_options;

  SemilinearConfig sc;
  sc.c = c;
  sc.dt = f0.grid.dx() / c;
  if (cfg.dt > 0.0 && std::abs(cfg.dt - sc.dt) > 1e-12 * sc.dt) {
    throw ConfigError(fmt::format("time.dt: the semilinear scheme needs dt = dx/c = {}", sc.dt));
  }
  sc.E_prime_factor = so["E_prime_factor"].get<double>();
  sc.picard_tol = so["picard_tol"].get<double>();
  sc.picard_max = static_cast<int>(so["picard_max"].get<std::int64_t>());
  sc.enforce_apriori = so["enforce_apriori"].get<bool>();
  const double E0 = total_energy(f0, p, c);
  if (p.validated) {
    sc.E_budget = so["E_budget"].get<double>() > 0.0 ? so["E_budget"].get<double>() : E0;
  }
  sc.T_window = so["T_window"].get<double>();
  if (!(sc.T_window > 0.0)) {
    sc.T_window = (p.validated && sc.E_budget > 0.0)
                      ? window_bound(p, sc.E_budget, c, sc.E_prime_factor)
                      : std::max(cfg.t_final, sc.dt);
  }

  EnergyMonitor mon(f0.grid, p.validated && sc.E_budget > 0.0
                                 ? apriori_constants(p, sc.E_budget, c).cE + 1e-6
                                 : std::numeric_limits<double>::infinity());
  Snapshots snaps(cfg, dir);
  long level = 0;
  auto observer = [&](const ComplexField& f) {
    o.achieved_T = f.time;
    if (level++ % cfg.energy_every == 0) {
      double sup = 0.0;
      for (const auto& z : f.zeta) sup = std::max(sup, std::abs(z));
      mon.push(f.time, energy_density_complex(f, p, c), sup);
    }
    snaps.offer(f, sc.dt);
  };
  try {
    const auto res = picard_solve(f0, p, sc, cfg.t_final, observer);
    o.extra["windows"] = res.traces.size();
    o.extra["cE"] = res.cE;
    o.extra["max_sup"] = res.max_sup;
    o.extra["apriori_violated"] = res.apriori_violated;
  } catch (...) {
    flush_energy(dir, mon, o);
    for (const auto& s : snaps.written()) o.artifacts.push_back(s);
    throw;
  }
  o.extra["dt"] = sc.dt;
  o.extra["T_window"] = sc.T_window;
  o.extra["E_budget"] = sc.E_budget;
  flush_energy(dir, mon, o);
  for (const auto& s : snaps.written()) o.artifacts.push_back(s);
}

void run_quasilinear(const RunConfig& cfg, const fs::path& dir, Outcome& o) {
  const PotentialSpec p = run_potential(cfg);
  const WaveSpeed ws(cfg.K1, cfg.K3);
  const PolarState U0 = quasilinear_initial(cfg);
  const auto& so = cfg.solver_options;
  QuasilinearConfig qc;
  qc.dt = cfg.dt;
  qc.cfl = cfg.cfl;
  qc.E_budget = so["E_budget"].get<double>();
  qc.L_budget = so["L_budget"].get<double>();
  qc.fixpoint_tol = so["fixpoint_tol"].get<double>();
  qc.fixpoint_max = static_cast<int>(so["fixpoint_max"].get<std::int64_t>());
  qc.T_local = so["T_local"].get<double>();
  qc.max_halvings = static_cast<int>(so["max_halvings"].get<std::int64_t>());
  const double dt = quasilinear_dt(U0.grid, ws, qc, cfg.t_final);

  EnergyMonitor mon(U0.grid);
  Snapshots snaps(cfg, dir);
  long level = 0;
  auto observer = [&](const PolarState& u) {
    o.achieved_T = u.time;
    if (level++ % cfg.energy_every == 0) {
      double sup = 0.0;
      for (std::size_t i = 0; i < u.s.size(); ++i) {
        sup = std::max({sup, std::abs(u.psi[i] - u.psi_inf), std::abs(u.s[i] - u.s_inf)});
      }
      mon.push(u.time, energy_density_polar(u, p, ws), sup);
    }
    snaps.offer(u, dt);
  };
  try {
    const auto res = evolve(U0, p, ws, qc, cfg.t_final, observer);
    o.extra["windows"] = res.traces.size();
    o.extra["E_prime"] = res.E_prime;
  } catch (...) {
    flush_energy(dir, mon, o);
    for (const auto& s : snaps.written()) o.artifacts.push_back(s);
    throw;
  }
  o.extra["dt"] = dt;
  flush_energy(dir, mon, o);
  for (const auto& s : snaps.written()) o.artifacts.push_back(s);
}

void run_hs2(const RunConfig& cfg, const fs::path& dir, Outcome& o) {
  const MarkerState m0 = hs2_initial(cfg);
  const double dt = cfg.dt > 0.0 ? cfg.dt : 1e-3;
  const int every = static_cast<int>(cfg.solver_options["record_every"].get<std::int64_t>());
  const auto res = evolve(m0, cfg.t_final, dt, every);
  write_stream(dir / "trajectory.csv",
               [&](std::ostream& os) { write_trajectory_csv(os, res.trajectory); });
  write_text(dir / "blowup.json", blowup_json(res.blowup) + "\n");
  o.artifacts.push_back("trajectory.csv");
  o.artifacts.push_back("blowup.json");
  o.achieved_T = res.trajectory.back().time;
  o.extra["dt"] = dt;
  o.extra["gauge"] = gauge_label(m0.gauge);
  if (res.blowup.broke) {
    o.code = static_cast<int>(ExitCode::wavebreaking);
    o.status = "wavebreaking";
    o.message = fmt::format("wave breaking: t* = {} at marker {}", fmt_num(res.blowup.t_star),
                            res.blowup.marker_index);
  }
}

void run_asymptotic(const RunConfig& cfg, const fs::path& dir, Outcome& o) {
  const AsymptoticConfig ac = asymptotic_setup(cfg);
  const PotentialSpec p = run_potential(cfg);
  const auto& so = cfg.solver_options;
  StudyOptions opt;
  opt.dx = so["dx"].get<double>();
  opt.cfl = cfg.cfl;
  opt.T_local = so["T_local"].get<double>();
  opt.markers = static_cast<int>(so["markers"].get<std::int64_t>());
  opt.hs2_dt = so["hs2_dt"].get<double>();
  opt.compare_points = static_cast<int>(so["compare_points"].get<std::int64_t>());
  opt.parallel = so["parallel"].get<bool>();
  const auto eps = so["epsilons"].get<std::vector<double>>();
  const double t_slow = so["t_slow"].get<double>();
  const auto res = convergence_study(ac, p, eps, t_slow, opt);
  write_text(dir / "study.json", study_json(res) + "\n");
  o.artifacts.push_back("study.json");
  o.achieved_T = t_slow;
  if (!res.failures.empty()) {
    o.code = static_cast<int>(ExitCode::failure);
    o.status = "partial";
    o.message = fmt::format("{} sub-run(s) failed: {}", res.failures.size(), res.failures.front());
  } else {
    o.message = res.order_available ? fmt::format("fitted order {:.3f}", res.fitted_order)
                                    : std::string("order not available");
  }
}

}  // namespace

PotentialSpec run_potential(const RunConfig& cfg) {
  PotentialSpec p = make_potential(cfg.potential_name, cfg.potential_params);
  if (cfg.potential_name == "zero") return p;
  return validate_or_throw(std::move(p));
}

ComplexField semilinear_initial(const RunConfig& cfg) {
  const Grid1D g = config_grid(cfg);
  const auto& d = cfg.initial_data;
  const cplx far = pair_value(d["far_field"]);
  if (d["family"] == "file") return read_field_file(d["path"].get<std::string>(), far, g);
  const Profile prof(d);
  const cplx A = pair_value(d["zeta_amplitude"]);
  const double dir = static_cast<double>(d["direction"].get<std::int64_t>());
  const double c = std::sqrt(cfg.K1);
  ComplexField f;
  f.grid = g;
  f.far_field = far;
  f.zeta.resize(g.n());
  f.zeta_t.resize(g.n());
  for (int i = 0; i < g.n(); ++i) {
    const double x = g.x(i);
    f.zeta[i] = far + A * prof(x);
    f.zeta_t[i] = -dir * c * A * prof.d1(x);
  }
  return f;
}

PolarState quasilinear_initial(const RunConfig& cfg) {
  const Grid1D g = config_grid(cfg);
  const WaveSpeed ws(cfg.K1, cfg.K3);
  const auto& d = cfg.initial_data;
  const double psi_inf = d["psi_inf"].get<double>();
  const double s_inf = d["s_inf"].get<double>();
  if (d["family"] == "file") {
    const cplx far = std::polar(s_inf, psi_inf);
    PolarState u = to_polar(read_field_file(d["path"].get<std::string>(), far, g), ws);
    return u;
  }
  const Profile prof(d);
  const double Ap = d["psi_amplitude"].get<double>();
  const double As = d["s_amplitude"].get<double>();
  const double dir = static_cast<double>(d["direction"].get<std::int64_t>());
  PolarState u = PolarState::equilibrium(g, psi_inf, s_inf);
  for (int i = 0; i < g.n(); ++i) {
    const double x = g.x(i);
    u.psi[i] = psi_inf + Ap * prof(x);
    u.s[i] = s_inf + As * prof(x);
    const double c = ws.c(u.psi[i]);
    u.phi[i] = -dir * c * Ap * prof.d1(x);
    u.v[i] = -dir * c * As * prof.d1(x);
  }
  u.make_compatible(ws);
  return u;
}

MarkerState hs2_initial(const RunConfig& cfg) {
  const auto& d = cfg.initial_data;
  const auto& so = cfg.solver_options;
  const Profile prof(d);
  const double Au = d["u_amplitude"].get<double>();
  const double Ar = d["rho_amplitude"].get<double>();
  const double floor = d["rho_floor"].get<double>();
  return make_markers(
      so["xi_min"].get<double>(), so["xi_max"].get<double>(),
      static_cast<int>(so["markers"].get<std::int64_t>()), [&](double x) { return Au * prof(x); },
      [&](double x) { return Au * prof.d1(x); }, [&](double x) { return floor + Ar * prof(x); },
      parse_gauge(so["gauge"].get<std::string>()));
}

AsymptoticConfig asymptotic_setup(const RunConfig& cfg) {
  const auto& d = cfg.initial_data;
  const auto& so = cfg.solver_options;
  AsymptoticConfig ac;
  ac.psi0 = so["psi0"].get<double>();
  ac.s0 = so["s0"].get<double>();
  ac.ws = WaveSpeed(cfg.K1, cfg.K3);
  const double center = d["center"].get<double>();
  const double width = d["width"].get<double>();
  ac.u_init = Bump{d["u_amplitude"].get<double>(), center, width};
  ac.r_init = Bump{d["r_amplitude"].get<double>(), center, width};
  ac.gauge = parse_gauge(so["gauge"].get<std::string>());
  ac.validate();
  return ac;
}

int run(const RunConfig& cfg, bool quiet) {
  Outcome o;
  fs::path dir(cfg.out_dir);
  try {
    ensure_dir(cfg.out_dir);
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return static_cast<int>(e.code());
  }
  try {
    if (cfg.solver == "validate-potential") {
      run_validate(cfg, dir, o);
    } else if (cfg.solver == "semilinear") {
      run_semilinear(cfg, dir, o);
    } else if (cfg.solver == "quasilinear") {
      run_quasilinear(cfg, dir, o);
    } else if (cfg.solver == "hs2") {
      run_hs2(cfg, dir, o);
    } else if (cfg.solver == "asymptotic") {
      run_asymptotic(cfg, dir, o);
    } else {
      throw ConfigError(fmt::format("solver: unknown '{}'", cfg.solver));
    }
  } catch (const Error& e) {
    o.code = static_cast<int>(e.code());
    o.status = "error";
    o.message = e.what();
    if (const auto* wb = dynamic_cast<const WavebreakingError*>(&e)) o.extra["break_time"] = wb->time();
  } catch (const std::exception& e) {
    o.code = static_cast<int>(ExitCode::failure);
    o.status = "error";
    o.message = e.what();
  }

  ojson m;
  m["version"] = kVersion;
  m["solver"] = cfg.solver;
  m["status"] = o.status;
  m["exit_code"] = o.code;
  m["message"] = o.message;
  m["achieved_T"] = o.achieved_T;
  m["artifacts"] = o.artifacts;
  m["details"] = o.extra;
  m["config"] = ojson::parse(dump_config(cfg));
  try {
    write_text(dir / "manifest.json", m.dump(2) + "\n");
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    if (o.code == 0) o.code = static_cast<int>(ExitCode::failure);
  }
  if (o.code != 0) {
    fmt::print(stderr, "{}: {} (exit {})\n", cfg.solver, o.message, o.code);
  } else if (!quiet) {
    fmt::print("{}: {}; achieved_T = {}; artifacts in {}\n", cfg.solver,
               o.message.empty() ? std::string("ok") : o.message, fmt_num(o.achieved_T),
               cfg.out_dir);
  }
  return o.code;
}

}  // namespace nvw
