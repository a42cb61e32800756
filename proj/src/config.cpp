#include "nvw/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "nvw/coefficients.hpp"
#include "nvw/errors.hpp"

namespace nvw {

namespace {

bool known_solver(const std::string& s) {
  return std::find(std::begin(kSolvers), std::end(kSolvers), s) != std::end(kSolvers);
}

std::string type_name(const ojson& v) {
  if (v.is_boolean()) return "boolean";
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  if (v.is_object()) return "object";
  return "null";
}

// Value of `user` coerced to the type of `def`, or ConfigError naming `path`.
ojson coerce(const ojson& user, const ojson& def, const std::string& path) {
  if (def.is_boolean()) {
    if (!user.is_boolean()) {
      throw ConfigError(fmt::format("{}: expected boolean, got {}", path, type_name(user)));
    }
    return user;
  }
  if (def.is_number_integer()) {
    if (!user.is_number_integer()) {
      throw ConfigError(fmt::format("{}: expected integer, got {}", path, type_name(user)));
    }
    return user;
  }
  if (def.is_number()) {
    if (!user.is_number()) {
      throw ConfigError(fmt::format("{}: expected number, got {}", path, type_name(user)));
    }
    const double v = user.get<double>();
    if (!std::isfinite(v)) throw ConfigError(fmt::format("{}: must be finite", path));
    return v;
  }
  if (def.is_string()) {
    if (!user.is_string()) {
      throw ConfigError(fmt::format("{}: expected string, got {}", path, type_name(user)));
    }
    return user;
  }
  if (def.is_array()) {
    if (!user.is_array()) {
      throw ConfigError(fmt::format("{}: expected array, got {}", path, type_name(user)));
    }
    ojson out = ojson::array();
    for (std::size_t i = 0; i < user.size(); ++i) {
      if (!user[i].is_number()) {
        throw ConfigError(fmt::format("{}[{}]: expected number", path, i));
      }
      out.push_back(user[i].get<double>());
    }
    return out;
  }
  throw ConfigError(fmt::format("{}: unsupported value", path));
}

// Defaults overlaid with the user's keys; unknown keys are rejected.
ojson merge(const ojson& user, const ojson& defaults, const std::string& path) {
  if (!user.is_object()) throw ConfigError(fmt::format("{}: expected object", path));
  ojson out = defaults;
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path + "." + it.key();
    if (!defaults.contains(it.key())) throw ConfigError(fmt::format("{}: unknown key", key));
    out[it.key()] = coerce(it.value(), defaults[it.key()], key);
  }
  return out;
}

void require_keys(const ojson& obj, std::initializer_list<const char*> allowed,
                  const std::string& path) {
  if (!obj.is_object()) throw ConfigError(fmt::format("{}: expected object", path));
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return it.key() == a; }) == allowed.end()) {
      throw ConfigError(fmt::format("{}{}{}: unknown key", path, path.empty() ? "" : ".", it.key()));
    }
  }
}

double number(const ojson& obj, const char* key, double def, const std::string& path) {
  if (!obj.contains(key)) return def;
  return coerce(obj[key], ojson(0.0), path + "." + key).get<double>();
}

std::int64_t integer(const ojson& obj, const char* key, std::int64_t def, const std::string& path) {
  if (!obj.contains(key)) return def;
  return coerce(obj[key], ojson(0), path + "." + key).get<std::int64_t>();
}

void check_initial_data(const std::string& solver, const ojson& d) {
  if (solver == "validate-potential") return;
  const std::string fam = d["family"].get<std::string>();
  std::vector<std::string> ok = {"gaussian"};
  if (solver != "asymptotic") ok.push_back("sine-packet");
  if (solver == "semilinear" || solver == "quasilinear") ok.push_back("file");
  if (std::find(ok.begin(), ok.end(), fam) == ok.end()) {
    throw ConfigError(fmt::format("initial_data.family: '{}' not available for {}", fam, solver));
  }
  if (fam == "file" && d["path"].get<std::string>().empty()) {
    throw ConfigError("initial_data.path: required for family 'file'");
  }
  if (!(d["width"].get<double>() > 0.0)) throw ConfigError("initial_data.width: must be positive");
  if (d.contains("direction")) {
    const auto dir = d["direction"].get<std::int64_t>();
    if (dir < -1 || dir > 1) throw ConfigError("initial_data.direction: must be -1, 0 or 1");
  }
  for (const char* key : {"zeta_amplitude", "far_field"}) {
    if (d.contains(key) && d[key].size() != 2) {
      throw ConfigError(fmt::format("initial_data.{}: expected [re, im]", key));
    }
  }
}

void check_solver_options(const std::string& solver, const ojson& o) {
  auto positive = [&](const char* key) {
    if (!(o[key].get<double>() > 0.0)) {
      throw ConfigError(fmt::format("solver_options.{}: must be positive", key));
    }
  };
  auto non_negative = [&](const char* key) {
    if (!(o[key].get<double>() >= 0.0)) {
      throw ConfigError(fmt::format("solver_options.{}: must be >= 0", key));
    }
  };
  if (solver == "semilinear") {
    non_negative("E_budget");
    non_negative("T_window");
    positive("picard_tol");
    positive("picard_max");
    if (!(o["E_prime_factor"].get<double>() > 1.0)) {
      throw ConfigError("solver_options.E_prime_factor: must exceed 1");
    }
  } else if (solver == "quasilinear") {
    positive("T_local");
    positive("fixpoint_tol");
    positive("fixpoint_max");
    non_negative("E_budget");
    non_negative("L_budget");
    non_negative("max_halvings");
  } else if (solver == "hs2") {
    if (o["markers"].get<std::int64_t>() < 2) throw ConfigError("solver_options.markers: must be >= 2");
    if (!(o["xi_max"].get<double>() > o["xi_min"].get<double>())) {
      throw ConfigError("solver_options.xi_max: must exceed xi_min");
    }
    non_negative("record_every");
    const auto g = o["gauge"].get<std::string>();
    if (g != "left" && g != "right") throw ConfigError("solver_options.gauge: expected left or right");
  } else if (solver == "asymptotic") {
    positive("t_slow");
    positive("dx");
    positive("hs2_dt");
    positive("T_local");
    if (o["markers"].get<std::int64_t>() < 2) throw ConfigError("solver_options.markers: must be >= 2");
    if (o["compare_points"].get<std::int64_t>() < 16) {
      throw ConfigError("solver_options.compare_points: must be >= 16");
    }
    const double s0 = o["s0"].get<double>();
    if (!(s0 > 0.0 && s0 < 1.0)) throw ConfigError("solver_options.s0: must lie in (0,1)");
    if (o["epsilons"].empty()) throw ConfigError("solver_options.epsilons: must not be empty");
    for (const auto& e : o["epsilons"]) {
      if (!(e.get<double>() > 0.0)) throw ConfigError("solver_options.epsilons: entries must be positive");
    }
    const auto g = o["gauge"].get<std::string>();
    if (g != "left" && g != "right") throw ConfigError("solver_options.gauge: expected left or right");
  } else if (solver == "validate-potential") {
    if (o["tail_samples"].get<std::int64_t>() < 100) {
      throw ConfigError("solver_options.tail_samples: must be >= 100");
    }
  }
}

}  // namespace

ojson default_initial_data(const std::string& solver) {
  if (solver == "semilinear") {
    return {{"family", "gaussian"}, {"center", 0.0},        {"width", 1.0},
            {"wavenumber", 0.0},    {"direction", 0},       {"zeta_amplitude", {0.1, 0.0}},
            {"far_field", {0.0, 0.0}}, {"path", ""}};
  }
  if (solver == "quasilinear") {
    return {{"family", "gaussian"}, {"center", 0.0},       {"width", 1.0},
            {"wavenumber", 0.0},    {"direction", 0},      {"psi_amplitude", 0.1},
            {"s_amplitude", 0.0},   {"psi_inf", 0.0},      {"s_inf", 0.5},
            {"path", ""}};
  }
  if (solver == "hs2") {
    return {{"family", "gaussian"},  {"center", 0.0},        {"width", 1.0},
            {"wavenumber", 0.0},     {"u_amplitude", 1.0},   {"rho_amplitude", 0.0},
            {"rho_floor", 0.0}};
  }
  if (solver == "asymptotic") {
    return {{"family", "gaussian"}, {"center", 0.0}, {"width", 1.0},
            {"u_amplitude", 1.0},   {"r_amplitude", 0.5}};
  }
  return ojson::object();
}

ojson default_solver_options(const std::string& solver) {
  if (solver == "semilinear") {
    return {{"E_budget", 0.0},    {"E_prime_factor", 2.0}, {"T_window", 0.0},
            {"picard_tol", 1e-10}, {"picard_max", 60},      {"enforce_apriori", true}};
  }
  if (solver == "quasilinear") {
    return {{"T_local", 0.25},  {"fixpoint_tol", 1e-10}, {"fixpoint_max", 60},
            {"E_budget", 0.0},  {"L_budget", 0.0},       {"max_halvings", 20}};
  }
  if (solver == "hs2") {
    return {{"markers", 1001}, {"xi_min", -6.0}, {"xi_max", 6.0}, {"gauge", "left"},
            {"record_every", 0}};
  }
  if (solver == "asymptotic") {
    return {{"psi0", 0.7853981633974483},
            {"s0", 0.5},
            {"epsilons", {0.2, 0.1, 0.05}},
            {"t_slow", 0.5},
            {"dx", 0.025},
            {"T_local", 0.25},
            {"markers", 2001},
            {"hs2_dt", 0.001},
            {"compare_points", 801},
            {"gauge", "right"},
            {"parallel", true}};
  }
  return {{"tail_samples", 20000}};
}

RunConfig parse_config(const std::string& text, const std::string& solver_hint) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(fmt::format("config parse error at line {}, column {}: {}", line, col, e.what()));
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  require_keys(doc,
               {"solver", "potential", "wave_speed", "grid", "time", "initial_data", "outputs",
                "seeds", "solver_options"},
               "");

  RunConfig cfg;
  if (doc.contains("solver")) {
    if (!doc["solver"].is_string()) throw ConfigError("solver: expected string");
    cfg.solver = doc["solver"].get<std::string>();
    if (!solver_hint.empty() && cfg.solver != solver_hint) {
      throw ConfigError(fmt::format("solver: config says '{}' but the command runs '{}'",
                                    cfg.solver, solver_hint));
    }
  } else {
    cfg.solver = solver_hint;
  }
  if (cfg.solver.empty()) throw ConfigError("solver: missing");
  if (!known_solver(cfg.solver)) throw ConfigError(fmt::format("solver: unknown '{}'", cfg.solver));

  if (doc.contains("potential")) {
    const auto& p = doc["potential"];
    require_keys(p, {"name", "params"}, "potential");
    if (p.contains("name")) {
      if (!p["name"].is_string()) throw ConfigError("potential.name: expected string");
      cfg.potential_name = p["name"].get<std::string>();
    }
    if (p.contains("params")) {
      if (!p["params"].is_object()) throw ConfigError("potential.params: expected object");
      for (auto it = p["params"].begin(); it != p["params"].end(); ++it) {
        cfg.potential_params[it.key()] =
            coerce(it.value(), ojson(0.0), "potential.params." + it.key()).get<double>();
      }
    }
  } else if (cfg.solver == "asymptotic") {
    cfg.potential_name = "flat4";
  }
  make_potential(cfg.potential_name, cfg.potential_params);  // name and params check

  if (doc.contains("wave_speed")) {
    const auto& w = doc["wave_speed"];
    require_keys(w, {"K1", "K3"}, "wave_speed");
    cfg.K1 = number(w, "K1", cfg.K1, "wave_speed");
    cfg.K3 = number(w, "K3", cfg.K3, "wave_speed");
  } else if (cfg.solver == "asymptotic") {
    cfg.K1 = 2.0;
    cfg.K3 = 1.0;
  }
  WaveSpeed(cfg.K1, cfg.K3);

  if (doc.contains("grid")) {
    const auto& g = doc["grid"];
    require_keys(g, {"x_min", "x_max", "n"}, "grid");
    cfg.x_min = number(g, "x_min", cfg.x_min, "grid");
    cfg.x_max = number(g, "x_max", cfg.x_max, "grid");
    cfg.n = static_cast<int>(integer(g, "n", cfg.n, "grid"));
  }
  if (cfg.n < 16) throw ConfigError(fmt::format("grid.n: must be >= 16, got {}", cfg.n));
  if (!(cfg.x_max > cfg.x_min)) throw ConfigError("grid.x_max: must exceed grid.x_min");

  if (doc.contains("time")) {
    const auto& t = doc["time"];
    require_keys(t, {"t_final", "dt", "cfl"}, "time");
    cfg.t_final = number(t, "t_final", cfg.t_final, "time");
    cfg.dt = number(t, "dt", cfg.dt, "time");
    cfg.cfl = number(t, "cfl", cfg.cfl, "time");
  }
  if (!(cfg.t_final >= 0.0)) throw ConfigError("time.t_final: must be >= 0");
  if (!(cfg.dt >= 0.0)) throw ConfigError("time.dt: must be >= 0");
  if (!(cfg.cfl > 0.0 && cfg.cfl <= 0.9)) throw ConfigError("time.cfl: must lie in (0, 0.9]");

  cfg.initial_data = merge(doc.value("initial_data", ojson::object()),
                           default_initial_data(cfg.solver), "initial_data");
  check_initial_data(cfg.solver, cfg.initial_data);

  if (doc.contains("outputs")) {
    const auto& o = doc["outputs"];
    require_keys(o, {"snapshot_times", "energy_every", "out_dir"}, "outputs");
    if (o.contains("snapshot_times")) {
      for (const auto& v : coerce(o["snapshot_times"], ojson::array(), "outputs.snapshot_times")) {
        cfg.snapshot_times.push_back(v.get<double>());
      }
    }
    cfg.energy_every = static_cast<int>(integer(o, "energy_every", cfg.energy_every, "outputs"));
    if (o.contains("out_dir")) {
      cfg.out_dir = coerce(o["out_dir"], ojson(""), "outputs.out_dir").get<std::string>();
    }
  }
  if (cfg.energy_every < 1) throw ConfigError("outputs.energy_every: must be >= 1");
  for (double t : cfg.snapshot_times) {
    if (!(t >= 0.0 && t <= cfg.t_final)) {
      throw ConfigError(fmt::format("outputs.snapshot_times: {} outside [0, t_final]", t));
    }
  }
  cfg.seed = integer(doc, "seeds", cfg.seed, "");

  cfg.solver_options = merge(doc.value("solver_options", ojson::object()),
                             default_solver_options(cfg.solver), "solver_options");
  check_solver_options(cfg.solver, cfg.solver_options);
  return cfg;
}

RunConfig load_config(const std::string& path, const std::string& solver_hint) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), solver_hint);
}

std::string dump_config(const RunConfig& cfg) {
  ojson j;
  j["solver"] = cfg.solver;
  ojson params = ojson::object();
  for (const auto& [k, v] : cfg.potential_params) params[k] = v;
  j["potential"] = {{"name", cfg.potential_name}, {"params", params}};
  j["wave_speed"] = {{"K1", cfg.K1}, {"K3", cfg.K3}};
  j["grid"] = {{"x_min", cfg.x_min}, {"x_max", cfg.x_max}, {"n", cfg.n}};
  j["time"] = {{"t_final", cfg.t_final}, {"dt", cfg.dt}, {"cfl", cfg.cfl}};
  j["initial_data"] = cfg.initial_data;
  j["outputs"] = {{"snapshot_times", cfg.snapshot_times},
                  {"energy_every", cfg.energy_every},
                  {"out_dir", cfg.out_dir}};
  j["seeds"] = cfg.seed;
  j["solver_options"] = cfg.solver_options;
  return j.dump(2) + "\n";
}

}  // namespace nvw
