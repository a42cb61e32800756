#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace nvw {

using ojson = nlohmann::ordered_json;

inline constexpr const char* kSolvers[] = {"semilinear", "quasilinear", "hs2", "asymptotic",
                                           "validate-potential"};

/// Fully validated run description. `initial_data` and `solver_options` hold
/// every key allowed for the solver with defaults filled in.
struct RunConfig {
  std::string solver;
  std::string potential_name = "reference";
  std::map<std::string, double> potential_params;
  double K1 = 1.0;
  double K3 = 1.0;
  double x_min = -8.0;
  double x_max = 8.0;
  int n = 1025;
  double t_final = 1.0;
  double dt = 0.0;  // 0: solver default
  double cfl = 0.9;
  ojson initial_data = ojson::object();
  std::vector<double> snapshot_times;
  int energy_every = 1;
  std::string out_dir = "out";
  std::int64_t seed = 0;
  ojson solver_options = ojson::object();
};

/// Strict parse: unknown keys and wrong types are errors naming the field;
/// syntax errors report line and column. `solver_hint` supplies the solver
/// when the document has none, and must agree with it otherwise.
RunConfig parse_config(const std::string& text, const std::string& solver_hint = "");
RunConfig load_config(const std::string& path, const std::string& solver_hint = "");

/// Canonical serialisation (fixed key order, all defaults present).
std::string dump_config(const RunConfig& cfg);

/// Defaults of the per-solver sections.
ojson default_initial_data(const std::string& solver);
ojson default_solver_options(const std::string& solver);

}  // namespace nvw
