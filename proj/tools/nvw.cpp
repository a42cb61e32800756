#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "nvw/config.hpp"
#include "nvw/diagnostics.hpp"
#include "nvw/errors.hpp"
#include "nvw/run.hpp"

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw nvw::ConfigError(fmt::format("--epsilon-sweep: '{}' is not a number", cell));
    }
  }
  if (out.empty()) throw nvw::ConfigError("--epsilon-sweep: empty list");
  return out;
}

// Pairs (h, error) from a CSV with header h,error, or from JSON holding either
// {"h": [...], "error": [...]} or a study file {"epsilons": [...], "errors": [...]}.
std::vector<std::pair<double, double>> read_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw nvw::ConfigError(fmt::format("fit-order: cannot open '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::vector<std::pair<double, double>> pairs;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nvw::ojson j;
    try {
      j = nvw::ojson::parse(text);
    } catch (const std::exception& e) {
      throw nvw::ConfigError(fmt::format("fit-order: {}", e.what()));
    }
    const char* hk = j.contains("h") ? "h" : "epsilons";
    const char* ek = j.contains("error") ? "error" : "errors";
    if (!j.contains(hk) || !j.contains(ek) || j[hk].size() != j[ek].size()) {
      throw nvw::ConfigError("fit-order: JSON needs equally long h/error or epsilons/errors arrays");
    }
    for (std::size_t i = 0; i < j[hk].size(); ++i) {
      if (!j[hk][i].is_number() || !j[ek][i].is_number()) {
        throw nvw::ConfigError(fmt::format("fit-order: entry {} is not numeric", i));
      }
      pairs.emplace_back(j[hk][i].get<double>(), j[ek][i].get<double>());
    }
    return pairs;
  }
  std::stringstream ss(text);
  std::string line;
  std::getline(ss, line);
  if (line.rfind("h,error", 0) != 0) throw nvw::ConfigError("fit-order: CSV header must be h,error");
  while (std::getline(ss, line)) {
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument(line);
      pairs.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw nvw::ConfigError(fmt::format("fit-order: bad row '{}'", line));
    }
  }
  return pairs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solvers for the planar nematic wave system and its Hunter-Saxton limit"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("--quiet", quiet, "Only report errors");

  struct Sub {
    const char* name;
    const char* solver;
    const char* help;
  };
  const Sub subs[] = {
      {"validate-potential", "validate-potential", "Check a potential against the admissibility clauses"},
      {"run-semilinear", "semilinear", "Complex semilinear solver (K1 = K3)"},
      {"run-quasilinear", "quasilinear", "Quasilinear solver along characteristics"},
      {"run-hs2", "hs2", "Two-component Hunter-Saxton marker solver"},
      {"run-asymptotic", "asymptotic", "Epsilon sweep of the asymptotic reduction"},
  };
  std::string config_path, out_dir, sweep;
  for (const auto& s : subs) {
    auto* sc = app.add_subcommand(s.name, s.help);
    sc->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sc->add_option("--out", out_dir, "Output directory (overrides outputs.out_dir)");
    sc->add_flag("--quiet", quiet, "Only report errors");
    if (std::string(s.solver) == "asymptotic") {
      sc->add_option("--epsilon-sweep", sweep, "Comma-separated epsilons, e.g. 0.2,0.1,0.05");
    }
  }
  std::string fit_input;
  auto* fit = app.add_subcommand("fit-order", "Least-squares convergence order of (h, error) pairs");
  fit->add_option("input", fit_input, "CSV (h,error) or JSON file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(nvw::ExitCode::usage);
  }

  try {
    if (fit->parsed()) {
      const double order = nvw::fit_order(read_pairs(fit_input));
      fmt::print("{}\n", nvw::fmt_num(order));
      return 0;
    }
    for (const auto& s : subs) {
      if (!app.got_subcommand(s.name)) continue;
      nvw::RunConfig cfg = config_path.empty()
                               ? nvw::parse_config("{}", s.solver)
                               : nvw::load_config(config_path, s.solver);
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (!sweep.empty()) {
        const auto eps = parse_list(sweep);
        for (double e : eps) {
          if (!(e > 0.0)) throw nvw::ConfigError("--epsilon-sweep: entries must be positive");
        }
        cfg.solver_options["epsilons"] = eps;
      }
      return nvw::run(cfg, quiet);
    }
  } catch (const nvw::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return static_cast<int>(e.code());
  }
  return static_cast<int>(nvw::ExitCode::usage);
}
