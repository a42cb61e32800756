#pragma once

#include <string>

#include "nvw/asymptotic.hpp"
#include "nvw/coefficients.hpp"
#include "nvw/config.hpp"
#include "nvw/field.hpp"
#include "nvw/hs2.hpp"
#include "nvw/polar.hpp"

namespace nvw {

inline constexpr const char* kVersion = "0.1.0";

/// Potential named by the config. Solver runs validate it (ConfigError naming
/// the failing clause); "zero" is passed through unvalidated.
PotentialSpec run_potential(const RunConfig& cfg);

ComplexField semilinear_initial(const RunConfig& cfg);
PolarState quasilinear_initial(const RunConfig& cfg);
MarkerState hs2_initial(const RunConfig& cfg);
AsymptoticConfig asymptotic_setup(const RunConfig& cfg);

/// Runs the configured solver, writes artifacts under cfg.out_dir and returns
/// the process exit code. Solver errors are mapped, never rethrown.
int run(const RunConfig& cfg, bool quiet = false);

}  // namespace nvw
