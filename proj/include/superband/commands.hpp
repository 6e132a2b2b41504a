#pragma once

// CLI subcommands. Each writes its files under config.output.directory and
// returns a process exit code; ConfigError and NumericalHealthError
// propagate to the caller (exit codes 2 and 3).

#include "superband/config.hpp"

#include <string>

namespace superband {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitAcceptance = 4;

inline constexpr const char* kSoftwareVersion = "1.0.0";

/// Per-time field dumps: x, re_psi, im_psi, density, local_momentum_over_k0, valid_mask.
int cmd_evolve(const SimConfig& config);

/// Extremum table for alpha in {1, 1.8}, t in {1, 2, 3, 4} and a JSON diff
/// against the reference values. Returns kExitAcceptance if any cell misses.
int cmd_table1(const SimConfig& config);

/// Flux reports at both planes over [t_i, t_f] for each configured alpha.
int cmd_flux(const SimConfig& config);

/// Bohmian trajectories (long CSV) and asymptotic velocity histograms.
int cmd_bohm(const SimConfig& config);

/// Classical ensembles: fig6 preset and random ensembles.
int cmd_classical(const SimConfig& config);

/// Central-lobe slope versus alpha, and the bisected critical alpha.
int cmd_sweep_alpha(const SimConfig& config);

/// Dispatch by subcommand name ("evolve", "table1", ...).
int run_command(const std::string& name, const SimConfig& config);

} // namespace superband
