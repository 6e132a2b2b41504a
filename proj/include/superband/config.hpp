#pragma once

// Run configuration: '[section]' headers with flat key = value lines.
// Every key is optional; the defaults reproduce the reference setup
// (kappa0 = 2 pi, delta_kappa = 0.5, m = hbar = 1).

#include "superband/grid.hpp"
#include "superband/synthesis.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace superband {

enum class OutputFormat { csv, json, both };

struct RunBlock {
  std::vector<double> times{1.0, 2.0, 3.0, 4.0};
  double floor = 1e-7;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  // evolve
  std::optional<std::pair<double, double>> x_window;  ///< default: where density >= 1e-12 max
  std::size_t stride = 1;

  // flux
  double flux_t_initial = 2.8;
  double flux_t_final = 3.2;
  double flux_plane_time = 3.0;  ///< planes sit at the extrema found at this time
  std::optional<double> flux_left;
  std::optional<double> flux_right;
  int n_quad = 128;

  // bohm
  double dt = 1e-2;
  std::size_t n_trajectories = 40;
  std::pair<double, double> trajectory_interval{-10.0, 10.0};
  double t_end = 5.0;
  double output_interval = 0.05;
  std::size_t n_asymptotic = 10000;
  double t_asymptotic = 50.0;
  double asymptotic_dt = 1e-2;
  std::size_t histogram_bins = 40;

  // classical
  std::size_t classical_n = 16;
  std::size_t classical_ensembles = 4;
  double classical_t_max = 8.0;

  // sweep-alpha
  double sweep_alpha_min = 1.0;
  double sweep_alpha_max = 1.8;
  std::size_t sweep_steps = 17;
  double probe_time = 1.0;

  // table1
  double tolerance_scale = 1.0;
};

struct OutputBlock {
  std::string directory = "out";
  OutputFormat format = OutputFormat::both;
  bool timing = false;  ///< wall-clock timings make outputs non-reproducible
};

struct SimConfig {
  GridSpec grid;
  SynthesisParams state;
  std::vector<double> alphas{1.0, 1.8};
  RunBlock run;
  OutputBlock output;

  /// state with alpha replaced.
  SynthesisParams state_for(double alpha) const;
};

/// Parses config text. Throws ConfigError on syntax errors, unknown keys,
/// or values that fail validation.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);

/// Re-checks every module precondition reachable from the config.
void validate(const SimConfig& config);

/// Canonical key = value rendering of the resolved config (stable order).
std::string canonical_text(const SimConfig& config);

/// 16 hex digit FNV-1a hash of canonical_text.
std::string config_hash(const SimConfig& config);

std::vector<double> parse_number_list(const std::string& text);

} // namespace superband
