#pragma once

// Bohmian trajectories driven by the guiding equation v = (hbar/m) kappa_l,
// with kappa_l from the closed-form evolved field.

#include "superband/analysis.hpp"
#include "superband/grid.hpp"
#include "superband/synthesis.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace superband {

enum class InitialMode { uniform_interval, born_sampled };

enum class SpecialFlag : std::uint8_t { none = 0, super = 1, sub = 2 };

struct TrajectorySet {
  std::vector<double> times;                   ///< output times, starting at 0
  std::vector<std::vector<double>> positions;  ///< [trajectory][time]
  InitialMode initial_mode = InitialMode::uniform_interval;
  std::uint64_t seed = 0;
  std::vector<SpecialFlag> special_flags;
  std::vector<std::size_t> failed;  ///< trajectories that exhausted step halving
  SynthesisParams params;

  std::size_t count() const { return positions.size(); }
};

struct VelocityProbe {
  double x = 0.0;
  double t = 0.0;
  double v = 0.0;
};

/// (hbar/m) Im(psi* psi')/|psi|^2 from the closed-form field.
/// Throws NodeUnderflowError where |psi|^2 < 1e-300.
double velocity(const SynthesisParams& params, double x, double t);
VelocityProbe probe_velocity(const SynthesisParams& params, double x, double t);

struct SamplingOptions {
  InitialMode mode = InitialMode::uniform_interval;
  std::pair<double, double> interval{-10.0, 10.0};
  std::uint64_t seed = 0;
};

/// Uniform draws on an interval, or draws from |psi0|^2 by inverse CDF on
/// the grid. Draw i depends only on (seed, i).
std::vector<double> sample_initial_positions(const SynthesisParams& params, const SimGrid& grid,
                                             std::size_t n, const SamplingOptions& options);

struct IntegrationOptions {
  double dt = 1e-2;
  double output_interval = 0.1;  ///< rounded to a whole number of steps
  double min_dt = 1e-6;
  unsigned threads = 1;
};

/// Classical RK4 on dx/dt = velocity(x, t). A step whose RK4 and trapezoid
/// estimates differ by more than 1e-9, or that hits a node underflow, is
/// redone by recursive step doubling down to min_dt. Requires dt <= 1e-2
/// and t_end <= 50.
TrajectorySet integrate_trajectories(const SynthesisParams& params, const std::vector<double>& x0s,
                                     double t_end, const IntegrationOptions& options = {});

/// True iff the initial ordering is strictly preserved at every output time.
bool preserves_ordering(const TrajectorySet& set);

/// Flags the trajectory nearest the super-extremum path and the one nearest
/// the sub-extremum path, by majority vote over output times t > 0 where the
/// grid field has an extremum pair. No flags when no pair exists.
void tag_special_trajectories(TrajectorySet& set, const SimGrid& grid,
                              double floor = kDefaultFloor);

/// Index of the trajectory carrying `flag`, or -1.
long flagged_index(const TrajectorySet& set, SpecialFlag flag);

struct VelocityHistogram {
  std::vector<double> bin_edges;   ///< in velocity units
  std::vector<double> density;     ///< normalized to unit area
  std::vector<double> reference;   ///< |phi0(m v / hbar)|^2 m / hbar at bin centres
  double correlation = 0.0;
  double mean = 0.0;
  double max_drift = 0.0;  ///< max |v(t_end) - v(0.9 t_end)| over trajectories
  bool asymptotic = false;
  std::string warning;
};

/// Histogram of end-segment velocities (x(t_end) - x(0.9 t_end)) / (0.1 t_end)
/// over kappa0 +- 4 delta_kappa, compared with the momentum spectrum.
VelocityHistogram asymptotic_velocities(const TrajectorySet& set, std::size_t bins = 40);

} // namespace superband
