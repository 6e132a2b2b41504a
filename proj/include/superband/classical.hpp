#pragma once

// Free classical ensemble used as an analogy for intra-packet interference.

#include <cstdint>
#include <utility>
#include <vector>

namespace superband {

enum class ConstraintMode { none, extremal_swapped };

struct ClassicalEnsemble {
  std::vector<double> x0;
  std::vector<double> p;
  double mass = 1.0;
  std::uint64_t seed = 0;
  ConstraintMode constraint = ConstraintMode::none;

  std::size_t size() const { return x0.size(); }
};

/// Uniform positions on x_range and momenta on p_range. With
/// extremal_swapped, the fastest particle is placed at x_l and the slowest
/// at x_h (their drawn positions are swapped onto the interval ends).
ClassicalEnsemble init_ensemble(std::size_t n, std::pair<double, double> x_range,
                                std::pair<double, double> p_range, double mass,
                                std::uint64_t seed, ConstraintMode constraint);

inline constexpr std::uint64_t kFig6Seed = 11839;

/// Seven particles, m = 1, velocities {1, 1.3, 1.5, 1.7, 1.9, 2.1, 2.3},
/// positions drawn on [0, 1] with the slowest at 1 and the fastest at 0.
ClassicalEnsemble fig6_preset(std::uint64_t seed = kFig6Seed);

/// x_i(t) = x_i(0) + p_i t / m.
std::vector<double> evolve_ensemble(const ClassicalEnsemble& ensemble, double t);

/// Latest pairwise crossing time m (x_i(0) - x_j(0)) / (p_j - p_i) over
/// pairs with p_i < p_j and x_i(0) > x_j(0); 0 if already ordered.
/// Throws ConfigError on duplicate momenta.
double ordering_time(const ClassicalEnsemble& ensemble);

/// True iff positions at t are strictly increasing in momentum.
bool is_momentum_ordered(const ClassicalEnsemble& ensemble, double t);

/// Separations x_{k+1}(t) - x_k(t) of neighbours in momentum order.
std::vector<double> pairwise_separation_growth(const ClassicalEnsemble& ensemble, double t);

} // namespace superband
