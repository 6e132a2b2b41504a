#include "superband/classical.hpp"

#include "superband/error.hpp"
#include "superband/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace superband {
namespace {

constexpr std::uint64_t kPositionStream = 21;
constexpr std::uint64_t kMomentumStream = 22;

std::vector<std::size_t> momentum_order(const ClassicalEnsemble& e) {
  std::vector<std::size_t> order(e.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return e.p[a] < e.p[b]; });
  return order;
}

// Moves the fastest particle to x_l and the slowest to x_h, swapping the
// displaced positions onto the particles that held the interval ends.
void apply_extremal_swap(ClassicalEnsemble& e, double x_l, double x_h) {
  const auto fast = static_cast<std::size_t>(std::max_element(e.p.begin(), e.p.end()) - e.p.begin());
  const auto left = static_cast<std::size_t>(std::min_element(e.x0.begin(), e.x0.end()) - e.x0.begin());
  std::swap(e.x0[fast], e.x0[left]);
  const auto slow = static_cast<std::size_t>(std::min_element(e.p.begin(), e.p.end()) - e.p.begin());
  std::size_t right = fast == 0 ? 1 : 0;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (i != fast && e.x0[i] > e.x0[right]) right = i;
  std::swap(e.x0[slow], e.x0[right]);
  e.x0[fast] = x_l;
  e.x0[slow] = x_h;
}

} // namespace

ClassicalEnsemble init_ensemble(std::size_t n, std::pair<double, double> x_range,
                                std::pair<double, double> p_range, double mass,
                                std::uint64_t seed, ConstraintMode constraint) {
  if (n < 2) throw ConfigError("classical: need at least 2 particles");
  if (!(x_range.second > x_range.first)) throw ConfigError("classical: empty position range");
  if (!(p_range.second > p_range.first)) throw ConfigError("classical: empty momentum range");
  if (!(mass > 0.0)) throw ConfigError("classical: mass must be > 0");
  ClassicalEnsemble e;
  e.mass = mass;
  e.seed = seed;
  e.constraint = constraint;
  e.x0.resize(n);
  e.p.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    e.x0[i] = x_range.first + (x_range.second - x_range.first) * keyed_uniform(seed, kPositionStream, i);
    e.p[i] = p_range.first + (p_range.second - p_range.first) * keyed_uniform(seed, kMomentumStream, i);
  }
  if (constraint == ConstraintMode::extremal_swapped) apply_extremal_swap(e, x_range.first, x_range.second);
  return e;
}

ClassicalEnsemble fig6_preset(std::uint64_t seed) {
  ClassicalEnsemble e;
  e.p = {1.0, 1.3, 1.5, 1.7, 1.9, 2.1, 2.3};
  e.mass = 1.0;
  e.seed = seed;
  e.constraint = ConstraintMode::extremal_swapped;
  e.x0.resize(e.p.size());
  for (std::size_t i = 0; i < e.size(); ++i) e.x0[i] = keyed_uniform(seed, kPositionStream, i);
  apply_extremal_swap(e, 0.0, 1.0);
  return e;
}

std::vector<double> evolve_ensemble(const ClassicalEnsemble& ensemble, double t) {
  std::vector<double> x(ensemble.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = ensemble.x0[i] + ensemble.p[i] * t / ensemble.mass;
  return x;
}

double ordering_time(const ClassicalEnsemble& ensemble) {
  double latest = 0.0;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    for (std::size_t j = 0; j < ensemble.size(); ++j) {
      if (i == j) continue;
      if (ensemble.p[i] == ensemble.p[j])
        throw ConfigError("classical: duplicate momenta have no ordering time");
      if (ensemble.p[i] < ensemble.p[j] && ensemble.x0[i] > ensemble.x0[j])
        latest = std::max(latest, ensemble.mass * (ensemble.x0[i] - ensemble.x0[j]) /
                                      (ensemble.p[j] - ensemble.p[i]));
    }
  }
  return latest;
}

bool is_momentum_ordered(const ClassicalEnsemble& ensemble, double t) {
  const auto x = evolve_ensemble(ensemble, t);
  const auto order = momentum_order(ensemble);
  for (std::size_t r = 1; r < order.size(); ++r)
    if (!(x[order[r - 1]] < x[order[r]])) return false;
  return true;
}

std::vector<double> pairwise_separation_growth(const ClassicalEnsemble& ensemble, double t) {
  const auto x = evolve_ensemble(ensemble, t);
  const auto order = momentum_order(ensemble);
  std::vector<double> gaps;
  for (std::size_t r = 1; r < order.size(); ++r) gaps.push_back(x[order[r]] - x[order[r - 1]]);
  return gaps;
}

} // namespace superband
