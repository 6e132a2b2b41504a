#include "doctest.h"

#include "superband/classical.hpp"
#include "superband/error.hpp"

#include <algorithm>
#include <cmath>

using namespace superband;

namespace {

// First time on a 1e-3 sweep after which the ensemble stays ordered up to t_max.
double brute_force_ordering(const ClassicalEnsemble& e, double t_max) {
  const double step = 1e-3;
  double last_unordered = -step;
  for (double t = 0.0; t <= t_max; t += step)
    if (!is_momentum_ordered(e, t)) last_unordered = t;
  return last_unordered + step;
}

} // namespace

TEST_SUITE("classical") {

TEST_CASE("extremal constraint places the fastest at x_l and the slowest at x_h") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ClassicalEnsemble two = init_ensemble(2, {0.0, 1.0}, {1.0, 2.0}, 1.0, seed, ConstraintMode::extremal_swapped);
    const std::size_t fast = two.p[0] > two.p[1] ? 0 : 1;
    CHECK(two.x0[fast] == 0.0);
    CHECK(two.x0[1 - fast] == 1.0);
    const ClassicalEnsemble many =
        init_ensemble(12, {-2.0, 3.0}, {0.5, 4.0}, 2.0, seed, ConstraintMode::extremal_swapped);
    const auto hi = std::max_element(many.p.begin(), many.p.end()) - many.p.begin();
    const auto lo = std::min_element(many.p.begin(), many.p.end()) - many.p.begin();
    CHECK(many.x0[hi] == -2.0);
    CHECK(many.x0[lo] == 3.0);
    for (double x : many.x0) {
      CHECK(x >= -2.0);
      CHECK(x <= 3.0);
    }
  }
}

TEST_CASE("two-particle crossing time is m dx / dp") {
  const ClassicalEnsemble e = init_ensemble(2, {0.0, 1.5}, {1.0, 2.0}, 3.0, 9, ConstraintMode::extremal_swapped);
  const double dp = std::abs(e.p[0] - e.p[1]);
  CHECK(ordering_time(e) == doctest::Approx(3.0 * 1.5 / dp).epsilon(1e-15));
}

TEST_CASE("ensemble construction") {
  const ClassicalEnsemble a = init_ensemble(16, {0.0, 1.0}, {1.0, 2.3}, 1.0, 5, ConstraintMode::none);
  const ClassicalEnsemble b = init_ensemble(16, {0.0, 1.0}, {1.0, 2.3}, 1.0, 5, ConstraintMode::none);
  CHECK(a.x0 == b.x0);
  CHECK(a.p == b.p);
  CHECK_THROWS_AS(init_ensemble(1, {0.0, 1.0}, {1.0, 2.0}, 1.0, 0, ConstraintMode::none), ConfigError);
  CHECK_THROWS_AS(init_ensemble(4, {1.0, 1.0}, {1.0, 2.0}, 1.0, 0, ConstraintMode::none), ConfigError);
  CHECK_THROWS_AS(init_ensemble(4, {0.0, 1.0}, {2.0, 1.0}, 1.0, 0, ConstraintMode::none), ConfigError);
}

TEST_CASE("fig6 preset") {
  const ClassicalEnsemble e = fig6_preset();
  CHECK(e.p == std::vector<double>{1.0, 1.3, 1.5, 1.7, 1.9, 2.1, 2.3});
  CHECK(e.mass == 1.0);
  CHECK(e.x0[0] == 1.0);
  CHECK(e.x0[6] == 0.0);
  CHECK_FALSE(is_momentum_ordered(e, 0.0));
  CHECK_FALSE(is_momentum_ordered(e, 0.5));
  for (double t = 1.0 + 1e-9; t <= 8.0; t += 0.25) CHECK(is_momentum_ordered(e, t));
  CHECK(is_momentum_ordered(e, 8.0));
  CHECK(ordering_time(e) > 0.5);
  CHECK(ordering_time(e) <= 1.0);
}

TEST_CASE("free evolution") {
  const ClassicalEnsemble e = init_ensemble(5, {0.0, 1.0}, {1.0, 2.0}, 2.0, 4, ConstraintMode::none);
  CHECK(evolve_ensemble(e, 0.0) == e.x0);
  ClassicalEnsemble single;
  single.x0 = {0.25};
  single.p = {3.0};
  single.mass = 2.0;
  CHECK(evolve_ensemble(single, 0.5)[0] == 0.25 + 3.0 * 0.5 / 2.0);

  // Dyadic data keep every product exact, so composition is bitwise.
  ClassicalEnsemble d;
  d.x0 = {0.5, -0.25, 1.75};
  d.p = {1.5, 2.25, 0.75};
  d.mass = 0.5;
  const double t1 = 0.375, t2 = 1.25;
  ClassicalEnsemble shifted = d;
  shifted.x0 = evolve_ensemble(d, t1);
  CHECK(evolve_ensemble(d, t1 + t2) == evolve_ensemble(shifted, t2));
}

TEST_CASE("ordering time") {
  ClassicalEnsemble sorted;
  sorted.x0 = {0.0, 1.0, 2.0};
  sorted.p = {1.0, 2.0, 3.0};
  CHECK(ordering_time(sorted) == 0.0);
  ClassicalEnsemble dup = sorted;
  dup.p = {1.0, 1.0, 2.0};
  CHECK_THROWS_AS(ordering_time(dup), ConfigError);
}

TEST_CASE("ordering time agrees with a brute-force sweep") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto mode = seed % 2 ? ConstraintMode::extremal_swapped : ConstraintMode::none;
    const ClassicalEnsemble e = init_ensemble(2 + seed % 15, {0.0, 1.0}, {1.0, 2.3}, 1.0, seed, mode);
    const double t = ordering_time(e);
    if (t > 50.0) continue;
    CAPTURE(seed);
    CHECK(std::abs(brute_force_ordering(e, t + 1.0) - t) <= 1e-3 + 1e-9);
  }
}

TEST_CASE("sorted by momentum after the ordering time") {
  for (std::uint64_t seed = 100; seed < 200; ++seed) {
    const ClassicalEnsemble e = init_ensemble(10, {0.0, 1.0}, {1.0, 2.3}, 1.0, seed, ConstraintMode::none);
    const double t0 = ordering_time(e);
    for (double f : {1.0001, 1.5, 3.0, 10.0}) {
      CAPTURE(seed);
      CHECK(is_momentum_ordered(e, t0 * f + 1e-9));
    }
  }
}

TEST_CASE("separations grow with the momentum gap") {
  const ClassicalEnsemble e = init_ensemble(6, {0.0, 1.0}, {1.0, 2.0}, 1.0, 12, ConstraintMode::none);
  std::vector<double> p = e.p;
  std::sort(p.begin(), p.end());
  const double t = 1e5;
  const auto gaps = pairwise_separation_growth(e, t);
  REQUIRE(gaps.size() == 5);
  for (std::size_t k = 0; k < gaps.size(); ++k)
    CHECK(gaps[k] == doctest::Approx((p[k + 1] - p[k]) * t / e.mass).epsilon(0.01));
  const auto at0 = pairwise_separation_growth(e, 0.0);
  for (double g : at0) CHECK(std::abs(g) <= 1.0);

  ClassicalEnsemble pair;
  pair.x0 = {0.0, 0.5};
  pair.p = {1.0, 1.0};
  CHECK(pairwise_separation_growth(pair, 0.0)[0] == pairwise_separation_growth(pair, 7.0)[0]);
}

} // TEST_SUITE
