#include "doctest.h"
#include "test_util.hpp"

#include "superband/analysis.hpp"
#include "superband/error.hpp"

#include <cmath>
#include <numbers>

using namespace superband;

namespace {

constexpr double kPi = std::numbers::pi;

SynthesisParams with_alpha(double alpha) {
  SynthesisParams p;
  p.alpha = alpha;
  return p;
}

WaveField evolved(double alpha, double t, const SimGrid& grid) {
  return propagate(momentum_distribution(with_alpha(alpha), grid), t);
}

// Least-squares line through the valid samples: returns slope and the
// largest residual.
std::pair<double, double> line_fit(const LocalMomentumField& lm) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lm.values.size(); ++i) {
    if (!lm.valid[i]) continue;
    const double x = lm.grid.x(i), y = lm.values[i];
    n += 1; sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  double worst = 0.0;
  for (std::size_t i = 0; i < lm.values.size(); ++i)
    if (lm.valid[i]) worst = std::max(worst, std::abs(lm.values[i] - icpt - slope * lm.grid.x(i)));
  return {slope, worst};
}

} // namespace

TEST_SUITE("analysis") {

TEST_CASE("local momentum of the Gaussian is kappa0 at t = 0 and affine later") {
  const SimGrid grid = test_util::small_grid();
  const LocalMomentumField at0 = local_momentum(evolved(0.0, 0.0, grid));
  std::size_t valid = 0;
  for (std::size_t i = 0; i < at0.values.size(); ++i) {
    if (!at0.valid[i]) {
      CHECK(std::isnan(at0.values[i]));
      continue;
    }
    ++valid;
    CHECK(std::abs(at0.values[i] - 2.0 * kPi) < 1e-8);
  }
  CHECK(valid > 1000);
  for (double t : {1.0, 3.0}) {
    const auto [slope, residual] = line_fit(local_momentum(evolved(0.0, t, grid)));
    CAPTURE(t);
    CHECK(slope > 0.0);
    CHECK(residual < 1e-6);
    // Free Gaussian: kappa_l = kappa0 + (x - v t) hbar t / (m W(t))
    const double d2 = 8.0;
    CHECK(slope == doctest::Approx(t / (d2 * d2 + t * t)).epsilon(1e-8));
  }
}

TEST_CASE("floor must lie in (0, 1e-3]") {
  const SimGrid grid = test_util::small_grid();
  const WaveField f = evolved(1.0, 1.0, grid);
  CHECK_THROWS_AS(local_momentum(f, 0.0), ConfigError);
  CHECK_THROWS_AS(local_momentum(f, 2e-3), ConfigError);
  CHECK_NOTHROW(local_momentum(f, 1e-3));
}

TEST_CASE("alpha = 1, t = 1 super-oscillation peak") {
  const SimGrid grid = test_util::default_grid();
  const SynthesisParams p = with_alpha(1.0);
  const SpecialMomenta sm = find_special_momenta(evolved(1.0, 1.0, grid), p);
  CHECK(std::abs(sm.super.kappa_over_kappa0 - 1.95) <= 0.01);
  // High-precision value of the same extremum from an independent
  // arbitrary-precision evaluation of the closed-form field.
  CHECK(sm.super.kappa_over_kappa0 == doctest::Approx(1.940897).epsilon(2e-6));
  CHECK(sm.super.x_at == doctest::Approx(10.13499).epsilon(2e-5));
  CHECK(sm.super.t == 1.0);
  CHECK(sm.super.kind == ExtremumKind::super);
  CHECK(sm.sub.kind == ExtremumKind::sub);
}

TEST_CASE("extremum positions for alpha = 1, t = 4 and alpha = 1.8, t = 1") {
  const SimGrid grid = test_util::default_grid();
  const SpecialMomenta a = find_special_momenta(evolved(1.0, 4.0, grid), with_alpha(1.0));
  CHECK(std::abs(a.super.kappa_over_kappa0 - 1.26) <= 0.01);
  CHECK(std::abs(a.super.x_at - 29.0) <= 0.1);
  CHECK(std::abs(a.sub.kappa_over_kappa0 - (1.0 - 0.26)) <= 0.01);
  CHECK(std::abs(a.sub.x_at - 21.2) <= 0.1);
  CHECK(a.sub.x_at < a.super.x_at);

  const SpecialMomenta b = find_special_momenta(evolved(1.8, 1.0, grid), with_alpha(1.8));
  CHECK(std::abs(b.super.x_at - 4.7) <= 0.1);
  CHECK(std::abs(b.sub.x_at - 7.8) <= 0.1);
  CHECK(b.super.x_at < b.sub.x_at);
}

TEST_CASE("the Gaussian has no extremum pair") {
  const SimGrid grid = test_util::small_grid();
  for (double t : {0.0, 1.0, 4.0}) CHECK_THROWS_AS(find_special_momenta(evolved(0.0, t, grid), with_alpha(0.0)), NoExtremumError);
}

TEST_CASE("extremum symmetry, ordering and mask stability") {
  const SimGrid grid = test_util::default_grid();
  for (double t : {1.0, 2.0, 3.0, 4.0}) {
    CAPTURE(t);
    const WaveField f1 = evolved(1.0, t, grid);
    const SpecialMomenta a = find_special_momenta(f1, with_alpha(1.0));
    CHECK(std::abs(a.sub.kappa_over_kappa0 - (2.0 - a.super.kappa_over_kappa0)) < 0.02);
    CHECK(a.sub.x_at < a.super.x_at);
    const SpecialMomenta b = find_special_momenta(evolved(1.8, t, grid), with_alpha(1.8));
    CHECK(b.super.x_at < b.sub.x_at);
    for (double floor : {1e-8, 1e-6}) {
      const SpecialMomenta c = find_special_momenta(f1, with_alpha(1.0), floor);
      CHECK(std::abs(c.super.kappa_over_kappa0 / a.super.kappa_over_kappa0 - 1.0) < 0.005);
      CHECK(std::abs(c.sub.kappa_over_kappa0 / a.sub.kappa_over_kappa0 - 1.0) < 0.005);
    }
  }
}

TEST_CASE("weight ratio") {
  const SimGrid grid = test_util::default_grid();
  const SpecialMomenta t4 = find_special_momenta(evolved(1.0, 4.0, grid), with_alpha(1.0));
  CHECK(std::abs(weight_ratio(t4.super) / 7e-4 - 1.0) <= 0.30);
  CHECK(weight_ratio(t4.sub) == doctest::Approx(weight_ratio(t4.super)).epsilon(0.01));
  const SpecialMomenta t1 = find_special_momenta(evolved(1.0, 1.0, grid), with_alpha(1.0));
  CHECK(weight_ratio(t1.sub) == doctest::Approx(weight_ratio(t1.super)).epsilon(0.01));
  // Log-space ratio equals the direct formula where nothing underflows.
  const double direct = std::sqrt(std::pow(10.0, t4.super.log10_spectrum_weight) / t4.super.density_at);
  CHECK(weight_ratio(t4.super) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(t1.super.density_at == doctest::Approx(std::norm(AnalyticField(with_alpha(1.0), 1.0).value(t1.super.x_at))).epsilon(1e-6));
}

TEST_CASE("probability current") {
  const SimGrid grid = test_util::small_grid();
  WaveField real{grid, std::vector<Complex>(grid.size()), 0.0};
  for (std::size_t i = 0; i < grid.size(); ++i) real.amplitudes[i] = std::exp(-grid.x(i) * grid.x(i) / 10.0);
  for (double j : probability_current(real)) CHECK(std::abs(j) < 1e-13);

  const WaveField g = evolved(0.0, 0.0, grid);
  const auto jg = probability_current(g);
  const auto rho = density(g);
  double worst = 0.0;
  for (std::size_t i = 0; i < jg.size(); ++i) worst = std::max(worst, std::abs(jg[i] - 2.0 * kPi * rho[i]));
  CHECK(worst < 1e-10);

  const MomentumSpectrum s1 = momentum_distribution(with_alpha(1.0), grid);
  const auto j1 = probability_current(to_position(s1));
  double total = 0.0;
  for (double j : j1) total += j * grid.dx();
  CHECK(std::abs(total - wavenumber_moments(s1).mean) < 1e-8);
}

TEST_CASE("continuity residual and its second-order decay") {
  const SimGrid grid = test_util::small_grid();
  const MomentumSpectrum s1 = momentum_distribution(with_alpha(1.0), grid);
  const MomentumSpectrum s0 = momentum_distribution(with_alpha(0.0), grid);
  const double r1 = continuity_residual(s1, 3.0, 1e-3);
  CHECK(r1 < 1e-5);
  CHECK(continuity_residual(s0, 3.0, 1e-3) < 1e-5);
  const double r_half = continuity_residual(s1, 3.0, 5e-4);
  CHECK(r1 / r_half == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("cumulative and interval probability") {
  const SimGrid grid = test_util::small_grid();
  const WaveField f = evolved(1.0, 2.0, grid);
  CHECK(std::abs(cumulative_probability(f, grid.x_max() - 1e-9) - 1.0) < 1e-10);
  CHECK(std::abs(cumulative_probability(f, grid.x_min())) < 1e-12);
  CHECK(std::abs(interval_probability(f, grid.x_min(), grid.x(grid.size() - 1)) - 1.0) < 1e-10);
  CHECK(interval_probability(f, 3.0, 3.0) == 0.0);
  CHECK_THROWS_AS(interval_probability(f, 4.0, 3.0), ConfigError);
  CHECK(cumulative_probability(f, 20.0) - cumulative_probability(f, 10.0) ==
        doctest::Approx(interval_probability(f, 10.0, 20.0)).epsilon(1e-5));

  // Gaussian: exp(-x^2 / D^2) / (sqrt(pi) D) integrates to erf(a / D) over [-a, a].
  // The trapezoid route carries an O(dx^2) error.
  const SynthesisParams g = with_alpha(0.0);
  const double a = 1.0 / g.delta_kappa;
  const double expected = std::erf(a / gaussian_width_parameter(g));
  const WaveField g0 = evolved(0.0, 0.0, grid);
  CHECK(interval_probability(g0, -a, a) == doctest::Approx(expected).epsilon(1e-5));
  CHECK(cumulative_probability(g0, a) - cumulative_probability(g0, -a) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("flux through a plane by both routes") {
  const SimGrid grid = test_util::small_grid();
  const MomentumSpectrum s1 = momentum_distribution(with_alpha(1.0), grid);
  const FluxReport zero = probability_flux(s1, 20.0, 3.0, 3.0);
  CHECK(zero.flux_by_current == 0.0);
  CHECK(zero.flux_by_probability == 0.0);
  const FluxReport f = probability_flux(s1, 14.948, 2.8, 3.2);
  CHECK(std::abs(f.flux_by_current - f.flux_by_probability) < 1e-6);
  CHECK(f.flux_by_current > 0.0);
  CHECK(f.samples == 128);
  CHECK_THROWS_AS(probability_flux(s1, 14.9, 2.8, 3.2, 10), ConfigError);
  CHECK(std::abs(field_at(s1, grid.x(9000)).value - to_position(s1).amplitudes[9000]) < 1e-12);
}

TEST_CASE("flux difference verdicts") {
  const SimGrid grid = test_util::small_grid();
  const MomentumSpectrum s1 = momentum_distribution(with_alpha(1.0), grid);
  const MomentumSpectrum s18 = momentum_distribution(with_alpha(1.8), grid);
  const FluxDifference d1 = flux_difference(s1, 14.948, 22.751, 2.8, 3.2);
  CHECK(d1.delta < 0.0);
  CHECK(d1.verdict() == -1);
  CHECK(d1.probability_final - d1.probability_initial == doctest::Approx(d1.delta).epsilon(1e-6));
  const FluxDifference d18 = flux_difference(s18, 17.068, 20.631, 2.8, 3.2);
  CHECK(d18.delta > 0.0);
  CHECK(d18.verdict() == 1);
  const FluxDifference same = flux_difference(s1, 18.0, 18.0, 2.8, 3.2);
  CHECK(same.delta == 0.0);
  CHECK(same.verdict() == 0);
}

TEST_CASE("moments and the Gaussian spreading law") {
  const SimGrid grid = test_util::small_grid();
  const MomentumSpectrum g = momentum_distribution(with_alpha(0.0), grid);
  const double dx0 = position_moments(to_position(g)).std_dev;
  const double dp = wavenumber_moments(g).std_dev;
  CHECK(std::abs(dx0 * dp - 0.5) < 1e-8);
  CHECK(dx0 == doctest::Approx(2.0).epsilon(1e-10));

  const MomentumSpectrum s = momentum_distribution(with_alpha(1.8), grid);
  const Moments k0 = wavenumber_moments(s);
  for (double t : {-5.0, 1.0, 4.0}) {
    const Moments kt = wavenumber_moments(evolve_spectrum(s, t));
    CHECK(std::abs(kt.mean - k0.mean) < 1e-10);
    CHECK(std::abs(kt.std_dev - k0.std_dev) < 1e-10);
  }
  for (double t : {1.0, 2.0, 3.0}) {
    CAPTURE(t);
    CHECK(std::abs(position_moments(propagate(g, t)).std_dev - gaussian_spread(dx0, t)) < 1e-8);
  }
}

TEST_CASE("spreading law identities") {
  CHECK(gaussian_spread(1.5, 0.0) == 1.5);
  const double dx0 = 1.7, m = 2.0, hbar = 0.5;
  const double t2 = 2.0 * m * dx0 * dx0 / hbar;
  CHECK(std::pow(gaussian_spread(dx0, t2, m, hbar), 2) == doctest::Approx(2.0 * dx0 * dx0));
  for (double t : {0.3, 1.0, 9.0})
    CHECK(gaussian_spread_momentum_form(dx0, hbar / (2.0 * dx0), t, m, hbar) ==
          doctest::Approx(gaussian_spread(dx0, t, m, hbar)).epsilon(1e-15));
}

TEST_CASE("interference time") {
  CHECK(interference_time_from_width(1.0, 1.0, 1.0) == 1.0);
  CHECK(interference_time(1.0, 2.0, 1.0) == 0.5 * interference_time(1.0, 1.0, 1.0));
  const double dx = 1.3, m = 1.7, hbar = 0.9;
  const double ti = interference_time_from_width(dx, m, hbar);
  CHECK(m * dx * dx / (hbar * ti) == doctest::Approx(1.0));
  CHECK(interference_time(dx, hbar / dx, m) == doctest::Approx(ti));
}

TEST_CASE("asymptotic shape check") {
  const SimGrid grid = test_util::default_grid();
  const ShapeCheck g50 = asymptotic_shape_check(with_alpha(0.0), grid, 50.0);
  CHECK(g50.correlation > 0.9999);
  CHECK(g50.asymptotic);
  CHECK(g50.warning.empty());
  const ShapeCheck s1 = asymptotic_shape_check(with_alpha(1.0), grid, 1.0);
  CHECK_FALSE(s1.asymptotic);
  CHECK_FALSE(s1.warning.empty());
  CHECK(s1.correlation < asymptotic_shape_check(with_alpha(1.0), grid, 50.0).correlation);
}

TEST_CASE("central lobe slope and the critical alpha") {
  const SimGrid grid = test_util::small_grid();
  const LobeFit a1 = central_lobe_slope(evolved(1.0, 1.0, grid), with_alpha(1.0));
  const LobeFit a18 = central_lobe_slope(evolved(1.8, 1.0, grid), with_alpha(1.8));
  CHECK(a1.slope > 0.0);
  CHECK(a18.slope < 0.0);
  CHECK(a1.x_left < 2.0 * kPi);
  CHECK(a1.x_right > 2.0 * kPi);
  const CriticalAlpha c = critical_alpha(with_alpha(1.0), grid);
  CHECK(c.alpha_c > 1.0);
  CHECK(c.alpha_c < 1.8);
  CHECK(c.slope_below > 0.0);
  CHECK(c.slope_above < 0.0);
  CHECK_THROWS_AS(critical_alpha(with_alpha(1.0), grid, 1.0, 1.0, 1.2), BracketError);
}

TEST_CASE("pearson") {
  CHECK(pearson({1, 2, 3, 4}, {2, 4, 6, 8}) == doctest::Approx(1.0));
  CHECK(pearson({1, 2, 3, 4}, {8, 6, 4, 2}) == doctest::Approx(-1.0));
}

} // TEST_SUITE
