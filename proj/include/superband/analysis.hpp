#pragma once

// Local momentum, super/sub-oscillation extrema, probability current and
// flux bookkeeping, moments, spreading laws and the interference time.

#include "superband/grid.hpp"
#include "superband/synthesis.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace superband {

inline constexpr double kDefaultFloor = 1e-7;

struct LocalMomentumField {
  SimGrid grid;
  double time = 0.0;
  std::vector<double> values;       ///< kappa_l(x_i); NaN where masked
  std::vector<std::uint8_t> valid;  ///< 1 iff |psi|^2 >= floor * max |psi|^2
};

/// kappa_l = Im(psi* psi') / |psi|^2 with the spectral derivative.
/// `floor` is relative to max |psi|^2 and must lie in (0, 1e-3].
LocalMomentumField local_momentum(const WaveField& field, double floor = kDefaultFloor);

enum class ExtremumKind { super, sub };

struct ExtremumRecord {
  ExtremumKind kind = ExtremumKind::super;
  double kappa_over_kappa0 = 0.0;
  double x_at = 0.0;
  double t = 0.0;
  double density_at = 0.0;             ///< |psi(x_at, t)|^2
  double log10_spectrum_weight = 0.0;  ///< log10 |phi0(kappa)|^2 at the extremal kappa
  double spectrum_weight = 0.0;        ///< 10^log10_spectrum_weight (may underflow to 0)
  double weight_ratio = 0.0;           ///< sqrt(spectrum_weight / density_at)
};

struct SpecialMomenta {
  ExtremumRecord super;
  ExtremumRecord sub;
};

/// Global max and min of kappa_l over the valid mask, each required to be an
/// interior local extremum of its mask segment lying above (below) kappa0.
/// Sub-grid position and value come from a least-squares parabola through 5
/// samples. Throws NoExtremumError when either is missing.
SpecialMomenta find_special_momenta(const WaveField& field, const SynthesisParams& params,
                                    double floor = kDefaultFloor);

/// sqrt(spectrum_weight / density_at), formed in log space.
double weight_ratio(const ExtremumRecord& record);
double log10_weight_ratio(const ExtremumRecord& record);

/// J = (hbar/m) Im(psi* psi').
std::vector<double> probability_current(const WaveField& field, const Units& units = {});

/// sup_x | d|psi|^2/dt + dJ/dx | at time t, with a centred difference in
/// time (step dt_fd) over exactly propagated fields and a spectral dx.
double continuity_residual(const MomentumSpectrum& spectrum0, double t, double dt_fd = 1e-4,
                           const Units& units = {});

/// \int_{-inf}^{x} |psi|^2, exact for the band-limited grid field.
double cumulative_probability(const WaveField& field, double x);

/// psi and d psi/dx at an arbitrary point, summed directly from a spectrum.
FieldSample field_at(const MomentumSpectrum& spectrum, double x);

struct FluxReport {
  double x_plane = 0.0;
  double t_initial = 0.0;
  double t_final = 0.0;
  double flux_by_current = 0.0;      ///< Simpson quadrature of J(x_P, t)
  double flux_by_probability = 0.0;  ///< cumulative probability at t_i minus at t_f
  int samples = 0;
};

inline constexpr double kFluxAgreementTolerance = 1e-6;

/// Both routes of the flux through a plane. `n_quad` (>= 64, rounded up to
/// even) is the number of Simpson panels. Throws NumericalHealthError when
/// the routes differ by more than kFluxAgreementTolerance.
FluxReport probability_flux(const MomentumSpectrum& spectrum0, double x_plane, double t_initial,
                            double t_final, int n_quad = 128, const Units& units = {});

struct FluxDifference {
  FluxReport left;
  FluxReport right;
  double delta = 0.0;               ///< F(x_PL) - F(x_PR) = P(t_f) - P(t_i)
  double probability_initial = 0.0;
  double probability_final = 0.0;
  /// +1 localizing (P grows), -1 delocalizing, 0 neither.
  int verdict() const { return delta > 0.0 ? 1 : (delta < 0.0 ? -1 : 0); }
};

FluxDifference flux_difference(const MomentumSpectrum& spectrum0, double x_left, double x_right,
                               double t_initial, double t_final, int n_quad = 128,
                               const Units& units = {});

/// Trapezoidal \int_{x_L}^{x_R} |psi|^2, linearly interpolated at the ends.
double interval_probability(const WaveField& field, double x_left, double x_right);

struct Moments {
  double mean = 0.0;
  double std_dev = 0.0;
};

Moments position_moments(const WaveField& field);
Moments wavenumber_moments(const MomentumSpectrum& spectrum);

/// Delta x_t = Delta x sqrt(1 + (hbar t / (2 m Delta x^2))^2).
double gaussian_spread(double dx0, double t, double mass = 1.0, double hbar = 1.0);
/// The same law written with Delta p: Delta x sqrt(1 + (2 Delta p^2 t / (m hbar))^2).
/// Agrees with gaussian_spread when Delta x Delta p = hbar / 2.
double gaussian_spread_momentum_form(double dx0, double dp, double t, double mass = 1.0,
                                     double hbar = 1.0);

/// t_I = m dx / dp.
double interference_time(double dx, double dp, double mass = 1.0);
/// t_I = m dx^2 / hbar, i.e. the first form with dx dp = hbar substituted.
double interference_time_from_width(double dx, double mass = 1.0, double hbar = 1.0);

struct ShapeCheck {
  double correlation = 0.0;
  double interference_time = 0.0;
  bool asymptotic = false;  ///< t_large >= 10 t_I
  std::string warning;
};

/// Maps |psi(x, t_large)|^2 onto kappa = m x / (hbar t_large) and returns
/// the Pearson correlation with |phi0(kappa)|^2 over |kappa - kappa0| <= 4 delta_kappa.
/// t_I = m sigma0^2 / hbar with sigma0 = initial_position_std(params).
ShapeCheck asymptotic_shape_check(const SynthesisParams& params, const SimGrid& grid,
                                  double t_large);

struct LobeFit {
  double slope = 0.0;
  double x_left = 0.0;   ///< density minimum bounding the central lobe
  double x_right = 0.0;
};

/// Least-squares slope of kappa_l across the middle half of the central lobe,
/// the lobe between the density minima that enclose x = v t.
LobeFit central_lobe_slope(const WaveField& field, const SynthesisParams& params);

struct CriticalAlpha {
  double alpha_c = 0.0;
  double slope_below = 0.0;  ///< slope at the lower end of the final bracket
  double slope_above = 0.0;
  int iterations = 0;
};

/// Bisects alpha in (alpha_lo, alpha_hi) on the sign of the central-lobe
/// slope at t_probe. Throws BracketError if the ends share a sign.
CriticalAlpha critical_alpha(const SynthesisParams& params, const SimGrid& grid,
                             double t_probe = 1.0, double alpha_lo = 1.0, double alpha_hi = 1.8,
                             double tolerance = 1e-4);

/// Pearson correlation coefficient.
double pearson(const std::vector<double>& a, const std::vector<double>& b);

} // namespace superband
