#pragma once

// Superbandwidth state family: a Gaussian of width delta_kappa minus
// alpha times a Gaussian of width delta_kappa / 2, both centred on kappa0,
// plus the chirped single-Gaussian family. Closed-form evaluators for the
// freely evolved field live here as well.

#include "superband/grid.hpp"

#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace superband {

struct SynthesisParams {
  double kappa0 = 2.0 * std::numbers::pi;
  double delta_kappa = 0.5;
  double alpha = 1.0;
  double mass = 1.0;
  double hbar = 1.0;
  std::optional<double> chirp;  ///< gamma, a time; only used by the chirped family

  Units units() const { return {hbar, mass}; }
  /// Group velocity hbar kappa0 / m.
  double group_velocity() const { return hbar * kappa0 / mass; }

  /// Throws ConfigError when delta_kappa <= 0, alpha < 0, m or hbar <= 0,
  /// a non-finite field, or a negative chirp.
  void validate() const;
};

/// Same parameters with alpha = 0 (the reference Gaussian).
SynthesisParams gaussian_of(const SynthesisParams& params);

/// The radicand r(alpha) = 1/sqrt(2) - 2 alpha/sqrt(5) + alpha^2/(2 sqrt(2))
/// of N^2 = sqrt(pi) delta_kappa r(alpha). Strictly positive for real alpha.
double normalization_radicand(double alpha);

/// N = (pi/4)^{1/4} sqrt(delta_kappa (sqrt 2 - 4 alpha/sqrt 5 + alpha^2/sqrt 2)),
/// which makes \int |phi0|^2 dkappa = 1 exactly.
double normalization_constant(const SynthesisParams& params);

/// phi0(kappa), real valued.
double spectrum_value(const SynthesisParams& params, double kappa);

/// log10 |phi0(kappa)|^2 evaluated without forming the tiny intermediate
/// amplitudes; -inf at exact zeros.
double log10_spectrum_weight(const SynthesisParams& params, double kappa);

MomentumSpectrum momentum_distribution(const SynthesisParams& params, const SimGrid& grid);

/// Closed-form position representation of the t = 0 state.
WaveField initial_wavefunction(const SynthesisParams& params, const SimGrid& grid);

/// Gaussian (alpha ignored) with the spectral phase exp(+i hbar kappa^2 gamma / 2m).
MomentumSpectrum chirped_gaussian_spectrum(const SynthesisParams& params, const SimGrid& grid);

/// Standard deviation of |psi0|^2 in closed form (sum of three Gaussian moments).
double initial_position_std(const SynthesisParams& params);

/// Width parameter of the closed-form Gaussian density, sqrt(2)/delta_kappa.
/// The standard deviation of that density at t = 0 is 1/delta_kappa.
double gaussian_width_parameter(const SynthesisParams& params);

/// |psi_G(x,t)|^2 for the alpha = 0 member:
///   exp(-(x - v t)^2 / W(t)) / (sqrt(pi) sqrt(W(t))),
///   W(t) = D^2 + hbar^2 t^2 / (m^2 D^2),  D = gaussian_width_parameter.
double analytic_gaussian_density(const SynthesisParams& params, double x, double t);

struct FieldSample {
  Complex value;
  Complex derivative;
};

/// Grid-free evaluator of the freely evolved superbandwidth field, bound to
/// one time. Each Gaussian term evolves to a complex Gaussian obtained by
/// completing the square; evaluation is log-scaled so tails never overflow.
class AnalyticField {
public:
  AnalyticField(const SynthesisParams& params, double t);

  double time() const { return t_; }

  Complex value(double x) const;
  FieldSample sample(double x) const;

  /// Im(psi* psi') / |psi|^2. Throws NodeUnderflowError if |psi|^2 < 1e-300.
  double local_wavenumber(double x) const;

  /// log |psi(x)|^2, finite far into the tails.
  double log_density(double x) const;

private:
  struct Term {
    double log_scale;     // log of |prefactor|
    Complex unit_prefactor;
    Complex inv_4a;       // 1 / (4 a), a = 1/w^2 + i hbar t / 2m
  };
  // Returns sum_j w_j and sum_j w_j * (-2 d inv_4a_j) scaled by exp(-shift).
  void scaled_sums(double x, Complex& psi_scaled, Complex& dlog_scaled, double& shift) const;

  double kappa0_;
  double velocity_;
  double beta_;         // hbar t / 2m
  double t_;
  Term terms_[2];
};

/// psi(x, t) at arbitrary positions.
std::vector<Complex> analytic_superband_field(const SynthesisParams& params,
                                              std::span<const double> x, double t);

} // namespace superband
