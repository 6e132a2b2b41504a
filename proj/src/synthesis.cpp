#include "superband/synthesis.hpp"

#include "superband/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace superband {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
const double kSqrt5 = std::sqrt(5.0);

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

} // namespace

void SynthesisParams::validate() const {
  if (!std::isfinite(kappa0)) throw ConfigError("state: kappa0 must be finite");
  if (!finite_positive(delta_kappa)) throw ConfigError("state: delta_kappa must be > 0");
  if (!std::isfinite(alpha) || alpha < 0.0) throw ConfigError("state: alpha must be >= 0");
  if (!finite_positive(mass)) throw ConfigError("state: mass must be > 0");
  if (!finite_positive(hbar)) throw ConfigError("state: hbar must be > 0");
  if (chirp && (!std::isfinite(*chirp) || *chirp < 0.0))
    throw ConfigError("state: chirp must be >= 0");
}

SynthesisParams gaussian_of(const SynthesisParams& params) {
  SynthesisParams g = params;
  g.alpha = 0.0;
  return g;
}

double normalization_radicand(double alpha) {
  return 1.0 / kSqrt2 - 2.0 * alpha / kSqrt5 + alpha * alpha / (2.0 * kSqrt2);
}

double normalization_constant(const SynthesisParams& params) {
  params.validate();
  const double radicand = normalization_radicand(params.alpha);
  if (!(radicand > 0.0)) throw ConfigError("state: normalization radicand is not positive");
  // (pi/4)^{1/4} sqrt(dk (sqrt2 - 4a/sqrt5 + a^2/sqrt2)) = sqrt(sqrt(pi) dk r(a))
  return std::sqrt(std::sqrt(kPi) * params.delta_kappa * radicand);
}

double spectrum_value(const SynthesisParams& params, double kappa) {
  const double u = (kappa - params.kappa0) / params.delta_kappa;
  const double v = std::exp(-u * u) - params.alpha * std::exp(-4.0 * u * u);
  return v / normalization_constant(params);
}

double log10_spectrum_weight(const SynthesisParams& params, double kappa) {
  // |phi0|^2 = N^-2 exp(-2u^2) (1 - alpha exp(-3u^2))^2
  const double u = (kappa - params.kappa0) / params.delta_kappa;
  const double inner = 1.0 - params.alpha * std::exp(-3.0 * u * u);
  if (inner == 0.0) return -std::numeric_limits<double>::infinity();
  const double n = normalization_constant(params);
  const double ln = -2.0 * u * u + 2.0 * std::log(std::abs(inner)) - 2.0 * std::log(n);
  return ln / std::numbers::ln10;
}

MomentumSpectrum momentum_distribution(const SynthesisParams& params, const SimGrid& grid) {
  check_headroom(grid, params.kappa0, params.delta_kappa);
  const double inv_n = 1.0 / normalization_constant(params);
  MomentumSpectrum out{grid, std::vector<Complex>(grid.size()), 0.0};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double u = (grid.kappa(j) - params.kappa0) / params.delta_kappa;
    out.amplitudes[j] = inv_n * (std::exp(-u * u) - params.alpha * std::exp(-4.0 * u * u));
  }
  return out;
}

WaveField initial_wavefunction(const SynthesisParams& params, const SimGrid& grid) {
  check_headroom(grid, params.kappa0, params.delta_kappa);
  const double pref = params.delta_kappa / (kSqrt2 * normalization_constant(params));
  WaveField out{grid, std::vector<Complex>(grid.size()), 0.0};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.x(i);
    const double narrow = params.delta_kappa * x / 2.0;
    const double wide = params.delta_kappa * x / 4.0;
    const double envelope = std::exp(-narrow * narrow) - 0.5 * params.alpha * std::exp(-wide * wide);
    out.amplitudes[i] = pref * envelope * std::polar(1.0, params.kappa0 * x);
  }
  return out;
}

MomentumSpectrum chirped_gaussian_spectrum(const SynthesisParams& params, const SimGrid& grid) {
  const SynthesisParams g = gaussian_of(params);
  g.validate();
  MomentumSpectrum out = momentum_distribution(g, grid);
  const double gamma = params.chirp.value_or(0.0);
  const double rate = params.hbar * gamma / (2.0 * params.mass);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double k = grid.kappa(j);
    out.amplitudes[j] *= std::polar(1.0, rate * k * k);
  }
  return out;
}

double initial_position_std(const SynthesisParams& params) {
  params.validate();
  // |psi0|^2 ~ e^{-c1 x^2} - alpha e^{-c2 x^2} + (alpha^2/4) e^{-c3 x^2}
  const double dk2 = params.delta_kappa * params.delta_kappa;
  const double c[3] = {dk2 / 2.0, 5.0 * dk2 / 16.0, dk2 / 8.0};
  const double w[3] = {1.0, -params.alpha, params.alpha * params.alpha / 4.0};
  double m0 = 0.0, m2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    m0 += w[k] * std::sqrt(kPi / c[k]);
    m2 += w[k] * std::sqrt(kPi) / (2.0 * c[k] * std::sqrt(c[k]));
  }
  return std::sqrt(m2 / m0);
}

double gaussian_width_parameter(const SynthesisParams& params) {
  return kSqrt2 / params.delta_kappa;
}

double analytic_gaussian_density(const SynthesisParams& params, double x, double t) {
  const double d = gaussian_width_parameter(params);
  const double spread = params.hbar * t / params.mass;
  const double w = d * d + spread * spread / (d * d);
  const double shift = x - params.group_velocity() * t;
  return std::exp(-shift * shift / w) / (std::sqrt(kPi) * std::sqrt(w));
}

AnalyticField::AnalyticField(const SynthesisParams& params, double t)
    : kappa0_(params.kappa0),
      velocity_(params.group_velocity()),
      beta_(params.hbar * t / (2.0 * params.mass)),
      t_(t) {
  const double inv_n = 1.0 / normalization_constant(params);
  const double coefficients[2] = {inv_n, -params.alpha * inv_n};
  const double widths[2] = {params.delta_kappa, params.delta_kappa / 2.0};
  for (int j = 0; j < 2; ++j) {
    // (2 pi)^{-1/2} \int exp(-(k-k0)^2/w^2 + i k x - i beta k^2) dk
    //   = (2 pi)^{-1/2} sqrt(pi/a) exp(i k0 x - i beta k0^2 - (x - v t)^2 / (4a))
    const Complex a(1.0 / (widths[j] * widths[j]), beta_);
    const Complex pref = coefficients[j] * std::sqrt(kPi / a) / std::sqrt(2.0 * kPi);
    Term& term = terms_[j];
    term.inv_4a = 1.0 / (4.0 * a);
    if (pref == Complex(0.0, 0.0)) {
      term.log_scale = -std::numeric_limits<double>::infinity();
      term.unit_prefactor = 0.0;
    } else {
      term.log_scale = std::log(std::abs(pref));
      term.unit_prefactor = pref / std::abs(pref);
    }
  }
}

void AnalyticField::scaled_sums(double x, Complex& psi_scaled, Complex& dlog_scaled,
                                double& shift) const {
  const double d = x - velocity_ * t_;
  Complex exponents[2];
  shift = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < 2; ++j) {
    exponents[j] = terms_[j].log_scale - d * d * terms_[j].inv_4a;
    if (terms_[j].unit_prefactor != Complex(0.0, 0.0)) shift = std::max(shift, exponents[j].real());
  }
  psi_scaled = 0.0;
  dlog_scaled = 0.0;
  for (int j = 0; j < 2; ++j) {
    if (terms_[j].unit_prefactor == Complex(0.0, 0.0)) continue;
    const Complex w = terms_[j].unit_prefactor * std::exp(exponents[j] - shift);
    psi_scaled += w;
    dlog_scaled += w * (-2.0 * d * terms_[j].inv_4a);
  }
}

Complex AnalyticField::value(double x) const {
  return sample(x).value;
}

FieldSample AnalyticField::sample(double x) const {
  Complex psi_s, dlog_s;
  double shift;
  scaled_sums(x, psi_s, dlog_s, shift);
  const Complex carrier = std::polar(std::exp(shift), kappa0_ * x - beta_ * kappa0_ * kappa0_);
  const Complex value = carrier * psi_s;
  const Complex derivative = carrier * (Complex(0.0, kappa0_) * psi_s + dlog_s);
  return {value, derivative};
}

double AnalyticField::log_density(double x) const {
  Complex psi_s, dlog_s;
  double shift;
  scaled_sums(x, psi_s, dlog_s, shift);
  return 2.0 * shift + std::log(std::norm(psi_s));
}

double AnalyticField::local_wavenumber(double x) const {
  Complex psi_s, dlog_s;
  double shift;
  scaled_sums(x, psi_s, dlog_s, shift);
  static const double kLogUnderflow = std::log(1e-300);
  const double rho_s = std::norm(psi_s);
  if (!(rho_s > 0.0) || 2.0 * shift + std::log(rho_s) < kLogUnderflow)
    throw NodeUnderflowError("velocity: |psi|^2 below 1e-300");
  return kappa0_ + (std::conj(psi_s) * dlog_s).imag() / rho_s;
}

std::vector<Complex> analytic_superband_field(const SynthesisParams& params,
                                              std::span<const double> x, double t) {
  const AnalyticField field(params, t);
  std::vector<Complex> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = field.value(x[i]);
  return out;
}

} // namespace superband
