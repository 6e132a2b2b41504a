#include "superband/grid.hpp"

#include "superband/error.hpp"
#include "superband/fft.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

namespace superband {
namespace {

constexpr double kPi = std::numbers::pi;

long signed_index(std::size_t j, std::size_t n) {
  return j < n / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
}

// exp(i kappa_j x_min), the offset between the grid origin and x = 0.
std::vector<Complex> origin_phase(const SimGrid& grid) {
  // kappa_j x_min = 2 pi s(j) x_min / (x_max - x_min); reduce the turn count
  // before scaling so large |kappa x_min| keeps full precision.
  const std::size_t n = grid.size();
  const double origin = grid.x_min() / (grid.x_max() - grid.x_min());
  std::vector<Complex> phase(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double turns = static_cast<double>(signed_index(j, n)) * origin;
    phase[j] = std::polar(1.0, 2.0 * kPi * (turns - std::round(turns)));
  }
  return phase;
}

std::vector<Complex> momentum_to_position_samples(const SimGrid& grid, const std::vector<Complex>& phi) {
  const auto phase = origin_phase(grid);
  std::vector<Complex> in(grid.size()), out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) in[j] = phi[j] * phase[j];
  fft::backward(in, out);
  const double scale = grid.dkappa() / std::sqrt(2.0 * kPi);
  for (auto& v : out) v *= scale;
  return out;
}

std::vector<Complex> position_to_momentum_samples(const SimGrid& grid, const std::vector<Complex>& psi) {
  const auto phase = origin_phase(grid);
  std::vector<Complex> out(grid.size());
  fft::forward(psi, out);
  const double scale = grid.dx() / std::sqrt(2.0 * kPi);
  for (std::size_t j = 0; j < grid.size(); ++j) out[j] *= scale * std::conj(phase[j]);
  return out;
}

} // namespace

SimGrid::SimGrid(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_(n_points) {
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max))
    throw ConfigError("grid: x_max must exceed x_min");
  if (n_points < 2 || !std::has_single_bit(n_points))
    throw ConfigError("grid: n_points must be a power of two >= 2, got " + std::to_string(n_points));
  dx_ = (x_max - x_min) / static_cast<double>(n_points);
  dkappa_ = 2.0 * kPi / (static_cast<double>(n_points) * dx_);
}

double SimGrid::kappa_nyquist() const { return kPi / dx_; }

double SimGrid::kappa(std::size_t j) const {
  return static_cast<double>(signed_index(j, n_)) * dkappa_;
}

std::vector<double> SimGrid::positions() const {
  std::vector<double> xs(n_);
  for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
  return xs;
}

std::vector<double> SimGrid::wavenumbers() const {
  std::vector<double> ks(n_);
  for (std::size_t j = 0; j < n_; ++j) ks[j] = kappa(j);
  return ks;
}

std::size_t SimGrid::index_of(double x) const {
  const double r = std::round((x - x_min_) / dx_);
  if (r <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(r), n_ - 1);
}

void check_headroom(const SimGrid& grid, double kappa0, double delta_kappa) {
  const double required = 8.0 * (std::abs(kappa0) + 4.0 * delta_kappa);
  if (grid.kappa_nyquist() < required) {
    std::ostringstream msg;
    msg << "grid: insufficient wavenumber headroom, pi/dx = " << grid.kappa_nyquist()
        << " < 8 (kappa0 + 4 delta_kappa) = " << required;
    throw ConfigError(msg.str());
  }
}

SimGrid make_grid(const GridSpec& spec, double kappa0, double delta_kappa) {
  SimGrid grid(spec.x_min, spec.x_max, spec.n_points);
  check_headroom(grid, kappa0, delta_kappa);
  return grid;
}

WaveField to_position(const MomentumSpectrum& spectrum) {
  return {spectrum.grid, momentum_to_position_samples(spectrum.grid, spectrum.amplitudes), spectrum.time};
}

MomentumSpectrum to_momentum(const WaveField& field) {
  return {field.grid, position_to_momentum_samples(field.grid, field.amplitudes), field.time};
}

MomentumSpectrum evolve_spectrum(const MomentumSpectrum& spectrum, double t, const Units& units) {
  MomentumSpectrum out{spectrum.grid, spectrum.amplitudes, spectrum.time + t};
  const double rate = units.hbar * t / (2.0 * units.mass);
  for (std::size_t j = 0; j < out.amplitudes.size(); ++j) {
    const double k = spectrum.grid.kappa(j);
    out.amplitudes[j] *= std::polar(1.0, -rate * k * k);
  }
  return out;
}

WaveField propagate(const MomentumSpectrum& spectrum, double t, const Units& units) {
  return to_position(evolve_spectrum(spectrum, t, units));
}

std::vector<Complex> spectral_derivative(const WaveField& field) {
  const SimGrid& grid = field.grid;
  const std::size_t n = grid.size();
  std::vector<Complex> spectrum(n), out(n);
  fft::forward(field.amplitudes, spectrum);
  for (std::size_t j = 0; j < n; ++j) {
    // The Nyquist mode has no well-defined sign; drop it.
    const double k = (j == n / 2) ? 0.0 : grid.kappa(j);
    spectrum[j] *= Complex(0.0, k / static_cast<double>(n));
  }
  fft::backward(spectrum, out);
  return out;
}

std::vector<double> spectral_derivative(const SimGrid& grid, const std::vector<double>& f) {
  WaveField tmp{grid, std::vector<Complex>(f.begin(), f.end()), 0.0};
  const auto d = spectral_derivative(tmp);
  std::vector<double> out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i].real();
  return out;
}

double norm_squared(const WaveField& field) {
  double sum = 0.0;
  for (const auto& v : field.amplitudes) sum += std::norm(v);
  return sum * field.grid.dx();
}

double norm_squared(const MomentumSpectrum& spectrum) {
  double sum = 0.0;
  for (const auto& v : spectrum.amplitudes) sum += std::norm(v);
  return sum * spectrum.grid.dkappa();
}

std::vector<double> density(const WaveField& field) {
  std::vector<double> rho(field.amplitudes.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(field.amplitudes[i]);
  return rho;
}

double boundary_mass(const WaveField& field, double fraction) {
  const std::size_t n = field.grid.size();
  const auto edge = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  double sum = 0.0;
  for (std::size_t i = 0; i < std::min(edge, n); ++i) {
    sum += std::norm(field.amplitudes[i]);
    sum += std::norm(field.amplitudes[n - 1 - i]);
  }
  return sum * field.grid.dx();
}

} // namespace superband
