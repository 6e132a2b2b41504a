#pragma once

// Uniform periodic 1D grid, the unitary Fourier pair between position and
// wavenumber space, and the exact free-particle propagator.
//
// Transform convention (kappa -> x):
//
//   psi(x) = (2 pi)^{-1/2} \int phi(kappa) exp(+i kappa x) dkappa
//
// discretized on x_i = x_min + i dx and the conjugate samples
// kappa_j = s(j) dkappa, dkappa = 2 pi / (n dx), where s(j) is the signed
// FFT index (0, 1, ..., n/2 - 1, -n/2, ..., -1). Momentum arrays are kept in
// that FFT order.

#include <complex>
#include <cstddef>
#include <vector>

namespace superband {

using Complex = std::complex<double>;

struct Units {
  double hbar = 1.0;
  double mass = 1.0;
};

struct GridSpec {
  double x_min = -512.0;
  double x_max = 512.0;
  std::size_t n_points = std::size_t{1} << 18;
};

class SimGrid {
public:
  SimGrid(double x_min, double x_max, std::size_t n_points);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return n_; }
  double dx() const { return dx_; }
  double dkappa() const { return dkappa_; }
  /// pi / dx, the largest representable |kappa|.
  double kappa_nyquist() const;

  double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * dx_; }
  double kappa(std::size_t j) const;

  std::vector<double> positions() const;
  std::vector<double> wavenumbers() const;

  /// Nearest sample index to x, clamped to the grid.
  std::size_t index_of(double x) const;

  bool operator==(const SimGrid&) const = default;

private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double dx_;
  double dkappa_;
};

struct WaveField {
  SimGrid grid;
  std::vector<Complex> amplitudes;
  double time = 0.0;
};

struct MomentumSpectrum {
  SimGrid grid;
  std::vector<Complex> amplitudes;
  double time = 0.0;
};

/// Builds a grid and checks that pi/dx >= 8 (kappa0 + 4 delta_kappa).
/// Throws ConfigError on a non power-of-two size, empty interval, or
/// insufficient wavenumber headroom.
SimGrid make_grid(const GridSpec& spec, double kappa0, double delta_kappa);

/// Headroom check alone, for grids built elsewhere.
void check_headroom(const SimGrid& grid, double kappa0, double delta_kappa);

WaveField to_position(const MomentumSpectrum& spectrum);
MomentumSpectrum to_momentum(const WaveField& field);

/// Multiplies by exp(-i hbar kappa^2 t / 2m) and transforms to position space.
/// The result is stamped spectrum.time + t.
WaveField propagate(const MomentumSpectrum& spectrum, double t, const Units& units = {});

/// Same phase multiplication, staying in momentum space.
MomentumSpectrum evolve_spectrum(const MomentumSpectrum& spectrum, double t,
                                 const Units& units = {});

/// d psi / dx via multiplication by i kappa in momentum space.
std::vector<Complex> spectral_derivative(const WaveField& field);

/// d f / dx of a real periodic sample array on the grid.
std::vector<double> spectral_derivative(const SimGrid& grid, const std::vector<double>& f);

double norm_squared(const WaveField& field);
double norm_squared(const MomentumSpectrum& spectrum);

std::vector<double> density(const WaveField& field);

/// Probability mass within the outer `fraction` of the grid on each side.
double boundary_mass(const WaveField& field, double fraction = 0.05);

} // namespace superband
