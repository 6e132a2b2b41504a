#include "superband/analysis.hpp"

#include "superband/error.hpp"
#include "superband/fft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace superband {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// An extremum must leave kappa0 by more than this (relative) to count.
constexpr double kMinExcursion = 1e-6;

struct ParabolaVertex {
  double offset;  // in samples, within [-2, 2]
  double value;
};

// Least-squares parabola through y(-2..2); returns its vertex.
ParabolaVertex fit_vertex(const double* y) {
  double sum = 0.0, sum_s = 0.0, sum_s2 = 0.0;
  for (int s = -2; s <= 2; ++s) {
    sum += y[s + 2];
    sum_s += s * y[s + 2];
    sum_s2 += s * s * y[s + 2];
  }
  const double c1 = sum_s / 10.0;
  const double c0 = (34.0 * sum - 10.0 * sum_s2) / 70.0;
  const double c2 = (5.0 * sum_s2 - 10.0 * sum) / 70.0;
  double s = 0.0;
  if (c2 != 0.0) s = std::clamp(-c1 / (2.0 * c2), -2.0, 2.0);
  return {s, c0 + c1 * s + c2 * s * s};
}

double fit_at(const double* y, double s) {
  double sum = 0.0, sum_s = 0.0, sum_s2 = 0.0;
  for (int k = -2; k <= 2; ++k) {
    sum += y[k + 2];
    sum_s += k * y[k + 2];
    sum_s2 += k * k * y[k + 2];
  }
  const double c1 = sum_s / 10.0;
  const double c0 = (34.0 * sum - 10.0 * sum_s2) / 70.0;
  const double c2 = (5.0 * sum_s2 - 10.0 * sum) / 70.0;
  return c0 + c1 * s + c2 * s * s;
}

// Interior of a mask segment: two valid samples on each side.
bool is_interior(const LocalMomentumField& lm, std::size_t i) {
  if (i < 2 || i + 2 >= lm.values.size()) return false;
  for (std::size_t k = i - 2; k <= i + 2; ++k)
    if (!lm.valid[k]) return false;
  return true;
}

ExtremumRecord make_record(ExtremumKind kind, const LocalMomentumField& lm,
                           const std::vector<double>& rho, std::size_t i,
                           const SynthesisParams& params) {
  const double* kv = &lm.values[i - 2];
  const ParabolaVertex v = fit_vertex(kv);
  ExtremumRecord r;
  r.kind = kind;
  r.kappa_over_kappa0 = v.value / params.kappa0;
  r.x_at = lm.grid.x(i) + v.offset * lm.grid.dx();
  r.t = lm.time;
  r.density_at = fit_at(&rho[i - 2], v.offset);
  r.log10_spectrum_weight = log10_spectrum_weight(params, v.value);
  r.spectrum_weight = std::pow(10.0, r.log10_spectrum_weight);
  r.weight_ratio = weight_ratio(r);
  return r;
}

// Evaluates psi and psi' of an evolved spectrum at arbitrary x by direct
// summation over the non-negligible modes.
class PointEvaluator {
public:
  explicit PointEvaluator(const MomentumSpectrum& spectrum) : origin_time_(spectrum.time) {
    double peak = 0.0;
    for (const auto& a : spectrum.amplitudes) peak = std::max(peak, std::abs(a));
    const double cutoff = 1e-18 * peak;
    for (std::size_t j = 0; j < spectrum.amplitudes.size(); ++j) {
      if (std::abs(spectrum.amplitudes[j]) > cutoff) {
        kappa_.push_back(spectrum.grid.kappa(j));
        amp_.push_back(spectrum.amplitudes[j]);
      }
    }
    scale_ = spectrum.grid.dkappa() / std::sqrt(2.0 * kPi);
  }

  FieldSample at(double x, double t, const Units& units) const {
    const double rate = units.hbar * (t - origin_time_) / (2.0 * units.mass);
    Complex psi = 0.0, dpsi = 0.0;
    for (std::size_t j = 0; j < kappa_.size(); ++j) {
      const double k = kappa_[j];
      const Complex term = amp_[j] * std::polar(1.0, k * x - rate * k * k);
      psi += term;
      dpsi += Complex(0.0, k) * term;
    }
    return {psi * scale_, dpsi * scale_};
  }

private:
  double origin_time_;
  double scale_ = 0.0;
  std::vector<double> kappa_;
  std::vector<Complex> amp_;
};

double current_at(const PointEvaluator& eval, double x, double t, const Units& units) {
  const FieldSample s = eval.at(x, t, units);
  return units.hbar / units.mass * (std::conj(s.value) * s.derivative).imag();
}

} // namespace

LocalMomentumField local_momentum(const WaveField& field, double floor) {
  if (!(floor > 0.0 && floor <= 1e-3)) throw ConfigError("local_momentum: floor must lie in (0, 1e-3]");
  const auto dpsi = spectral_derivative(field);
  const std::size_t n = field.grid.size();
  LocalMomentumField lm{field.grid, field.time, std::vector<double>(n, kNaN),
                        std::vector<std::uint8_t>(n, 0)};
  double peak = 0.0;
  for (const auto& v : field.amplitudes) peak = std::max(peak, std::norm(v));
  const double threshold = floor * peak;
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = std::norm(field.amplitudes[i]);
    if (rho >= threshold && rho > 0.0) {
      lm.valid[i] = 1;
      lm.values[i] = (std::conj(field.amplitudes[i]) * dpsi[i]).imag() / rho;
    }
  }
  return lm;
}

SpecialMomenta find_special_momenta(const WaveField& field, const SynthesisParams& params,
                                    double floor) {
  const LocalMomentumField lm = local_momentum(field, floor);
  const auto rho = density(field);
  std::size_t imax = 0, imin = 0;
  double vmax = -std::numeric_limits<double>::infinity();
  double vmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lm.values.size(); ++i) {
    if (!lm.valid[i]) continue;
    if (lm.values[i] > vmax) { vmax = lm.values[i]; imax = i; }
    if (lm.values[i] < vmin) { vmin = lm.values[i]; imin = i; }
  }
  const double k0 = params.kappa0;
  const bool has_super = std::isfinite(vmax) && is_interior(lm, imax) && vmax > k0 * (1.0 + kMinExcursion);
  const bool has_sub = std::isfinite(vmin) && is_interior(lm, imin) && vmin < k0 * (1.0 - kMinExcursion);
  if (!has_super || !has_sub) {
    std::ostringstream msg;
    msg << "no interior super/sub local-momentum pair at t = " << field.time;
    throw NoExtremumError(msg.str());
  }
  return {make_record(ExtremumKind::super, lm, rho, imax, params),
          make_record(ExtremumKind::sub, lm, rho, imin, params)};
}

double log10_weight_ratio(const ExtremumRecord& record) {
  return 0.5 * (record.log10_spectrum_weight - std::log10(record.density_at));
}

double weight_ratio(const ExtremumRecord& record) {
  return std::pow(10.0, log10_weight_ratio(record));
}

std::vector<double> probability_current(const WaveField& field, const Units& units) {
  const auto dpsi = spectral_derivative(field);
  std::vector<double> j(field.amplitudes.size());
  const double scale = units.hbar / units.mass;
  for (std::size_t i = 0; i < j.size(); ++i)
    j[i] = scale * (std::conj(field.amplitudes[i]) * dpsi[i]).imag();
  return j;
}

double continuity_residual(const MomentumSpectrum& spectrum0, double t, double dt_fd,
                           const Units& units) {
  if (!(dt_fd > 0.0)) throw ConfigError("continuity_residual: dt_fd must be > 0");
  const double t_rel = t - spectrum0.time;
  const auto rho_plus = density(propagate(spectrum0, t_rel + dt_fd, units));
  const auto rho_minus = density(propagate(spectrum0, t_rel - dt_fd, units));
  const WaveField now = propagate(spectrum0, t_rel, units);
  const auto dj = spectral_derivative(now.grid, probability_current(now, units));
  double worst = 0.0;
  for (std::size_t i = 0; i < dj.size(); ++i) {
    const double drho_dt = (rho_plus[i] - rho_minus[i]) / (2.0 * dt_fd);
    worst = std::max(worst, std::abs(drho_dt + dj[i]));
  }
  return worst;
}

double cumulative_probability(const WaveField& field, double x) {
  const SimGrid& grid = field.grid;
  const std::size_t n = grid.size();
  std::vector<Complex> rho(n), coeff(n);
  for (std::size_t i = 0; i < n; ++i) rho[i] = std::norm(field.amplitudes[i]);
  fft::forward(rho, coeff);
  // rho(x) = sum_k c_k exp(i kappa_k (x - x_min)), c_k = FFT / n.
  const double s = std::clamp(x, grid.x_min(), grid.x_max()) - grid.x_min();
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = coeff[0].real() * inv_n * s;
  for (std::size_t j = 1; j < n; ++j) {
    if (j == n / 2) continue;
    const double k = grid.kappa(j);
    const Complex c = coeff[j] * inv_n;
    total += (c * (std::polar(1.0, k * s) - 1.0) / Complex(0.0, k)).real();
  }
  return total;
}

FieldSample field_at(const MomentumSpectrum& spectrum, double x) {
  return PointEvaluator(spectrum).at(x, spectrum.time, Units{});
}

FluxReport probability_flux(const MomentumSpectrum& spectrum0, double x_plane, double t_initial,
                            double t_final, int n_quad, const Units& units) {
  if (t_final < t_initial) throw ConfigError("probability_flux: t_initial must not exceed t_final");
  if (n_quad < 64) throw ConfigError("probability_flux: n_quad must be >= 64");
  if (n_quad % 2 != 0) ++n_quad;

  FluxReport report;
  report.x_plane = x_plane;
  report.t_initial = t_initial;
  report.t_final = t_final;
  report.samples = n_quad;
  if (t_final == t_initial) return report;

  const PointEvaluator eval(spectrum0);
  const double h = (t_final - t_initial) / n_quad;
  double simpson = 0.0;
  for (int k = 0; k <= n_quad; ++k) {
    const double w = (k == 0 || k == n_quad) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    simpson += w * current_at(eval, x_plane, t_initial + k * h, units);
  }
  report.flux_by_current = simpson * h / 3.0;

  const double t0 = spectrum0.time;
  const WaveField at_initial = propagate(spectrum0, t_initial - t0, units);
  const WaveField at_final = propagate(spectrum0, t_final - t0, units);
  report.flux_by_probability =
      cumulative_probability(at_initial, x_plane) - cumulative_probability(at_final, x_plane);

  if (std::abs(report.flux_by_current - report.flux_by_probability) > kFluxAgreementTolerance) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "flux routes disagree at x = " << x_plane << ": current " << report.flux_by_current
        << " vs probability " << report.flux_by_probability;
    throw NumericalHealthError(msg.str());
  }
  return report;
}

FluxDifference flux_difference(const MomentumSpectrum& spectrum0, double x_left, double x_right,
                               double t_initial, double t_final, int n_quad, const Units& units) {
  if (x_right < x_left) throw ConfigError("flux_difference: x_left must not exceed x_right");
  FluxDifference out;
  out.left = probability_flux(spectrum0, x_left, t_initial, t_final, n_quad, units);
  out.right = probability_flux(spectrum0, x_right, t_initial, t_final, n_quad, units);
  const double t0 = spectrum0.time;
  const WaveField at_initial = propagate(spectrum0, t_initial - t0, units);
  const WaveField at_final = propagate(spectrum0, t_final - t0, units);
  out.probability_initial =
      cumulative_probability(at_initial, x_right) - cumulative_probability(at_initial, x_left);
  out.probability_final =
      cumulative_probability(at_final, x_right) - cumulative_probability(at_final, x_left);
  out.delta = out.left.flux_by_probability - out.right.flux_by_probability;
  return out;
}

double interval_probability(const WaveField& field, double x_left, double x_right) {
  if (x_right < x_left) throw ConfigError("interval_probability: x_left must not exceed x_right");
  const SimGrid& grid = field.grid;
  const double last = grid.x(grid.size() - 1);
  const double a = std::clamp(x_left, grid.x_min(), last);
  const double b = std::clamp(x_right, grid.x_min(), last);
  if (b <= a) return 0.0;

  auto rho = [&](std::size_t i) { return std::norm(field.amplitudes[i]); };
  auto rho_at = [&](double x) {
    const double pos = (x - grid.x_min()) / grid.dx();
    const auto i = std::min(static_cast<std::size_t>(pos), grid.size() - 2);
    const double f = pos - static_cast<double>(i);
    return (1.0 - f) * rho(i) + f * rho(i + 1);
  };

  // First grid point at or after a, last at or before b.
  const auto first = static_cast<std::size_t>(std::ceil((a - grid.x_min()) / grid.dx()));
  const auto final_i = static_cast<std::size_t>(std::floor((b - grid.x_min()) / grid.dx()));
  if (first > final_i) return 0.5 * (rho_at(a) + rho_at(b)) * (b - a);

  double total = 0.5 * (rho_at(a) + rho(first)) * (grid.x(first) - a);
  for (std::size_t i = first; i < final_i; ++i) total += 0.5 * (rho(i) + rho(i + 1)) * grid.dx();
  total += 0.5 * (rho(final_i) + rho_at(b)) * (b - grid.x(final_i));
  return total;
}

Moments position_moments(const WaveField& field) {
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < field.amplitudes.size(); ++i) {
    const double w = std::norm(field.amplitudes[i]);
    m0 += w;
    m1 += w * field.grid.x(i);
  }
  const double mean = m1 / m0;
  double var = 0.0;
  for (std::size_t i = 0; i < field.amplitudes.size(); ++i) {
    const double d = field.grid.x(i) - mean;
    var += std::norm(field.amplitudes[i]) * d * d;
  }
  return {mean, std::sqrt(var / m0)};
}

Moments wavenumber_moments(const MomentumSpectrum& spectrum) {
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t j = 0; j < spectrum.amplitudes.size(); ++j) {
    const double w = std::norm(spectrum.amplitudes[j]);
    m0 += w;
    m1 += w * spectrum.grid.kappa(j);
  }
  const double mean = m1 / m0;
  double var = 0.0;
  for (std::size_t j = 0; j < spectrum.amplitudes.size(); ++j) {
    const double d = spectrum.grid.kappa(j) - mean;
    var += std::norm(spectrum.amplitudes[j]) * d * d;
  }
  return {mean, std::sqrt(var / m0)};
}

double gaussian_spread(double dx0, double t, double mass, double hbar) {
  if (!(dx0 > 0.0)) throw ConfigError("gaussian_spread: dx0 must be > 0");
  const double r = hbar * t / (2.0 * mass * dx0 * dx0);
  return dx0 * std::sqrt(1.0 + r * r);
}

double gaussian_spread_momentum_form(double dx0, double dp, double t, double mass, double hbar) {
  if (!(dx0 > 0.0)) throw ConfigError("gaussian_spread: dx0 must be > 0");
  const double r = 2.0 * dp * dp * t / (mass * hbar);
  return dx0 * std::sqrt(1.0 + r * r);
}

double interference_time(double dx, double dp, double mass) {
  if (!(dx > 0.0 && dp > 0.0 && mass > 0.0)) throw ConfigError("interference_time: inputs must be > 0");
  return mass * dx / dp;
}

double interference_time_from_width(double dx, double mass, double hbar) {
  if (!(dx > 0.0 && hbar > 0.0 && mass > 0.0))
    throw ConfigError("interference_time: inputs must be > 0");
  return mass * dx * dx / hbar;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw ConfigError("pearson: need two equal-length samples");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) { ma += a[i]; mb += b[i]; }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

ShapeCheck asymptotic_shape_check(const SynthesisParams& params, const SimGrid& grid,
                                  double t_large) {
  if (!(t_large > 0.0)) throw ConfigError("asymptotic_shape_check: t_large must be > 0");
  const MomentumSpectrum spectrum0 = momentum_distribution(params, grid);
  const WaveField late = propagate(spectrum0, t_large, params.units());

  ShapeCheck out;
  out.interference_time =
      interference_time_from_width(initial_position_std(params), params.mass, params.hbar);
  out.asymptotic = t_large >= 10.0 * out.interference_time;
  if (!out.asymptotic) {
    std::ostringstream msg;
    msg << "t = " << t_large << " is below 10 t_I = " << 10.0 * out.interference_time
        << "; not in the asymptotic regime";
    out.warning = msg.str();
  }

  std::vector<double> observed, expected;
  const double scale = params.mass / (params.hbar * t_large);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double k = scale * grid.x(i);
    if (std::abs(k - params.kappa0) > 4.0 * params.delta_kappa) continue;
    observed.push_back(std::norm(late.amplitudes[i]));
    const double phi = spectrum_value(params, k);
    expected.push_back(phi * phi * scale);
  }
  out.correlation = pearson(observed, expected);
  return out;
}

LobeFit central_lobe_slope(const WaveField& field, const SynthesisParams& params) {
  const LocalMomentumField lm = local_momentum(field);
  const auto rho = density(field);
  const std::size_t n = rho.size();
  const std::size_t centre = field.grid.index_of(params.group_velocity() * field.time);
  if (!lm.valid[centre]) throw NoExtremumError("central_lobe_slope: packet centre is masked");

  auto is_min = [&](std::size_t i) { return rho[i - 1] > rho[i] && rho[i + 1] > rho[i]; };
  std::size_t left = centre;
  while (left > 1 && lm.valid[left - 1] && !is_min(left)) --left;
  std::size_t right = centre;
  while (right + 2 < n && lm.valid[right + 1] && !is_min(right)) ++right;

  const std::size_t quarter = (right - left) / 4;
  const std::size_t lo = left + quarter;
  const std::size_t hi = right - quarter;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, count = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    if (!lm.valid[i]) continue;
    const double x = field.grid.x(i);
    sx += x;
    sy += lm.values[i];
    sxx += x * x;
    sxy += x * lm.values[i];
    count += 1.0;
  }
  if (count < 3.0) throw NoExtremumError("central_lobe_slope: central lobe too narrow to fit");
  const double denom = count * sxx - sx * sx;
  return {(count * sxy - sx * sy) / denom, field.grid.x(left), field.grid.x(right)};
}

CriticalAlpha critical_alpha(const SynthesisParams& params, const SimGrid& grid, double t_probe,
                             double alpha_lo, double alpha_hi, double tolerance) {
  if (!(t_probe > 0.0)) throw ConfigError("critical_alpha: t_probe must be > 0");
  if (!(alpha_hi > alpha_lo)) throw ConfigError("critical_alpha: empty alpha bracket");
  auto slope_at = [&](double alpha) {
    SynthesisParams p = params;
    p.alpha = alpha;
    return central_lobe_slope(propagate(momentum_distribution(p, grid), t_probe, p.units()), p).slope;
  };
  CriticalAlpha out;
  double lo = alpha_lo, hi = alpha_hi;
  double s_lo = slope_at(lo), s_hi = slope_at(hi);
  if (!(s_lo * s_hi < 0.0)) {
    std::ostringstream msg;
    msg << "critical_alpha: slope does not change sign on [" << lo << ", " << hi << "] (" << s_lo
        << ", " << s_hi << ")";
    throw BracketError(msg.str());
  }
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    const double s_mid = slope_at(mid);
    ++out.iterations;
    if ((s_mid > 0.0) == (s_lo > 0.0)) {
      lo = mid;
      s_lo = s_mid;
    } else {
      hi = mid;
      s_hi = s_mid;
    }
  }
  out.alpha_c = 0.5 * (lo + hi);
  out.slope_below = s_lo;
  out.slope_above = s_hi;
  return out;
}

} // namespace superband
