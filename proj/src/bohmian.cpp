#include "superband/bohmian.hpp"

#include "superband/error.hpp"
#include "superband/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

namespace superband {
namespace {

constexpr std::uint64_t kUniformStream = 11;
constexpr std::uint64_t kBornStream = 12;
constexpr std::size_t kMaxTagTimes = 50;

double drift_velocity(const AnalyticField& field, const SynthesisParams& params, double x) {
  return params.hbar / params.mass * field.local_wavenumber(x);
}

constexpr double kScreenTolerance = 1e-9;
constexpr double kLocalTolerance = 1e-11;

struct StepResult {
  double x;
  double screen;  // |RK4 - trapezoid of the end slopes|
};

StepResult rk4_step(const SynthesisParams& params, const AnalyticField& start, const AnalyticField& mid,
                    const AnalyticField& end, double x, double h) {
  const double k1 = drift_velocity(start, params, x);
  const double k2 = drift_velocity(mid, params, x + 0.5 * h * k1);
  const double k3 = drift_velocity(mid, params, x + 0.5 * h * k2);
  const double k4 = drift_velocity(end, params, x + h * k3);
  const double next = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return {next, std::abs(next - (x + 0.5 * h * (k1 + k4)))};
}

double rk4_fresh(const SynthesisParams& params, double x, double t, double h) {
  return rk4_step(params, AnalyticField(params, t), AnalyticField(params, t + 0.5 * h),
                  AnalyticField(params, t + h), x, h)
      .x;
}

// Advances x over [t, t + h] by step doubling until a full step and two half
// steps agree. Node underflow also forces halving. Returns false when the
// step would drop below min_dt.
bool advance_adaptive(const SynthesisParams& params, double& x, double t, double h, double min_dt) {
  const double half = 0.5 * h;
  try {
    const double full = rk4_fresh(params, x, t, h);
    const double two = rk4_fresh(params, rk4_fresh(params, x, t, half), t + half, half);
    if (std::abs(full - two) <= kLocalTolerance || half < min_dt) {
      x = two;
      return true;
    }
  } catch (const NodeUnderflowError&) {
    if (half < min_dt) return false;
  }
  double y = x;
  if (!advance_adaptive(params, y, t, half, min_dt)) return false;
  if (!advance_adaptive(params, y, t + half, half, min_dt)) return false;
  x = y;
  return true;
}

struct Schedule {
  std::size_t steps;
  double h;
  std::size_t stride;
};

Schedule make_schedule(double t_end, const IntegrationOptions& options) {
  if (!(options.dt > 0.0 && options.dt <= 1e-2))
    throw ConfigError("bohm: dt must lie in (0, 1e-2]");
  if (!(t_end >= 0.0 && t_end <= 50.0)) throw ConfigError("bohm: t_end must lie in [0, 50]");
  if (!(options.output_interval > 0.0)) throw ConfigError("bohm: output_interval must be > 0");
  if (!(options.min_dt > 0.0)) throw ConfigError("bohm: min_dt must be > 0");
  if (t_end == 0.0) return {0, options.dt, 1};
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / options.dt - 1e-9));
  const double h = t_end / static_cast<double>(steps);
  const auto stride =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(options.output_interval / h)));
  return {steps, h, stride};
}

} // namespace

double velocity(const SynthesisParams& params, double x, double t) {
  return drift_velocity(AnalyticField(params, t), params, x);
}

VelocityProbe probe_velocity(const SynthesisParams& params, double x, double t) {
  return {x, t, velocity(params, x, t)};
}

std::vector<double> sample_initial_positions(const SynthesisParams& params, const SimGrid& grid,
                                             std::size_t n, const SamplingOptions& options) {
  if (n == 0) throw ConfigError("bohm: need at least one trajectory");
  std::vector<double> xs(n);
  if (options.mode == InitialMode::uniform_interval) {
    const auto [a, b] = options.interval;
    if (!(b > a)) throw ConfigError("bohm: trajectory interval must be nonempty");
    for (std::size_t i = 0; i < n; ++i)
      xs[i] = a + (b - a) * keyed_uniform(options.seed, kUniformStream, i);
    return xs;
  }
  const auto rho = density(initial_wavefunction(params, grid));
  std::vector<double> cdf(rho.size(), 0.0);
  for (std::size_t i = 1; i < rho.size(); ++i)
    cdf[i] = cdf[i - 1] + 0.5 * (rho[i - 1] + rho[i]) * grid.dx();
  const double total = cdf.back();
  for (std::size_t s = 0; s < n; ++s) {
    const double u = keyed_uniform(options.seed, kBornStream, s) * total;
    const auto it = std::lower_bound(cdf.begin() + 1, cdf.end(), u);
    const auto i = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
    const double span = cdf[i] - cdf[i - 1];
    const double frac = span > 0.0 ? (u - cdf[i - 1]) / span : 0.5;
    xs[s] = grid.x(i - 1) + frac * grid.dx();
  }
  return xs;
}

TrajectorySet integrate_trajectories(const SynthesisParams& params, const std::vector<double>& x0s,
                                     double t_end, const IntegrationOptions& options) {
  params.validate();
  const Schedule plan = make_schedule(t_end, options);
  TrajectorySet set;
  set.params = params;
  set.special_flags.assign(x0s.size(), SpecialFlag::none);
  for (std::size_t s = 0; s <= plan.steps; ++s)
    if (s % plan.stride == 0 || s == plan.steps) set.times.push_back(static_cast<double>(s) * plan.h);
  if (plan.steps == 0) set.times = {0.0};
  set.positions.assign(x0s.size(), std::vector<double>(set.times.size(), 0.0));
  std::vector<std::uint8_t> failed(x0s.size(), 0);

  auto run_range = [&](std::size_t lo, std::size_t hi) {
    std::vector<double> x(x0s.begin() + lo, x0s.begin() + hi);
    std::size_t slot = 0;
    for (std::size_t i = lo; i < hi; ++i) set.positions[i][0] = x[i - lo];
    for (std::size_t s = 0; s < plan.steps; ++s) {
      const double t = static_cast<double>(s) * plan.h;
      const AnalyticField start(params, t), mid(params, t + 0.5 * plan.h), end(params, t + plan.h);
      for (std::size_t i = lo; i < hi; ++i) {
        if (failed[i]) continue;
        double& xi = x[i - lo];
        try {
          const StepResult r = rk4_step(params, start, mid, end, xi, plan.h);
          if (r.screen <= kScreenTolerance) {
            xi = r.x;
            continue;
          }
        } catch (const NodeUnderflowError&) {
        }
        if (!advance_adaptive(params, xi, t, plan.h, options.min_dt)) failed[i] = 1;
      }
      const std::size_t done = s + 1;
      if (done % plan.stride == 0 || done == plan.steps) {
        ++slot;
        for (std::size_t i = lo; i < hi; ++i) set.positions[i][slot] = x[i - lo];
      }
    }
  };

  const std::size_t n = x0s.size();
  const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(n)));
  if (workers <= 1 || n < 2) {
    run_range(0, n);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < n; ++i)
    if (failed[i]) set.failed.push_back(i);
  return set;
}

bool preserves_ordering(const TrajectorySet& set) {
  std::vector<std::size_t> order(set.count());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return set.positions[a][0] < set.positions[b][0]; });
  for (std::size_t k = 0; k < set.times.size(); ++k)
    for (std::size_t r = 1; r < order.size(); ++r)
      if (!(set.positions[order[r - 1]][k] < set.positions[order[r]][k])) return false;
  return true;
}

void tag_special_trajectories(TrajectorySet& set, const SimGrid& grid, double floor) {
  set.special_flags.assign(set.count(), SpecialFlag::none);
  if (set.count() == 0) return;
  std::vector<std::size_t> slots;
  for (std::size_t k = 0; k < set.times.size(); ++k)
    if (set.times[k] > 0.0) slots.push_back(k);
  const std::size_t stride = std::max<std::size_t>(1, (slots.size() + kMaxTagTimes - 1) / kMaxTagTimes);
  const MomentumSpectrum spectrum0 = momentum_distribution(set.params, grid);
  std::map<std::size_t, int> super_votes, sub_votes;

  auto nearest = [&](std::size_t slot, double x) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < set.count(); ++i)
      if (std::abs(set.positions[i][slot] - x) < std::abs(set.positions[best][slot] - x)) best = i;
    return best;
  };

  for (std::size_t r = 0; r < slots.size(); r += stride) {
    const std::size_t slot = slots[r];
    try {
      const auto extrema = find_special_momenta(
          propagate(spectrum0, set.times[slot], set.params.units()), set.params, floor);
      ++super_votes[nearest(slot, extrema.super.x_at)];
      ++sub_votes[nearest(slot, extrema.sub.x_at)];
    } catch (const NoExtremumError&) {
    }
  }
  auto winner = [](const std::map<std::size_t, int>& votes) {
    std::size_t best = 0;
    int count = 0;
    for (const auto& [index, n] : votes)
      if (n > count) { best = index; count = n; }
    return std::make_pair(best, count);
  };
  const auto [sup, sup_n] = winner(super_votes);
  const auto [sub, sub_n] = winner(sub_votes);
  if (sup_n > 0) set.special_flags[sup] = SpecialFlag::super;
  if (sub_n > 0 && (sub != sup || sup_n == 0)) set.special_flags[sub] = SpecialFlag::sub;
}

long flagged_index(const TrajectorySet& set, SpecialFlag flag) {
  for (std::size_t i = 0; i < set.special_flags.size(); ++i)
    if (set.special_flags[i] == flag) return static_cast<long>(i);
  return -1;
}

VelocityHistogram asymptotic_velocities(const TrajectorySet& set, std::size_t bins) {
  if (bins < 2) throw ConfigError("bohm: histogram needs at least 2 bins");
  if (set.count() == 0 || set.times.size() < 2)
    throw ConfigError("bohm: histogram needs trajectories with at least two output times");
  const SynthesisParams& p = set.params;
  const std::size_t last = set.times.size() - 1;
  const double t_end = set.times[last];
  std::size_t early = 0;
  for (std::size_t k = 0; k < last; ++k)
    if (std::abs(set.times[k] - 0.9 * t_end) < std::abs(set.times[early] - 0.9 * t_end)) early = k;
  if (early == last) early = last - 1;
  const double t_early = set.times[early];

  VelocityHistogram h;
  const double v0 = p.group_velocity();
  const double dv = p.hbar * p.delta_kappa / p.mass;
  const double lo = v0 - 4.0 * dv, hi = v0 + 4.0 * dv;
  const double width = (hi - lo) / static_cast<double>(bins);
  h.bin_edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) h.bin_edges[b] = lo + width * static_cast<double>(b);
  h.density.assign(bins, 0.0);

  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < set.count(); ++i) {
    if (std::find(set.failed.begin(), set.failed.end(), i) != set.failed.end()) continue;
    const double v = (set.positions[i][last] - set.positions[i][early]) / (t_end - t_early);
    sum += v;
    ++used;
    if (v >= lo && v < hi) h.density[static_cast<std::size_t>((v - lo) / width)] += 1.0;
    try {
      const double drift = std::abs(velocity(p, set.positions[i][last], t_end) -
                                    velocity(p, set.positions[i][early], t_early));
      h.max_drift = std::max(h.max_drift, drift);
    } catch (const NodeUnderflowError&) {
    }
  }
  if (used == 0) throw NumericalHealthError("bohm: every trajectory failed");
  h.mean = sum / static_cast<double>(used);
  for (auto& d : h.density) d /= static_cast<double>(used) * width;
  h.reference.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const double vc = lo + width * (static_cast<double>(b) + 0.5);
    const double phi = spectrum_value(p, p.mass * vc / p.hbar);
    h.reference[b] = phi * phi * p.mass / p.hbar;
  }
  h.correlation = pearson(h.density, h.reference);
  const double t_i = interference_time_from_width(initial_position_std(p), p.mass, p.hbar);
  h.asymptotic = t_end >= 10.0 * t_i;
  if (!h.asymptotic) {
    std::ostringstream msg;
    msg << "t_end = " << t_end << " is below 10 t_I = " << 10.0 * t_i;
    h.warning = msg.str();
  }
  return h;
}

} // namespace superband
