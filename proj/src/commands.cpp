#include "superband/commands.hpp"

#include "superband/analysis.hpp"
#include "superband/bohmian.hpp"
#include "superband/classical.hpp"
#include "superband/error.hpp"
#include "superband/output.hpp"
#include "superband/reference_values.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace superband {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kNormDriftTolerance = 1e-10;
constexpr double kBoundaryTolerance = 1e-12;
constexpr double kRouteTolerance = 1e-8;
constexpr double kWindowFloor = 1e-12;

bool wants_csv(const SimConfig& c) { return c.output.format != OutputFormat::json; }
bool wants_json(const SimConfig& c) { return c.output.format != OutputFormat::csv; }

fs::path output_dir(const SimConfig& c) {
  const fs::path dir(c.output.directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("output: cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

// A double that survives JSON: NaN and infinities become null.
json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

void write_json(const fs::path& path, json doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("output: cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

class Report {
public:
  Report(const SimConfig& config, const std::string& command)
      : config_(config), start_(std::chrono::steady_clock::now()) {
    doc_["command"] = command;
    doc_["software_version"] = kSoftwareVersion;
    doc_["config_hash"] = config_hash(config);
    doc_["config"] = canonical_text(config);
    doc_["seed"] = config.run.seed;
  }

  json& operator[](const std::string& key) { return doc_[key]; }

  void write(const fs::path& dir, const std::string& name) {
    if (!wants_json(config_)) return;
    if (config_.output.timing) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
      doc_["timing_seconds"] = elapsed.count();
    }
    write_json(dir / name, doc_);
  }

private:
  const SimConfig& config_;
  std::chrono::steady_clock::time_point start_;
  json doc_;
};

std::string alpha_tag(double alpha) { return "alpha" + filename_number(alpha); }

json record_json(const ExtremumRecord& r) {
  return {{"kappa_over_kappa0", number(r.kappa_over_kappa0)},
          {"x", number(r.x_at)},
          {"t", number(r.t)},
          {"density", number(r.density_at)},
          {"spectrum_weight_log10", number(r.log10_spectrum_weight)},
          {"weight_ratio_log10", number(log10_weight_ratio(r))}};
}

json flux_json(const FluxReport& f) {
  return {{"x_plane", number(f.x_plane)},
          {"t_initial", number(f.t_initial)},
          {"t_final", number(f.t_final)},
          {"flux_by_current", number(f.flux_by_current)},
          {"flux_by_probability", number(f.flux_by_probability)},
          {"samples", f.samples}};
}

std::string digest(const std::vector<std::vector<double>>& rows) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& row : rows)
    for (double v : row)
      for (unsigned char ch : format_number(v)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
      }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Evolves to t and applies the norm and boundary health checks.
WaveField healthy_field(const MomentumSpectrum& spectrum0, double t, const SynthesisParams& p) {
  WaveField field = propagate(spectrum0, t, p.units());
  const double drift = std::abs(norm_squared(field) - 1.0);
  std::ostringstream msg;
  if (drift > kNormDriftTolerance) {
    msg << "norm drift " << drift << " at t = " << t;
    throw NumericalHealthError(msg.str());
  }
  const double edge = boundary_mass(field);
  if (edge > kBoundaryTolerance) {
    msg << "probability " << edge << " reached the outer 5% of the grid at t = " << t;
    throw NumericalHealthError(msg.str());
  }
  return field;
}

struct Cell {
  std::string name;
  double value;
  double reference;
  double tolerance;
  bool relative;
};

json check_cell(const Cell& c, double scale, bool& all_pass) {
  const double error = std::abs(c.value - c.reference);
  const double allowed = c.tolerance * scale * (c.relative ? std::abs(c.reference) : 1.0);
  const bool pass = std::isfinite(c.value) && error <= allowed;
  all_pass = all_pass && pass;
  return {{"value", number(c.value)},
          {"reference", c.reference},
          {"tolerance", c.tolerance * scale},
          {"relative", c.relative},
          {"error", number(error)},
          {"pass", pass}};
}

} // namespace

int cmd_evolve(const SimConfig& config) {
  const fs::path dir = output_dir(config);
  const std::string hash = config_hash(config);
  Report report(config, "evolve");
  json runs = json::array();
  for (double alpha : config.alphas) {
    const SynthesisParams p = config.state_for(alpha);
    const SimGrid grid = make_grid(config.grid, p.kappa0, p.delta_kappa);
    const MomentumSpectrum spectrum0 = momentum_distribution(p, grid);
    for (double t : config.run.times) {
      const WaveField field = healthy_field(spectrum0, t, p);
      const auto rho = density(field);
      const LocalMomentumField lm = local_momentum(field, config.run.floor);

      std::size_t lo = 0, hi = grid.size() - 1;
      if (config.run.x_window) {
        lo = grid.index_of(config.run.x_window->first);
        hi = grid.index_of(config.run.x_window->second);
      } else {
        double peak = 0.0;
        for (double r : rho) peak = std::max(peak, r);
        while (lo < hi && rho[lo] < kWindowFloor * peak) ++lo;
        while (hi > lo && rho[hi] < kWindowFloor * peak) --hi;
      }

      std::vector<double> xs;
      for (std::size_t i = lo; i <= hi; i += config.run.stride) xs.push_back(grid.x(i));
      const auto exact = analytic_superband_field(p, xs, t);
      double route = 0.0;
      for (std::size_t k = 0; k < xs.size(); ++k)
        route = std::max(route, std::abs(exact[k] - field.amplitudes[lo + k * config.run.stride]));
      if (route > kRouteTolerance) {
        std::ostringstream msg;
        msg << "spectral and closed-form fields differ by " << route << " at t = " << t;
        throw NumericalHealthError(msg.str());
      }

      if (wants_csv(config)) {
        CsvWriter csv(dir / ("evolve_" + alpha_tag(alpha) + "_t" + filename_number(t) + ".csv"), hash,
                      {"x", "re_psi", "im_psi", "density", "local_momentum_over_k0", "valid_mask"});
        csv.comment("alpha=" + format_number(alpha) + " t=" + format_number(t));
        for (std::size_t i = lo; i <= hi; i += config.run.stride) {
          const Complex psi = field.amplitudes[i];
          csv.row({format_number(grid.x(i)), format_number(psi.real()), format_number(psi.imag()),
                   format_number(rho[i]), format_number(lm.values[i] / p.kappa0),
                   lm.valid[i] ? "1" : "0"});
        }
      }

      const Moments moments = position_moments(field);
      json entry = {{"alpha", alpha},
                    {"t", t},
                    {"norm", number(norm_squared(field))},
                    {"boundary_mass", number(boundary_mass(field))},
                    {"route_difference", number(route)},
                    {"position_mean", number(moments.mean)},
                    {"position_std", number(moments.std_dev)}};
      try {
        const SpecialMomenta sm = find_special_momenta(field, p, config.run.floor);
        entry["super"] = record_json(sm.super);
        entry["sub"] = record_json(sm.sub);
      } catch (const NoExtremumError&) {
        entry["super"] = nullptr;
        entry["sub"] = nullptr;
      }
      runs.push_back(entry);
    }
  }
  report["runs"] = runs;
  if (!config.run.times.empty()) report.write(dir, "report_evolve.json");
  return kExitOk;
}

int cmd_table1(const SimConfig& config) {
  const fs::path dir = output_dir(config);
  const std::string hash = config_hash(config);
  const double scale = config.run.tolerance_scale;
  namespace ref = reference;
  Report report(config, "table1");
  json rows = json::array();
  bool all_pass = true;

  std::unique_ptr<CsvWriter> csv;
  if (wants_csv(config))
    csv = std::make_unique<CsvWriter>(
        dir / "table1.csv", hash,
        std::vector<std::string>{"alpha", "t", "kappa_max_over_k0", "kappa_min_over_k0", "x_max", "x_min",
                                 "density_at", "spectrum_weight_log10", "weight_ratio", "density_at_min",
                                 "spectrum_weight_log10_min", "weight_ratio_min"});

  for (const auto& row : ref::kExtremumTable) {
    const SynthesisParams p = config.state_for(row.alpha);
    const SimGrid grid = make_grid(config.grid, p.kappa0, p.delta_kappa);
    const WaveField field = healthy_field(momentum_distribution(p, grid), row.t, p);
    const SpecialMomenta sm = find_special_momenta(field, p, config.run.floor);
    const ExtremumRecord& hi = sm.super;
    const ExtremumRecord& lo = sm.sub;
    if (csv)
      csv->row({row.alpha, row.t, hi.kappa_over_kappa0, lo.kappa_over_kappa0, hi.x_at, lo.x_at, hi.density_at,
                hi.log10_spectrum_weight, weight_ratio(hi), lo.density_at, lo.log10_spectrum_weight,
                weight_ratio(lo)});

    const std::vector<Cell> cells{
        {"kappa_max_over_k0", hi.kappa_over_kappa0, row.kappa_max, ref::kKappaTolerance, false},
        {"kappa_min_over_k0", lo.kappa_over_kappa0, row.kappa_min(), ref::kKappaTolerance, false},
        {"x_max", hi.x_at, row.x_max, ref::kPositionTolerance, false},
        {"x_min", lo.x_at, row.x_min, ref::kPositionTolerance, false},
        {"density_at", hi.density_at, row.density, ref::kDensityRelativeTolerance, true},
        {"spectrum_weight_log10", hi.log10_spectrum_weight, std::log10(row.spectrum_weight),
         ref::kLog10WeightTolerance, false},
    };
    json diff = {{"alpha", row.alpha}, {"t", row.t}};
    for (const Cell& c : cells) diff["cells"][c.name] = check_cell(c, scale, all_pass);
    if (row.alpha == 1.0 && row.t == 1.0) {
      const Cell c{"weight_ratio_log10", log10_weight_ratio(hi), std::log10(ref::kWeightRatioT1),
                   ref::kWeightRatioT1Decades, false};
      diff["cells"][c.name] = check_cell(c, scale, all_pass);
    }
    if (row.alpha == 1.0 && row.t == 4.0) {
      const Cell c{"weight_ratio", weight_ratio(hi), ref::kWeightRatioT4, ref::kWeightRatioT4Relative, true};
      diff["cells"][c.name] = check_cell(c, scale, all_pass);
    }
    rows.push_back(diff);
  }
  csv.reset();

  json doc = {{"config_hash", hash}, {"tolerance_scale", scale}, {"rows", rows}, {"pass", all_pass}};
  if (wants_json(config)) write_json(dir / "table1_diff.json", doc);
  report["table1_pass"] = all_pass;
  report.write(dir, "report_table1.json");
  return all_pass ? kExitOk : kExitAcceptance;
}

int cmd_flux(const SimConfig& config) {
  const fs::path dir = output_dir(config);
  const std::string hash = config_hash(config);
  const RunBlock& r = config.run;
  Report report(config, "flux");
  json entries = json::array();
  std::unique_ptr<CsvWriter> csv;
  if (wants_csv(config))
    csv = std::make_unique<CsvWriter>(
        dir / "flux.csv", hash,
        std::vector<std::string>{"alpha", "plane", "x_plane", "t_initial", "t_final", "flux_by_current",
                                 "flux_by_probability", "samples"});

  for (double alpha : config.alphas) {
    const SynthesisParams p = config.state_for(alpha);
    const SimGrid grid = make_grid(config.grid, p.kappa0, p.delta_kappa);
    const MomentumSpectrum spectrum0 = momentum_distribution(p, grid);
    double x_left = 0.0, x_right = 0.0;
    if (r.flux_left) {
      x_left = *r.flux_left;
      x_right = *r.flux_right;
    } else {
      const SpecialMomenta sm =
          find_special_momenta(healthy_field(spectrum0, r.flux_plane_time, p), p, r.floor);
      x_left = std::min(sm.super.x_at, sm.sub.x_at);
      x_right = std::max(sm.super.x_at, sm.sub.x_at);
    }
    healthy_field(spectrum0, r.flux_t_initial, p);
    healthy_field(spectrum0, r.flux_t_final, p);
    const FluxDifference d =
        flux_difference(spectrum0, x_left, x_right, r.flux_t_initial, r.flux_t_final, r.n_quad, p.units());
    if (csv) {
      for (const auto& [name, f] : {std::pair{"left", &d.left}, std::pair{"right", &d.right}})
        csv->row({format_number(alpha), name, format_number(f->x_plane), format_number(f->t_initial),
                  format_number(f->t_final), format_number(f->flux_by_current),
                  format_number(f->flux_by_probability), std::to_string(f->samples)});
    }
    const char* verdict = d.verdict() > 0 ? "localizing" : (d.verdict() < 0 ? "delocalizing" : "neutral");
    json entry = {{"alpha", alpha},
                  {"left", flux_json(d.left)},
                  {"right", flux_json(d.right)},
                  {"delta", number(d.delta)},
                  {"probability_initial", number(d.probability_initial)},
                  {"probability_final", number(d.probability_final)},
                  {"verdict", verdict}};
    for (const auto& row : reference::kFluxTable) {
      if (row.alpha != alpha) continue;
      auto soft = [](double value, double expected) {
        const double rel = std::abs(value - expected) / expected;
        return json{{"value", number(value)},
                    {"reference", expected},
                    {"relative_error", number(rel)},
                    {"within_tolerance", rel <= reference::kFluxRelativeTolerance}};
      };
      entry["reference_comparison"] = {{"left", soft(d.left.flux_by_current, row.flux_left)},
                                       {"right", soft(d.right.flux_by_current, row.flux_right)}};
    }
    entries.push_back(entry);
  }
  csv.reset();
  if (wants_json(config)) write_json(dir / "flux.json", {{"config_hash", hash}, {"scenarios", entries}});
  report["flux"] = entries;
  report.write(dir, "report_flux.json");
  return kExitOk;
}

int cmd_bohm(const SimConfig& config) {
  const fs::path dir = output_dir(config);
  const std::string hash = config_hash(config);
  const RunBlock& r = config.run;
  Report report(config, "bohm");
  json summaries = json::array();
  for (double alpha : config.alphas) {
    const SynthesisParams p = config.state_for(alpha);
    const SimGrid grid = make_grid(config.grid, p.kappa0, p.delta_kappa);

    SamplingOptions sampling{InitialMode::uniform_interval, r.trajectory_interval, r.seed};
    const auto x0 = sample_initial_positions(p, grid, r.n_trajectories, sampling);
    IntegrationOptions integration{r.dt, r.output_interval, 1e-6, r.threads};
    TrajectorySet set = integrate_trajectories(p, x0, r.t_end, integration);
    set.seed = r.seed;
    if (!preserves_ordering(set)) throw NumericalHealthError("bohm: trajectories crossed");
    tag_special_trajectories(set, grid, r.floor);

    if (wants_csv(config)) {
      CsvWriter csv(dir / ("bohm_" + alpha_tag(alpha) + ".csv"), hash, {"trajectory_id", "t", "x", "special_flag"});
      csv.comment("alpha=" + format_number(alpha) + " special_flag: 0 none, 1 super, 2 sub");
      for (std::size_t i = 0; i < set.count(); ++i)
        for (std::size_t k = 0; k < set.times.size(); ++k)
          csv.row({std::to_string(i), format_number(set.times[k]), format_number(set.positions[i][k]),
                   std::to_string(static_cast<int>(set.special_flags[i]))});
    }

    SamplingOptions born{InitialMode::born_sampled, r.trajectory_interval, r.seed};
    const auto xa = sample_initial_positions(p, grid, r.n_asymptotic, born);
    IntegrationOptions late{r.asymptotic_dt, 0.1 * r.t_asymptotic, 1e-6, r.threads};
    TrajectorySet asym = integrate_trajectories(p, xa, r.t_asymptotic, late);
    asym.initial_mode = InitialMode::born_sampled;
    asym.seed = r.seed;
    if (!preserves_ordering(asym)) throw NumericalHealthError("bohm: trajectories crossed");
    const VelocityHistogram h = asymptotic_velocities(asym, r.histogram_bins);

    json hist = {{"config_hash", hash},
                 {"alpha", alpha},
                 {"t_end", r.t_asymptotic},
                 {"trajectories", asym.count()},
                 {"bin_edges", h.bin_edges},
                 {"density", h.density},
                 {"reference", h.reference},
                 {"correlation", number(h.correlation)},
                 {"mean_velocity", number(h.mean)},
                 {"max_drift", number(h.max_drift)},
                 {"asymptotic", h.asymptotic},
                 {"warning", h.warning}};
    if (wants_json(config)) write_json(dir / ("bohm_histogram_" + alpha_tag(alpha) + ".json"), hist);

    summaries.push_back({{"alpha", alpha},
                         {"trajectories", set.count()},
                         {"failed", set.failed.size() + asym.failed.size()},
                         {"super_index", flagged_index(set, SpecialFlag::super)},
                         {"sub_index", flagged_index(set, SpecialFlag::sub)},
                         {"trajectory_digest", digest(set.positions)},
                         {"asymptotic_digest", digest(asym.positions)},
                         {"histogram_correlation", number(h.correlation)}});
  }
  report["trajectory_summaries"] = summaries;
  report.write(dir, "report_bohm.json");
  return kExitOk;
}

int cmd_classical(const SimConfig& config) {
  const fs::path dir = output_dir(config);
  const std::string hash = config_hash(config);
  const RunBlock& r = config.run;
  Report report(config, "classical");
  std::vector<double> times;
  for (double t = 0.0; t <= r.classical_t_max + 1e-12; t += 0.5) times.push_back(t);

  const ClassicalEnsemble fig6 = fig6_preset();
  std::vector<ClassicalEnsemble> ensembles;
  for (std::size_t e = 0; e < r.classical_ensembles; ++e)
    ensembles.push_back(init_ensemble(r.classical_n, {0.0, 1.0}, {1.0, 2.3}, 1.0, r.seed + e,
                                      e % 2 ? ConstraintMode::extremal_swapped : ConstraintMode::none));

  if (wants_csv(config)) {
    CsvWriter a(dir / "classical_fig6.csv", hash, {"particle_id", "velocity", "t", "x"});
    for (double t : times) {
      const auto x = evolve_ensemble(fig6, t);
      for (std::size_t i = 0; i < fig6.size(); ++i)
        a.row({std::to_string(i), format_number(fig6.p[i] / fig6.mass), format_number(t), format_number(x[i])});
    }
    CsvWriter b(dir / "classical_random.csv", hash, {"ensemble_id", "particle_id", "momentum", "t", "x"});
    for (std::size_t e = 0; e < ensembles.size(); ++e)
      for (double t : times) {
        const auto x = evolve_ensemble(ensembles[e], t);
        for (std::size_t i = 0; i < ensembles[e].size(); ++i)
          b.row({std::to_string(e), std::to_string(i), format_number(ensembles[e].p[i]), format_number(t),
                 format_number(x[i])});
      }
  }

  auto summary = [&](const ClassicalEnsemble& e, double dx, double dp) {
    json ordered = json::array();
    for (double t : times) ordered.push_back({{"t", t}, {"ordered", is_momentum_ordered(e, t)}});
    return json{{"seed", e.seed},
                {"particles", e.size()},
                {"constraint", e.constraint == ConstraintMode::extremal_swapped ? "extremal_swapped" : "none"},
                {"ordering_time", number(ordering_time(e))},
                {"interference_time", number(interference_time(dx, dp, e.mass))},
                {"interference_time_from_width", number(interference_time_from_width(dx, e.mass, 1.0))},
                {"ordered", ordered}};
  };
  json random = json::array();
  for (const auto& e : ensembles) random.push_back(summary(e, 1.0, 1.3));
  json doc = {{"config_hash", hash}, {"fig6", summary(fig6, 1.0, 1.3)}, {"random", random}};
  if (wants_json(config)) write_json(dir / "classical.json", doc);
  report["classical"] = doc;
  report.write(dir, "report_classical.json");
  return kExitOk;
}

int cmd_sweep_alpha(const SimConfig& config) {
  const fs::path dir = output_dir(config);
  const std::string hash = config_hash(config);
  const RunBlock& r = config.run;
  Report report(config, "sweep-alpha");
  const SimGrid grid = make_grid(config.grid, config.state.kappa0, config.state.delta_kappa);
  json table = json::array();
  std::unique_ptr<CsvWriter> csv;
  if (wants_csv(config))
    csv = std::make_unique<CsvWriter>(dir / "sweep_alpha.csv", hash,
                                      std::vector<std::string>{"alpha", "slope", "x_left", "x_right"});
  for (std::size_t s = 0; s < r.sweep_steps; ++s) {
    const double alpha = r.sweep_alpha_min + (r.sweep_alpha_max - r.sweep_alpha_min) * static_cast<double>(s) /
                                                 static_cast<double>(r.sweep_steps - 1);
    const SynthesisParams p = config.state_for(alpha);
    const WaveField field = healthy_field(momentum_distribution(p, grid), r.probe_time, p);
    const LobeFit fit = central_lobe_slope(field, p);
    if (csv) csv->row({alpha, fit.slope, fit.x_left, fit.x_right});
    table.push_back({{"alpha", alpha}, {"slope", number(fit.slope)}, {"x_left", fit.x_left}, {"x_right", fit.x_right}});
  }
  csv.reset();
  json critical;
  try {
    const CriticalAlpha c =
        critical_alpha(config.state, grid, r.probe_time, r.sweep_alpha_min, r.sweep_alpha_max);
    critical = {{"alpha_c", c.alpha_c},
                {"slope_below", c.slope_below},
                {"slope_above", c.slope_above},
                {"iterations", c.iterations}};
  } catch (const BracketError& e) {
    critical = {{"alpha_c", nullptr}, {"error", e.what()}};
  }
  json doc = {{"config_hash", hash}, {"probe_time", r.probe_time}, {"sweep", table}, {"critical", critical}};
  if (wants_json(config)) write_json(dir / "sweep_alpha.json", doc);
  report["sweep"] = doc;
  report.write(dir, "report_sweep_alpha.json");
  return kExitOk;
}

int run_command(const std::string& name, const SimConfig& config) {
  validate(config);
  if (name == "evolve") return cmd_evolve(config);
  if (name == "table1") return cmd_table1(config);
  if (name == "flux") return cmd_flux(config);
  if (name == "bohm") return cmd_bohm(config);
  if (name == "classical") return cmd_classical(config);
  if (name == "sweep-alpha") return cmd_sweep_alpha(config);
  throw ConfigError("unknown command " + name);
}

} // namespace superband
