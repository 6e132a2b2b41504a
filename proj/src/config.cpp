#include "superband/config.hpp"

#include "superband/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace superband {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects a number, got '" + t + "'");
  }
  if (used != t.size() || !std::isfinite(v))
    throw ConfigError("config: " + key + " expects a finite number, got '" + t + "'");
  return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError("config: " + key + " expects a non-negative integer, got '" + t + "'");
  try {
    return std::stoull(t);
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " is out of range");
  }
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError("config: " + key + " expects true or false, got '" + t + "'");
}

std::pair<double, double> parse_pair(const std::string& key, const std::string& text) {
  const auto values = parse_number_list(text);
  if (values.size() != 2) throw ConfigError("config: " + key + " expects two numbers 'a, b'");
  return {values[0], values[1]};
}

OutputFormat parse_format(const std::string& text) {
  const std::string t = trim(text);
  if (t == "csv") return OutputFormat::csv;
  if (t == "json") return OutputFormat::json;
  if (t == "both") return OutputFormat::both;
  throw ConfigError("config: output.format must be csv, json or both");
}

const char* format_name(OutputFormat f) {
  switch (f) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
    case OutputFormat::both: return "both";
  }
  return "both";
}

using Setter = std::function<void(SimConfig&, const std::string&, const std::string&)>;

std::map<std::string, Setter> make_setters() {
  std::map<std::string, Setter> s;
  auto num = [](auto member) {
    return [member](SimConfig& c, const std::string& k, const std::string& v) { member(c) = parse_double(k, v); };
  };
  auto count = [](auto member) {
    return [member](SimConfig& c, const std::string& k, const std::string& v) {
      member(c) = static_cast<std::remove_reference_t<decltype(member(c))>>(parse_unsigned(k, v));
    };
  };
  s["grid.x_min"] = num([](SimConfig& c) -> double& { return c.grid.x_min; });
  s["grid.x_max"] = num([](SimConfig& c) -> double& { return c.grid.x_max; });
  s["grid.n_points"] = count([](SimConfig& c) -> std::size_t& { return c.grid.n_points; });

  s["state.kappa0"] = num([](SimConfig& c) -> double& { return c.state.kappa0; });
  s["state.delta_kappa"] = num([](SimConfig& c) -> double& { return c.state.delta_kappa; });
  s["state.mass"] = num([](SimConfig& c) -> double& { return c.state.mass; });
  s["state.hbar"] = num([](SimConfig& c) -> double& { return c.state.hbar; });
  s["state.alpha"] = [](SimConfig& c, const std::string& k, const std::string& v) {
    c.alphas = parse_number_list(v);
    if (c.alphas.empty()) throw ConfigError("config: " + k + " needs at least one value");
  };
  s["state.chirp"] = [](SimConfig& c, const std::string& k, const std::string& v) {
    c.state.chirp = parse_double(k, v);
  };

  s["run.times"] = [](SimConfig& c, const std::string&, const std::string& v) { c.run.times = parse_number_list(v); };
  s["run.floor"] = num([](SimConfig& c) -> double& { return c.run.floor; });
  s["run.seed"] = count([](SimConfig& c) -> std::uint64_t& { return c.run.seed; });
  s["run.threads"] = count([](SimConfig& c) -> unsigned& { return c.run.threads; });
  s["run.x_window"] = [](SimConfig& c, const std::string& k, const std::string& v) { c.run.x_window = parse_pair(k, v); };
  s["run.stride"] = count([](SimConfig& c) -> std::size_t& { return c.run.stride; });
  s["run.flux_t_initial"] = num([](SimConfig& c) -> double& { return c.run.flux_t_initial; });
  s["run.flux_t_final"] = num([](SimConfig& c) -> double& { return c.run.flux_t_final; });
  s["run.flux_plane_time"] = num([](SimConfig& c) -> double& { return c.run.flux_plane_time; });
  s["run.flux_left"] = [](SimConfig& c, const std::string& k, const std::string& v) { c.run.flux_left = parse_double(k, v); };
  s["run.flux_right"] = [](SimConfig& c, const std::string& k, const std::string& v) { c.run.flux_right = parse_double(k, v); };
  s["run.n_quad"] = count([](SimConfig& c) -> int& { return c.run.n_quad; });
  s["run.dt"] = num([](SimConfig& c) -> double& { return c.run.dt; });
  s["run.n_trajectories"] = count([](SimConfig& c) -> std::size_t& { return c.run.n_trajectories; });
  s["run.trajectory_interval"] = [](SimConfig& c, const std::string& k, const std::string& v) {
    c.run.trajectory_interval = parse_pair(k, v);
  };
  s["run.t_end"] = num([](SimConfig& c) -> double& { return c.run.t_end; });
  s["run.output_interval"] = num([](SimConfig& c) -> double& { return c.run.output_interval; });
  s["run.n_asymptotic"] = count([](SimConfig& c) -> std::size_t& { return c.run.n_asymptotic; });
  s["run.t_asymptotic"] = num([](SimConfig& c) -> double& { return c.run.t_asymptotic; });
  s["run.asymptotic_dt"] = num([](SimConfig& c) -> double& { return c.run.asymptotic_dt; });
  s["run.histogram_bins"] = count([](SimConfig& c) -> std::size_t& { return c.run.histogram_bins; });
  s["run.classical_n"] = count([](SimConfig& c) -> std::size_t& { return c.run.classical_n; });
  s["run.classical_ensembles"] = count([](SimConfig& c) -> std::size_t& { return c.run.classical_ensembles; });
  s["run.classical_t_max"] = num([](SimConfig& c) -> double& { return c.run.classical_t_max; });
  s["run.sweep_alpha_min"] = num([](SimConfig& c) -> double& { return c.run.sweep_alpha_min; });
  s["run.sweep_alpha_max"] = num([](SimConfig& c) -> double& { return c.run.sweep_alpha_max; });
  s["run.sweep_steps"] = count([](SimConfig& c) -> std::size_t& { return c.run.sweep_steps; });
  s["run.probe_time"] = num([](SimConfig& c) -> double& { return c.run.probe_time; });
  s["run.tolerance_scale"] = num([](SimConfig& c) -> double& { return c.run.tolerance_scale; });

  s["output.directory"] = [](SimConfig& c, const std::string&, const std::string& v) { c.output.directory = trim(v); };
  s["output.format"] = [](SimConfig& c, const std::string&, const std::string& v) { c.output.format = parse_format(v); };
  s["output.timing"] = [](SimConfig& c, const std::string& k, const std::string& v) { c.output.timing = parse_bool(k, v); };
  return s;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError("config: " + message);
}

std::string num_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string list_text(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : "") + num_text(values[i]);
  return out;
}

} // namespace

SynthesisParams SimConfig::state_for(double alpha) const {
  SynthesisParams p = state;
  p.alpha = alpha;
  return p;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  const std::string t = trim(text);
  if (t.empty()) return out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double("list item", item));
  if (t.back() == ',') throw ConfigError("config: trailing comma in list '" + t + "'");
  return out;
}

SimConfig parse_config(const std::string& text) {
  static const auto setters = make_setters();
  SimConfig config;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find_first_of("#;");
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError("config: " + where + "unterminated section header");
      section = trim(body.substr(1, body.size() - 2));
      if (section != "grid" && section != "state" && section != "run" && section != "output")
        throw ConfigError("config: " + where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("config: " + where + "expected key = value");
    if (section.empty()) throw ConfigError("config: " + where + "key outside a section");
    const std::string key = section + "." + trim(body.substr(0, eq));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("config: " + where + "unknown key " + key);
    it->second(config, key, body.substr(eq + 1));
  }
  validate(config);
  return config;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void validate(const SimConfig& c) {
  require(!c.alphas.empty(), "state.alpha needs at least one value");
  for (double alpha : c.alphas) {
    const SynthesisParams p = c.state_for(alpha);
    p.validate();
    make_grid(c.grid, p.kappa0, p.delta_kappa);
  }
  const RunBlock& r = c.run;
  for (double t : r.times) require(std::isfinite(t), "run.times must be finite");
  require(r.floor > 0.0 && r.floor <= 1e-3, "run.floor must lie in (0, 1e-3]");
  require(r.threads >= 1, "run.threads must be >= 1");
  if (r.x_window) require(r.x_window->second > r.x_window->first, "run.x_window must be increasing");
  require(r.stride >= 1, "run.stride must be >= 1");
  require(r.flux_t_final >= r.flux_t_initial, "run.flux_t_final must be >= run.flux_t_initial");
  require(r.flux_left.has_value() == r.flux_right.has_value(),
          "run.flux_left and run.flux_right must be given together");
  if (r.flux_left) require(*r.flux_left <= *r.flux_right, "run.flux_left must be <= run.flux_right");
  require(r.n_quad >= 64, "run.n_quad must be >= 64");
  require(r.dt > 0.0 && r.dt <= 1e-2, "run.dt must lie in (0, 1e-2]");
  require(r.asymptotic_dt > 0.0 && r.asymptotic_dt <= 1e-2, "run.asymptotic_dt must lie in (0, 1e-2]");
  require(r.n_trajectories >= 1, "run.n_trajectories must be >= 1");
  require(r.n_asymptotic >= 1, "run.n_asymptotic must be >= 1");
  require(r.trajectory_interval.second > r.trajectory_interval.first, "run.trajectory_interval must be increasing");
  require(r.t_end > 0.0 && r.t_end <= 50.0, "run.t_end must lie in (0, 50]");
  require(r.t_asymptotic > 0.0 && r.t_asymptotic <= 50.0, "run.t_asymptotic must lie in (0, 50]");
  require(r.output_interval > 0.0, "run.output_interval must be > 0");
  require(r.histogram_bins >= 2, "run.histogram_bins must be >= 2");
  require(r.classical_n >= 2, "run.classical_n must be >= 2");
  require(r.classical_t_max > 0.0, "run.classical_t_max must be > 0");
  require(r.sweep_alpha_max > r.sweep_alpha_min, "run.sweep_alpha_max must exceed run.sweep_alpha_min");
  require(r.sweep_alpha_min >= 0.0, "run.sweep_alpha_min must be >= 0");
  require(r.sweep_steps >= 2, "run.sweep_steps must be >= 2");
  require(r.probe_time > 0.0, "run.probe_time must be > 0");
  require(r.tolerance_scale > 0.0, "run.tolerance_scale must be > 0");
  require(!c.output.directory.empty(), "output.directory must not be empty");
}

std::string canonical_text(const SimConfig& c) {
  // output.directory and run.threads are left out: neither changes results.
  const RunBlock& r = c.run;
  std::ostringstream o;
  o << "[grid]\n"
    << "x_min = " << num_text(c.grid.x_min) << "\n"
    << "x_max = " << num_text(c.grid.x_max) << "\n"
    << "n_points = " << c.grid.n_points << "\n"
    << "[state]\n"
    << "kappa0 = " << num_text(c.state.kappa0) << "\n"
    << "delta_kappa = " << num_text(c.state.delta_kappa) << "\n"
    << "alpha = " << list_text(c.alphas) << "\n"
    << "mass = " << num_text(c.state.mass) << "\n"
    << "hbar = " << num_text(c.state.hbar) << "\n";
  if (c.state.chirp) o << "chirp = " << num_text(*c.state.chirp) << "\n";
  o << "[run]\n"
    << "times = " << list_text(r.times) << "\n"
    << "floor = " << num_text(r.floor) << "\n"
    << "seed = " << r.seed << "\n";
  if (r.x_window) o << "x_window = " << num_text(r.x_window->first) << ", " << num_text(r.x_window->second) << "\n";
  o << "stride = " << r.stride << "\n"
    << "flux_t_initial = " << num_text(r.flux_t_initial) << "\n"
    << "flux_t_final = " << num_text(r.flux_t_final) << "\n"
    << "flux_plane_time = " << num_text(r.flux_plane_time) << "\n";
  if (r.flux_left) o << "flux_left = " << num_text(*r.flux_left) << "\n"
                     << "flux_right = " << num_text(*r.flux_right) << "\n";
  o << "n_quad = " << r.n_quad << "\n"
    << "dt = " << num_text(r.dt) << "\n"
    << "n_trajectories = " << r.n_trajectories << "\n"
    << "trajectory_interval = " << num_text(r.trajectory_interval.first) << ", "
    << num_text(r.trajectory_interval.second) << "\n"
    << "t_end = " << num_text(r.t_end) << "\n"
    << "output_interval = " << num_text(r.output_interval) << "\n"
    << "n_asymptotic = " << r.n_asymptotic << "\n"
    << "t_asymptotic = " << num_text(r.t_asymptotic) << "\n"
    << "asymptotic_dt = " << num_text(r.asymptotic_dt) << "\n"
    << "histogram_bins = " << r.histogram_bins << "\n"
    << "classical_n = " << r.classical_n << "\n"
    << "classical_ensembles = " << r.classical_ensembles << "\n"
    << "classical_t_max = " << num_text(r.classical_t_max) << "\n"
    << "sweep_alpha_min = " << num_text(r.sweep_alpha_min) << "\n"
    << "sweep_alpha_max = " << num_text(r.sweep_alpha_max) << "\n"
    << "sweep_steps = " << r.sweep_steps << "\n"
    << "probe_time = " << num_text(r.probe_time) << "\n"
    << "tolerance_scale = " << num_text(r.tolerance_scale) << "\n"
    << "[output]\n"
    << "format = " << format_name(c.output.format) << "\n"
    << "timing = " << (c.output.timing ? "true" : "false") << "\n";
  return o.str();
}

std::string config_hash(const SimConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_text(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace superband
