#include "superband/commands.hpp"
#include "superband/config.hpp"
#include "superband/error.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> alpha;
  std::optional<std::string> times;
  std::optional<std::string> format;
  std::optional<unsigned> threads;
  std::optional<double> tolerance_scale;
  bool timing = false;
};

superband::SimConfig resolve(const Overrides& o) {
  using namespace superband;
  SimConfig config = o.config_path.empty() ? SimConfig{} : load_config(o.config_path);
  if (o.out) config.output.directory = *o.out;
  if (o.seed) config.run.seed = *o.seed;
  if (o.alpha) {
    config.alphas = parse_number_list(*o.alpha);
    if (config.alphas.empty()) throw ConfigError("--alpha needs at least one value");
  }
  if (o.times) config.run.times = parse_number_list(*o.times);
  if (o.format) {
    if (*o.format == "csv") config.output.format = OutputFormat::csv;
    else if (*o.format == "json") config.output.format = OutputFormat::json;
    else config.output.format = OutputFormat::both;
  }
  if (o.threads) config.run.threads = *o.threads;
  if (o.tolerance_scale) config.run.tolerance_scale = *o.tolerance_scale;
  if (o.timing) config.output.timing = true;
  validate(config);
  return config;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free evolution of superbandwidth wave packets"};
  app.set_version_flag("--version", superband::kSoftwareVersion);
  Overrides o;
  app.add_option("--config", o.config_path, "Config file ([section] key = value)")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--seed", o.seed, "RNG seed (overrides the config)");
  app.add_option("--alpha", o.alpha, "Comma-separated alpha values");
  app.add_option("--times", o.times, "Comma-separated evolution times");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json", "both"}));
  app.add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--tolerance-scale", o.tolerance_scale, "Scale every table1 tolerance")
      ->check(CLI::PositiveNumber);
  app.add_flag("--timing", o.timing, "Record wall-clock timings in reports");

  const char* commands[][2] = {
      {"evolve", "Per-time field dumps with local momentum"},
      {"table1", "Extremum table and diff against reference values"},
      {"flux", "Probability flux through the extremum planes"},
      {"bohm", "Bohmian trajectories and asymptotic velocities"},
      {"classical", "Classical ensembles and the interference time"},
      {"sweep-alpha", "Central-lobe slope versus alpha and the critical alpha"},
  };
  for (const auto& c : commands) app.add_subcommand(c[0], c[1])->fallthrough();
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? superband::kExitOk : superband::kExitConfig;
  }

  try {
    const superband::SimConfig config = resolve(o);
    return superband::run_command(app.get_subcommands().front()->get_name(), config);
  } catch (const superband::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return superband::kExitConfig;
  } catch (const superband::NumericalHealthError& e) {
    std::cerr << "numerical health failure: " << e.what() << "\n";
    return superband::kExitNumerical;
  } catch (const superband::NoExtremumError& e) {
    std::cerr << "numerical health failure: " << e.what() << "\n";
    return superband::kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return superband::kExitNumerical;
  }
}
