// nlsred: ground states, reduction sweeps, spectra and dynamics of the
// strongly confined cubic NLS.
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nlsred/commands.hpp"

using namespace nlsred;

namespace {

std::vector<double> parse_omegas(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw Error(ErrorKind::InvalidArgument, "--omega: bad value '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorKind::InvalidArgument, "--omega: empty");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground states, dimension reduction and dynamics of the strongly confined cubic NLS"};
  app.require_subcommand(1);

  std::string config_path, omega_text, out_dir, sector;
  std::optional<double> mass;
  std::optional<std::uint64_t> seed;
  bool quiet_flag = false;
  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--omega", omega_text, "trap strength; a comma list for sweep");
  app.add_option("--mass", mass, "mass constraint m");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed");
  app.add_flag("--quiet", quiet_flag, "silence warnings");

  std::string state_path;
  auto* ground = app.add_subcommand("ground-state", "minimize at one omega; write the state and a JSON record");
  auto* sweep = app.add_subcommand("sweep", "minimize over the omega list; write CSV errors and fitted slopes");
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of the linearized operator in one sector");
  spectrum->add_option("state", state_path, "ground state file (default: minimize from the config)");
  spectrum->add_option("--sector", sector, "even, odd or full");
  auto* evolve = app.add_subcommand("evolve", "evolve a perturbed ground state; write the trajectory");
  evolve->add_option("state", state_path, "initial state file (default: minimize from the config)");
  auto* check = app.add_subcommand("check", "inequality and identity suite with a PASS/FAIL table");
  for (auto* sub : {ground, sweep, spectrum, evolve, check}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  RunConfig config;
  try {
    if (!config_path.empty()) config = load_config(config_path);
    if (!omega_text.empty()) {
      const auto omegas = parse_omegas(omega_text);
      if (sweep->parsed()) config.omegas = omegas;
      else if (omegas.size() == 1) config.omega = omegas.front();
      else throw Error(ErrorKind::InvalidArgument, "--omega takes a single value for this command");
    }
    if (mass) config.mass = *mass;
    if (seed) config.seed = *seed;
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (!sector.empty()) config.sector = parse_sector(sector);
    config.validate();
  } catch (const Error& e) {
    std::fprintf(stderr, "nlsred: %s\n", e.what());
    return kExitUsage;
  }
  set_quiet(quiet_flag);

  const std::optional<std::string> state =
      state_path.empty() ? std::nullopt : std::optional<std::string>(state_path);
  if (ground->parsed()) return run_guarded(config, "ground-state", [&] { return cmd_ground_state(config); });
  if (sweep->parsed()) return run_guarded(config, "sweep", [&] { return cmd_sweep(config); });
  if (spectrum->parsed()) return run_guarded(config, "spectrum", [&] { return cmd_spectrum(config, state); });
  if (evolve->parsed()) return run_guarded(config, "evolve", [&] { return cmd_evolve(config, state); });
  return run_guarded(config, "check", [&] { return cmd_check(config); });
}
