// bhcone: exact diagonalization, theorem checks and projector QMC for the
// attractive one-component and two-component Bose-Hubbard models.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "bhcone/commands.hpp"
#include "bhcone/config.hpp"

namespace {

int write(const bhcone::CommandResult& result, const std::string& dir) {
  try {
    bhcone::emit_report(result, dir);
  } catch (const bhcone::ReportWriteError& e) {
    std::cerr << "bhcone: " << e.what() << "\n";
    return bhcone::kExitWriteFailed;
  }
  for (const auto& a : result.artifacts) std::cout << (std::filesystem::path(dir) / a.name).string() << "\n";
  return result.exit_status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground-state uniqueness checks and sign-free QMC for attractive Bose-Hubbard models"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;

  for (const char* name : {"ed", "verify", "qmc", "identities"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory, overrides outputs.dir");
    sub->add_option("--seed", seed, "random seed, overrides seed");
    sub->add_option("--tol", tol, "degeneracy tolerance, overrides tolerances.degeneracy");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  bhcone::ExperimentConfig config;
  try {
    config = bhcone::load_config(config_path);
    if (out_dir) config.output_dir = *out_dir;
    if (seed) config.seed = *seed;
    if (tol) config.tolerances.degeneracy = *tol;
    bhcone::validate_config(config);
  } catch (const bhcone::ConfigError& e) {
    std::cerr << "bhcone: " << e.what() << "\n";
    return write(bhcone::error_result(command, "config", e.what(), e.errors()), out_dir.value_or("out"));
  }

  const auto result = bhcone::run_command(bhcone::parse_command(command), config);
  if (result.exit_status == bhcone::kExitError) std::cerr << "bhcone: " << command << " failed, see error.json\n";
  return write(result, config.output_dir);
}
