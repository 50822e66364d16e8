#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bhcone/lattice.hpp"
#include "bhcone/qmc.hpp"

namespace bhcone {

inline constexpr int kConfigSchemaVersion = 1;

enum class ModelChoice { one, two, variant };

ModelChoice parse_model_choice(std::string_view name);
std::string_view to_string(ModelChoice m);

// Explicit bond, 1-based sites. i == j sets a diagonal entry.
struct BondEntry {
  int i = 1;
  int j = 1;
  double re = 0.0;
  double im = 0.0;

  bool operator==(const BondEntry&) const = default;
};

// Exactly one of kind / bonds is in use.
struct LatticeConfig {
  std::optional<LatticeKind> kind;
  int sites = 0;
  double t = 1.0;
  double t_im = 0.0;
  std::vector<BondEntry> bonds;

  bool operator==(const LatticeConfig&) const = default;
};

struct ToleranceConfig {
  double degeneracy = 0.0;  // 0: relative default
  double s2 = 1e-8;
  int overlap_trials = 1000;
  double dtau = 0.01;  // projector factor 1 - dtau H, variant model
  double paired_overlap = 1e-12;

  bool operator==(const ToleranceConfig&) const = default;
};

struct QmcConfig {
  double beta = 8.0;
  int steps = 256;
  int walkers = 512;
  int measure_interval = 10;
  int equilibration_steps = 64;
  Splitting splitting = Splitting::first_order;

  bool operator==(const QmcConfig&) const = default;
  ProjectionSchedule schedule() const;
};

struct IdentityConfig {
  double hs_tau = 0.05;
  int n_max = 4;
  double hs_tol = 1e-8;
  double trotter_beta = 1.0;
  std::vector<int> trotter_steps{8, 16, 32, 64};
  double split_dtau = 0.01;
  int exp_trials = 20;
  double exp_tol = 1e-10;

  bool operator==(const IdentityConfig&) const = default;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  ModelChoice model = ModelChoice::one;
  LatticeConfig lattice;
  // per site after parsing; a scalar in the document is broadcast
  std::vector<double> u;   // model one, variant
  std::vector<double> u1;  // model two
  std::vector<double> u2;
  int particles = 2;
  std::optional<int> sz2;  // twice S^z, model two only
  ToleranceConfig tolerances;
  QmcConfig qmc;
  IdentityConfig identities;
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

// All problems found in one pass, each prefixed by its field path.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

// Strict JSON: unknown keys, wrong types and out-of-range values are errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

// Canonical document with every default spelled out; parse_config inverts it.
std::string serialize_config(const ExperimentConfig& config);

// Structural checks only; theorem hypotheses such as connectivity are left to
// the verify module. Throws ConfigError.
void validate_config(const ExperimentConfig& config);

Eigen::MatrixXcd config_hopping(const ExperimentConfig& config);
ModelOneSpec model_one_spec(const ExperimentConfig& config);
ModelTwoSpec model_two_spec(const ExperimentConfig& config);

}  // namespace bhcone
