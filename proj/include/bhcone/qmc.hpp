#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bhcone/fock.hpp"
#include "bhcone/lattice.hpp"

namespace bhcone {

using Rng = std::mt19937_64;

enum class Splitting { first_order, symmetric };

Splitting parse_splitting(std::string_view name);
std::string_view to_string(Splitting s);

struct ProjectionSchedule {
  double beta = 8.0;
  int steps = 256;  // M, tau = beta / M
  int equilibration_steps = 64;
  int measure_interval = 10;
  Splitting splitting = Splitting::first_order;

  double tau() const { return beta / steps; }
  void validate() const;  // throws std::invalid_argument
};

struct Walker {
  RankOneState state;  // unit norm after every update
  double weight = 1.0;
};

// Run-time view of either model: mode layout, the hopping generator used by
// exp(-tau H0), and the interaction couplings sampled by the auxiliary fields.
class QmcModel {
 public:
  enum class Kind { one, two };

  // Rejects U_i >= 0 (model one) and U1_i >= 0 or U2_i <= 0 (model two):
  // the real Gaussian fields need attractive couplings, the phase fields
  // repulsive ones.
  QmcModel(const ModelOneSpec& spec, int particles);
  QmcModel(const ModelTwoSpec& spec, int particles);

  Kind kind() const { return kind_; }
  int sites() const { return sites_; }
  int modes() const { return kind_ == Kind::one ? sites_ : 2 * sites_; }
  int particles() const { return particles_; }
  // Real Gaussian fields per step: L (model one) or 2L (x1 then x2, model two).
  int field_count() const { return kind_ == Kind::one ? sites_ : 2 * sites_; }

  // L x L single-particle hopping t (model one) or t^b (model two).
  const Eigen::MatrixXcd& hopping() const { return hopping_; }
  // exp(tau t), the single-particle image of exp(-tau H0).
  Eigen::MatrixXcd hopping_propagator(double tau) const;
  // Standard deviation of each field at step tau: sqrt(2 tau |U|).
  Eigen::VectorXd field_widths(double tau) const;

  // All-ones (model one) or all-ones reflection vector (model two).
  RankOneState trial() const;

  // <trial|H|psi^N> from rank-1 closed forms.
  cplx hamiltonian_element(const RankOneState& bra, const RankOneState& ket) const;

 private:
  Kind kind_;
  int sites_;
  int particles_;
  Eigen::MatrixXcd hopping_;
  Eigen::VectorXd u_;   // model one: U_i; model two: U1_i
  Eigen::VectorXd u2_;  // model two only
};

// Counter-based stream: the same (seed, walker, step) always yields the same
// generator, independent of thread scheduling.
Rng walker_stream(std::uint64_t seed, std::uint64_t walker, std::uint64_t step);
Rng resampling_stream(std::uint64_t seed, std::uint64_t step);

// psi <- exp(tau t) psi (model two: phi block by exp(tau t^b), the c block is
// its conjugate), renormalized with ||psi'||^N folded into the weight.
Walker propagate_hopping(const Walker& walker, const QmcModel& model, double tau);
Walker apply_hopping(const Walker& walker, const QmcModel& model, const Eigen::MatrixXcd& propagator);

std::vector<double> draw_auxiliary_fields(const QmcModel& model, double tau, Rng& rng);

// Model one: mode i scaled by exp(-x_i). Model two: b_i by exp(-x1_i - i x2_i)
// and c_i by exp(-x1_i + i x2_i), which keeps psi = (phi, conj(phi)).
Walker apply_auxiliary_fields(const Walker& walker, const QmcModel& model, std::span<const double> fields);

// One Hubbard-Stratonovich sample of exp(-tau H_U).
Walker sample_interaction(const Walker& walker, const QmcModel& model, double tau, Rng& rng);

struct EnergyEstimate {
  double energy = 0.0;
  double error = 0.0;  // spread of per-block ratios over walker blocks
  double numerator = 0.0;
  double denominator = 0.0;
};

class DegenerateEnsemble : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// sum_w weight_w <trial|H|psi_w^N> / sum_w weight_w <trial|psi_w^N>.
EnergyEstimate mixed_energy_estimator(std::span<const Walker> walkers, const RankOneState& trial,
                                      const QmcModel& model);

// Systematic (comb) resampling to target_count walkers of weight W / target,
// W the total weight.
std::vector<Walker> resample_population(std::span<const Walker> walkers, int target_count, Rng& rng);

struct StepPropagators {
  Eigen::MatrixXcd full;  // exp(tau t)
  Eigen::MatrixXcd half;  // exp(tau t / 2)
};

StepPropagators make_step_propagators(const QmcModel& model, const ProjectionSchedule& schedule);

// One imaginary-time step for every walker: exp(-tau HU) then exp(-tau H0),
// or H0/2, HU, H0/2 in symmetric mode. Walkers are independent; the OpenMP
// version and the serial reference produce identical populations.
void advance_walkers(std::vector<Walker>& walkers, const QmcModel& model, const ProjectionSchedule& schedule,
                     const StepPropagators& props, std::uint64_t seed, int step);
void advance_walkers_serial(std::vector<Walker>& walkers, const QmcModel& model,
                            const ProjectionSchedule& schedule, const StepPropagators& props,
                            std::uint64_t seed, int step);

struct BlockingResult {
  double mean = 0.0;
  double error = 0.0;
  int levels = 0;
};

// Flyvbjerg-Petersen blocking: the largest standard error over blocking
// levels that still have at least 8 blocks.
BlockingResult blocking_analysis(std::span<const double> samples);

// Ratio <a>/<b> of two correlated series with its blocking error, through the
// linearized residuals (a_t - R b_t) / <b>.
BlockingResult ratio_blocking_analysis(std::span<const double> numerators, std::span<const double> denominators);

class SignViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceRow {
  int step = 0;
  double estimator = 0.0;
  double block_error = 0.0;
  double total_weight = 0.0;
};

struct ProjectionResult {
  std::vector<TraceRow> trace;
  double energy = 0.0;
  double error = 0.0;
  int measurements_used = 0;
  long negative_overlaps = 0;
  double min_normalized_overlap = 0.0;  // over every walker at every measurement
  double max_structure_defect = 0.0;    // max |Im psi| or max |psi_{L+i} - conj(psi_i)|
  bool odd_particle_number = false;     // outside the cone guarantee
};

// Walkers start at the normalized trial state with unit weight. Every
// measure_interval steps the mixed estimator is recorded, every walker overlap
// with the trial is checked to be nonnegative (SignViolation otherwise), and
// the population is resampled back to walker_count.
ProjectionResult run_projection(const QmcModel& model, const ProjectionSchedule& schedule, int walker_count,
                                std::uint64_t seed);
ProjectionResult run_projection(const ModelOneSpec& spec, int particles, const ProjectionSchedule& schedule,
                                int walker_count, std::uint64_t seed);
ProjectionResult run_projection(const ModelTwoSpec& spec, int particles, const ProjectionSchedule& schedule,
                                int walker_count, std::uint64_t seed);

}  // namespace bhcone
