#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bhcone/eigensolver.hpp"
#include "bhcone/hamiltonian.hpp"
#include "bhcone/lattice.hpp"

namespace bhcone {

// A theorem or identity was asked of an input outside its hypotheses.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Verdict {
  std::string claim;
  bool passed = false;
  std::string detail;
};

bool all_passed(const std::vector<Verdict>& verdicts);

struct TheoremOptions {
  double degeneracy_tol = 0.0;  // <= 0 selects default_degeneracy_tolerance(E0)
  double s2_tol = 1e-8;
  int trials = 1000;
  std::uint64_t seed = 0;
};

struct SectorLevels {
  int n_b = 0;
  int n_c = 0;
  std::vector<double> energies;  // lowest few, ascending
};

struct TheoremReport {
  double ground_energy = 0.0;
  double gap = 0.0;  // to the next level, across all sectors for model two
  int degeneracy = 0;
  double degeneracy_tol = 0.0;
  std::string sector_of_ground;
  std::optional<double> s2_expectation;  // model two with real hopping only
  int positivity_trials = 0;
  // min over trials of <psi^N|GS> / (|| |psi^N> || ||GS||)
  double positivity_min_overlap = 0.0;
  // max over trials of |Im <psi^N|GS>| with the same normalization (model two)
  double positivity_max_imaginary = 0.0;
  std::vector<SectorLevels> sectors;
  std::vector<Verdict> verdicts;

  bool passed() const { return all_passed(verdicts); }
};

// Overlaps with rank-1 cone directions count as strictly positive above this,
// relative to the product of norms.
inline constexpr double kStrictPositivity = 1e-12;

// Unique ground state in the N = 2n sector of model one, positive overlap with
// random real rank-1 states after fixing the sign against the all-ones state.
// Throws PreconditionError when the spec violates the theorem's hypotheses.
TheoremReport verify_theorem1(const ModelOneSpec& spec, int n, const TheoremOptions& options = {});

// Uniqueness across all (N_b, N_c) sectors with N_b + N_c = 2n, S^z = 0,
// <S^2> = 0 for real hopping, positive overlaps with random reflection
// states (phi, conj(phi)).
TheoremReport verify_theorem2(const ModelTwoSpec& spec, int n, const TheoremOptions& options = {});

struct ModelTwoGround {
  double energy = 0.0;
  int n_b = 0;
  int n_c = 0;
  SectorVector vector;  // phase fixed against the all-ones reflection state
};

// Lowest state over all (N_b, N_c) sectors of the N = 2n space.
ModelTwoGround model_two_ground_state(const ModelTwoSpec& spec, int n);

struct PairedOverlap {
  std::vector<int> pairs;  // i_1..i_L, sum = n
  double overlap = 0.0;    // <(b_1^+ c_1^+)^{i_1} ... |0> | GS>, real part
  double imaginary = 0.0;
};

struct SingletOverlapReport {
  std::vector<PairedOverlap> overlaps;
  double max_overlap = 0.0;
  bool passed = false;
};

// Overlaps of the phase-fixed ground state with every paired state
// prod_i (b_i^+ c_i^+)^{i_i} |0>, sum_i i_i = n. Passes when one exceeds tol.
SingletOverlapReport verify_singlet_overlap(const ModelTwoSpec& spec, int n, double tol = 1e-12);
SingletOverlapReport verify_singlet_overlap(const ModelTwoGround& ground, int sites, int n,
                                            double tol = 1e-12);

enum class HsKind { attractive, repulsive_imaginary };

struct HsRow {
  int n = 0;
  double closed_form = 0.0;   // exp(-tau U n^2)
  double quadrature = 0.0;    // real part of the Gaussian integral
  double imaginary = 0.0;     // imaginary part (zero by symmetry)
  double relative_error = 0.0;
};

struct HsReport {
  HsKind kind = HsKind::attractive;
  double u = 0.0;
  double tau = 0.0;
  std::vector<HsRow> rows;
  double max_relative_error = 0.0;
  bool converged = true;
  bool passed = false;
};

// exp(-tau U n^2) against the Gaussian integral over the auxiliary field, for
// every occupation n = 0..n_max. Attractive: real coupling e^{-n x}, U < 0.
// Repulsive: imaginary coupling e^{-i n x}, U > 0.
HsReport verify_hs_identity(double u, double tau, int n_max, HsKind kind, double tol = 1e-8);

struct TrotterRow {
  int steps = 0;
  double tau = 0.0;
  double error = 0.0;  // ||exp(-beta H) - P^M||_F / ||exp(-beta H)||_F
};

struct TrotterReport {
  double beta = 0.0;
  std::vector<TrotterRow> rows;
  double slope = 0.0;
  bool exact_splitting = false;  // every error at roundoff level
  bool passed = false;
};

inline constexpr double kTrotterSlopeLow = 0.85;
inline constexpr double kTrotterSlopeHigh = 1.15;

// Error of the first-order product [exp(-tau H0) exp(-tau HU)]^M against
// exp(-beta H) at fixed beta, with the log-log slope against tau.
TrotterReport verify_trotter_scaling(const HamiltonianParts& parts, double beta,
                                     const std::vector<int>& steps);
TrotterReport verify_trotter_scaling(const ModelOneSpec& spec, int particles, double beta,
                                     const std::vector<int>& steps);

struct SplitReport {
  double u = 0.0;
  int prefactor = 0;
  int n_max = 0;
  std::vector<double> dtaus;       // dtau, dtau/2, dtau/4, dtau/8
  std::vector<double> deviations;  // max over n of |LHS - RHS|
  std::vector<double> ratios;      // deviations[k] / deviations[k+1]
  double fitted_c = 0.0;           // max deviation / dtau^2 over the sweep
  bool passed = false;
};

inline constexpr double kSplitRatio = 4.0;
inline constexpr double kSplitRatioTol = 0.5;

// 1 - p dtau U n^2 against cosh(sqrt(-2 p dtau U) n), the average of the two
// exponentials exp(+-sqrt(-2 p dtau U) n), for U < 0. For U > 0 the pair is
// exp(+-i sqrt(2 p dtau U) n) and the average a cosine. Agreement is to first
// order in dtau; the sweep checks the remainder scales as dtau^2.
SplitReport verify_split_identity(double u, double dtau, int prefactor, int n_max);

// |LHS - RHS| at a single (dtau, n).
double split_identity_deviation(double u, double dtau, int prefactor, int n);

struct VariantReport {
  int particles = 0;
  double dtau = 0.0;
  bool nonnegative = false;
  bool irreducible = false;
  double min_entry = 0.0;
  double ground_energy = 0.0;
  double gap = 0.0;
  int degeneracy = 0;
  std::vector<Verdict> verdicts;

  bool passed() const { return all_passed(verdicts); }
};

// Relaxed model one (t_ij >= 0, connected, any U, any N): 1 - dtau H is
// entrywise nonnegative and irreducible, and the ground state is unique.
VariantReport verify_variant_uniqueness(const ModelOneSpec& spec, int particles, double dtau,
                                        double tol = 0.0);

struct ExpQuadraticReport {
  int modes = 0;
  int particles = 0;
  int trials = 0;
  double max_error = 0.0;  // relative to the propagated vector norm
  bool passed = false;
};

// Rank-1 propagation psi -> exp(T) psi against exp(a^+ T a) built on the
// occupation basis, for random complex T.
ExpQuadraticReport verify_exp_quadratic(int modes, int particles, int trials, std::uint64_t seed,
                                        double tol = 1e-10);

}  // namespace bhcone
