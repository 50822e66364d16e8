#include "bhcone/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bhcone/fock.hpp"

namespace bhcone {

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void require_n(int n) {
  if (n < 1) throw PreconditionError("n must be a positive integer (N = 2n)");
}

// Rotate v so that <ref|v> is real and positive. Returns |<ref|v>| / ||ref||.
double fix_phase(Eigen::VectorXcd& v, const SectorVector& reference) {
  const cplx c = reference.amplitudes.dot(v);
  const double mag = std::abs(c);
  if (mag > 0.0) v *= std::conj(c) / mag;
  const double rn = reference.amplitudes.norm();
  return rn > 0.0 ? mag / rn : 0.0;
}

struct PositivityStats {
  double min_overlap = std::numeric_limits<double>::infinity();
  double max_imaginary = 0.0;
};

template <typename DrawState>
PositivityStats cone_overlaps(const Eigen::VectorXcd& ground, const BasisPtr& basis, int trials,
                              DrawState&& draw) {
  PositivityStats stats;
  const double gnorm = ground.norm();
  for (int k = 0; k < trials; ++k) {
    const SectorVector probe = rank1_to_vector(draw(), basis);
    const double scale = probe.amplitudes.norm() * gnorm;
    const cplx c = probe.amplitudes.dot(ground);
    stats.min_overlap = std::min(stats.min_overlap, c.real() / scale);
    stats.max_imaginary = std::max(stats.max_imaginary, std::abs(c.imag()) / scale);
  }
  if (trials == 0) stats.min_overlap = 0.0;
  return stats;
}

Eigen::VectorXd nonzero_normal(int size, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(size);
  do {
    for (int i = 0; i < size; ++i) v[i] = gauss(rng);
  } while (v.norm() == 0.0);
  return v;
}

Eigen::VectorXcd nonzero_complex_normal(int size, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd v(size);
  do {
    for (int i = 0; i < size; ++i) v[i] = cplx(gauss(rng), gauss(rng));
  } while (v.norm() == 0.0);
  return v;
}

std::string sector_label(int n_b, int n_c) {
  return "N_b=" + std::to_string(n_b) + ",N_c=" + std::to_string(n_c);
}

int sector_levels(std::ptrdiff_t dim) { return static_cast<int>(std::min<std::ptrdiff_t>(6, dim)); }

}  // namespace

bool all_passed(const std::vector<Verdict>& verdicts) {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

TheoremReport verify_theorem1(const ModelOneSpec& spec, int n, const TheoremOptions& options) {
  require_n(n);
  const auto validation = validate_spec(spec);
  if (!validation.ok()) throw PreconditionError("model one hypotheses violated: " + validation.failures());

  const int particles = 2 * n;
  const SparseOperator h = build_model1_hamiltonian(spec, particles);
  const SpectrumResult spectrum = lowest_eigenpairs(h, sector_levels(h.dimension()), options.seed);

  TheoremReport report;
  report.ground_energy = spectrum.eigenvalues.front();
  report.gap = spectrum.gap();
  report.degeneracy_tol = options.degeneracy_tol > 0.0 ? options.degeneracy_tol
                                                       : default_degeneracy_tolerance(report.ground_energy);
  const Degeneracy deg = degeneracy_count(spectrum, report.degeneracy_tol);
  report.degeneracy = deg.count;
  report.sector_of_ground = "N=" + std::to_string(particles);
  report.sectors.push_back({particles, 0, spectrum.eigenvalues});

  Eigen::VectorXcd ground = spectrum.eigenvectors.front();
  const int l = spec.sites();
  const SectorVector reference =
      rank1_to_vector(RankOneState::real(Eigen::VectorXd::Ones(l), particles), h.basis());
  const double ref_overlap = fix_phase(ground, reference);

  std::mt19937_64 rng(options.seed);
  const auto stats = cone_overlaps(ground, h.basis(), options.trials, [&] {
    return RankOneState::real(nonzero_normal(l, rng), particles);
  });
  report.positivity_trials = options.trials;
  report.positivity_min_overlap = stats.min_overlap;
  report.positivity_max_imaginary = stats.max_imaginary;

  // a one-state sector is trivially nondegenerate
  const bool settled = !deg.underdetermined || h.dimension() == 1;
  report.verdicts.push_back({"unique_ground_state", deg.count == 1 && settled,
                             "degeneracy " + std::to_string(deg.count) + ", gap " + format_double(report.gap)});
  report.verdicts.push_back({"reference_overlap", ref_overlap > kStrictPositivity,
                             "|<1^N|GS>| / ||1^N|| = " + format_double(ref_overlap)});
  report.verdicts.push_back({"cone_positivity", stats.min_overlap > kStrictPositivity,
                             "min normalized overlap " + format_double(stats.min_overlap) + " over " +
                                 std::to_string(options.trials) + " real rank-1 states"});
  return report;
}

ModelTwoGround model_two_ground_state(const ModelTwoSpec& spec, int n) {
  require_n(n);
  const int particles = 2 * n;
  ModelTwoGround best;
  bool have = false;
  SpectrumResult best_spectrum;
  for (int n_b = particles; n_b >= 0; --n_b) {
    const SparseOperator h = build_model2_hamiltonian(spec, n_b, particles - n_b);
    SpectrumResult s = lowest_eigenpairs(h, 1);
    if (!have || s.eigenvalues.front() < best.energy) {
      have = true;
      best.energy = s.eigenvalues.front();
      best.n_b = n_b;
      best.n_c = particles - n_b;
      best_spectrum = std::move(s);
    }
  }
  Eigen::VectorXcd v = best_spectrum.eigenvectors.front();
  const SectorVector reference = rank1_to_vector(
      RankOneState::reflection(Eigen::VectorXcd::Ones(spec.sites()), particles), best_spectrum.basis);
  fix_phase(v, reference);
  best.vector = {best_spectrum.basis, std::move(v)};
  return best;
}

TheoremReport verify_theorem2(const ModelTwoSpec& spec, int n, const TheoremOptions& options) {
  require_n(n);
  const auto validation = validate_spec(spec);
  if (!validation.ok()) throw PreconditionError("model two hypotheses violated: " + validation.failures());

  const int particles = 2 * n;
  const int l = spec.sites();

  TheoremReport report;
  std::vector<double> all_levels;
  struct Candidate {
    double energy;
    int n_b;
    SpectrumResult spectrum;
  };
  std::optional<Candidate> ground;
  for (int n_b = particles; n_b >= 0; --n_b) {
    const int n_c = particles - n_b;
    const SparseOperator h = build_model2_hamiltonian(spec, n_b, n_c);
    SpectrumResult s = lowest_eigenpairs(h, sector_levels(h.dimension()), options.seed);
    report.sectors.push_back({n_b, n_c, s.eigenvalues});
    all_levels.insert(all_levels.end(), s.eigenvalues.begin(), s.eigenvalues.end());
    if (!ground || s.eigenvalues.front() < ground->energy) ground = Candidate{s.eigenvalues.front(), n_b, std::move(s)};
  }
  std::sort(all_levels.begin(), all_levels.end());

  report.ground_energy = all_levels.front();
  report.gap = all_levels.size() > 1 ? all_levels[1] - all_levels[0] : 0.0;
  report.degeneracy_tol = options.degeneracy_tol > 0.0 ? options.degeneracy_tol
                                                       : default_degeneracy_tolerance(report.ground_energy);
  report.degeneracy = static_cast<int>(std::count_if(all_levels.begin(), all_levels.end(), [&](double e) {
    return e - report.ground_energy <= report.degeneracy_tol;
  }));
  const int n_b = ground->n_b;
  const int n_c = particles - n_b;
  report.sector_of_ground = sector_label(n_b, n_c);

  const BasisPtr& basis = ground->spectrum.basis;
  Eigen::VectorXcd gs = ground->spectrum.eigenvectors.front();
  const SectorVector reference =
      rank1_to_vector(RankOneState::reflection(Eigen::VectorXcd::Ones(l), particles), basis);
  const double ref_overlap = fix_phase(gs, reference);

  report.verdicts.push_back({"unique_ground_state", report.degeneracy == 1,
                             "degeneracy " + std::to_string(report.degeneracy) + " across all sectors, gap " +
                                 format_double(report.gap)});
  report.verdicts.push_back({"sz_zero", n_b == n_c, "ground state in sector " + report.sector_of_ground});

  if (spec.has_real_hopping()) {
    const SpinOperators spin = build_spin_operators(l, particles);
    Eigen::VectorXcd embedded = Eigen::VectorXcd::Zero(spin.s2.dimension());
    for (std::size_t k = 0; k < basis->size(); ++k) embedded[*spin.s2.basis()->index_of(basis->state(k))] = gs[k];
    report.s2_expectation = spin.s2.expectation(embedded).real() / embedded.squaredNorm();
    report.verdicts.push_back({"zero_total_spin", *report.s2_expectation <= options.s2_tol,
                               "<S^2> = " + format_double(*report.s2_expectation)});
  }

  std::mt19937_64 rng(options.seed);
  const auto stats = cone_overlaps(gs, basis, options.trials, [&] {
    return RankOneState::reflection(nonzero_complex_normal(l, rng), particles);
  });
  report.positivity_trials = options.trials;
  report.positivity_min_overlap = stats.min_overlap;
  report.positivity_max_imaginary = stats.max_imaginary;
  report.verdicts.push_back({"reference_overlap", ref_overlap > kStrictPositivity,
                             "|<ref|GS>| / ||ref|| = " + format_double(ref_overlap)});
  report.verdicts.push_back({"reflection_cone_positivity", stats.min_overlap > kStrictPositivity,
                             "min normalized overlap " + format_double(stats.min_overlap) + ", max |Im| " +
                                 format_double(stats.max_imaginary) + " over " + std::to_string(options.trials) +
                                 " reflection rank-1 states"});
  return report;
}

SingletOverlapReport verify_singlet_overlap(const ModelTwoGround& ground, int sites, int n, double tol) {
  SingletOverlapReport report;
  const auto& basis = ground.vector.basis;
  const double norm = ground.vector.amplitudes.norm();

  std::vector<int> pairs(sites, 0);
  std::function<void(int, int)> visit = [&](int site, int left) {
    if (site == sites - 1) {
      pairs[site] = left;
      Occupation occ(2 * sites, 0);
      double weight = 1.0;
      for (int i = 0; i < sites; ++i) {
        occ[i] = occ[sites + i] = pairs[i];
        weight *= factorial(pairs[i]);  // ||(b^+)^k (c^+)^k |0>|| = k!
      }
      cplx amp(0.0);
      if (auto idx = basis->index_of(occ)) amp = ground.vector.amplitudes[*idx];
      const cplx overlap = weight * amp / norm;
      report.overlaps.push_back({pairs, overlap.real(), overlap.imag()});
      report.max_overlap = std::max(report.max_overlap, overlap.real());
      return;
    }
    for (int k = left; k >= 0; --k) {
      pairs[site] = k;
      visit(site + 1, left - k);
    }
  };
  visit(0, n);
  report.passed = report.max_overlap > tol;
  return report;
}

SingletOverlapReport verify_singlet_overlap(const ModelTwoSpec& spec, int n, double tol) {
  return verify_singlet_overlap(model_two_ground_state(spec, n), spec.sites(), n, tol);
}

HsReport verify_hs_identity(double u, double tau, int n_max, HsKind kind, double tol) {
  if (!(tau > 0.0)) throw PreconditionError("HS identity needs tau > 0");
  if (kind == HsKind::attractive && !(u < 0.0)) throw PreconditionError("attractive HS needs U < 0");
  if (kind == HsKind::repulsive_imaginary && !(u > 0.0))
    throw PreconditionError("imaginary HS needs U > 0");
  if (n_max < 0) throw PreconditionError("n_max must be nonnegative");

  using boost::math::quadrature::gauss_kronrod;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double width = 4.0 * tau * std::abs(u);  // Gaussian weight exp(-x^2 / width)
  const double norm = 1.0 / std::sqrt(std::numbers::pi * width);

  HsReport report;
  report.kind = kind;
  report.u = u;
  report.tau = tau;
  for (int n = 0; n <= n_max; ++n) {
    const double exact = std::exp(-tau * u * double(n) * double(n));
    double error_re = 0.0;
    double error_im = 0.0;
    double re = 0.0;
    double im = 0.0;
    if (kind == HsKind::attractive) {
      re = gauss_kronrod<double, 61>::integrate(
          [&](double x) { return norm * std::exp(-x * x / width - double(n) * x); }, -kInf, kInf, 20, 1e-14,
          &error_re);
    } else {
      re = gauss_kronrod<double, 61>::integrate(
          [&](double x) { return norm * std::exp(-x * x / width) * std::cos(double(n) * x); }, -kInf, kInf, 20,
          1e-14, &error_re);
      im = gauss_kronrod<double, 61>::integrate(
          [&](double x) { return -norm * std::exp(-x * x / width) * std::sin(double(n) * x); }, -kInf, kInf, 20,
          1e-14, &error_im);
    }
    const double rel = std::abs(cplx(re, im) - exact) / exact;
    report.rows.push_back({n, exact, re, im, rel});
    report.max_relative_error = std::max(report.max_relative_error, rel);
    report.converged = report.converged && std::isfinite(re) && error_re <= 1e-6 * std::max(1.0, std::abs(re)) &&
                       error_im <= 1e-6;
  }
  report.passed = report.converged && report.max_relative_error <= tol;
  return report;
}

TrotterReport verify_trotter_scaling(const HamiltonianParts& parts, double beta, const std::vector<int>& steps) {
  if (!(beta > 0.0)) throw PreconditionError("Trotter check needs beta > 0");
  if (steps.empty()) throw PreconditionError("Trotter check needs at least one step count");

  const Eigen::MatrixXcd h0 = parts.kinetic.to_dense();
  const Eigen::MatrixXcd hu = parts.interaction.to_dense();
  const Eigen::MatrixXcd exact = matrix_exponential(-beta * (h0 + hu));
  const double exact_norm = exact.norm();

  TrotterReport report;
  report.beta = beta;
  for (int m : steps) {
    if (m < 1) throw PreconditionError("Trotter step counts must be positive");
    const double tau = beta / m;
    const Eigen::MatrixXcd factor = matrix_exponential(-tau * h0) * matrix_exponential(-tau * hu);
    Eigen::MatrixXcd product = Eigen::MatrixXcd::Identity(h0.rows(), h0.cols());
    for (int k = 0; k < m; ++k) product = product * factor;
    report.rows.push_back({m, tau, (exact - product).norm() / exact_norm});
  }

  report.exact_splitting = std::all_of(report.rows.begin(), report.rows.end(),
                                       [](const TrotterRow& r) { return r.error <= 1e-12; });
  if (report.exact_splitting) {
    report.passed = true;
    return report;
  }
  if (report.rows.size() < 2) return report;
  // least-squares slope of log(error) against log(tau)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : report.rows) {
    const double x = std::log(r.tau);
    const double y = std::log(r.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double count = static_cast<double>(report.rows.size());
  report.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  report.passed = report.slope >= kTrotterSlopeLow && report.slope <= kTrotterSlopeHigh;
  return report;
}

TrotterReport verify_trotter_scaling(const ModelOneSpec& spec, int particles, double beta,
                                     const std::vector<int>& steps) {
  return verify_trotter_scaling(model1_parts(spec, particles), beta, steps);
}

double split_identity_deviation(double u, double dtau, int prefactor, int n) {
  // U < 0: cosh(y) with y^2 = -2 p dtau U n^2. U > 0: cos(y), y^2 = 2 p dtau U n^2.
  const double y = std::sqrt(2.0 * prefactor * dtau * std::abs(u)) * n;
  const double half = u < 0.0 ? std::sinh(0.5 * y) : std::sin(0.5 * y);
  // |RHS - 1| - |LHS - 1|, the two sides shifted by 1
  return std::abs(2.0 * half * half - 0.5 * y * y);
}

SplitReport verify_split_identity(double u, double dtau, int prefactor, int n_max) {
  if (u == 0.0 || !std::isfinite(u)) throw PreconditionError("split identity needs a nonzero U");
  if (!(dtau > 0.0)) throw PreconditionError("split identity needs dtau > 0");
  if (prefactor < 1 || n_max < 0) throw PreconditionError("split identity needs prefactor >= 1, n_max >= 0");

  SplitReport report;
  report.u = u;
  report.prefactor = prefactor;
  report.n_max = n_max;
  double step = dtau;
  for (int k = 0; k < 4; ++k, step *= 0.5) {
    double worst = 0.0;
    for (int n = 0; n <= n_max; ++n) worst = std::max(worst, split_identity_deviation(u, step, prefactor, n));
    report.dtaus.push_back(step);
    report.deviations.push_back(worst);
    report.fitted_c = std::max(report.fitted_c, worst / (step * step));
  }
  report.passed = true;
  for (std::size_t k = 0; k + 1 < report.deviations.size(); ++k) {
    const double ratio = report.deviations[k + 1] > 0.0 ? report.deviations[k] / report.deviations[k + 1] : 0.0;
    report.ratios.push_back(ratio);
    report.passed = report.passed && std::abs(ratio - kSplitRatio) <= kSplitRatioTol;
  }
  return report;
}

VariantReport verify_variant_uniqueness(const ModelOneSpec& spec, int particles, double dtau, double tol) {
  const auto validation = validate_variant_spec(spec);
  if (!validation.ok()) throw PreconditionError("variant hypotheses violated: " + validation.failures());
  if (particles < 1) throw PreconditionError("variant needs N >= 1");
  if (!(dtau > 0.0)) throw PreconditionError("variant needs dtau > 0");

  VariantReport report;
  report.particles = particles;
  report.dtau = dtau;
  const ProjectorFactor factor = build_projector_factor(spec, particles, dtau);
  report.nonnegative = factor.nonnegative;
  report.irreducible = factor.irreducible;
  report.min_entry = factor.min_entry;

  const SparseOperator h = build_model1_hamiltonian(spec, particles);
  const SpectrumResult spectrum = lowest_eigenpairs(h, sector_levels(h.dimension()));
  report.ground_energy = spectrum.eigenvalues.front();
  report.gap = spectrum.gap();
  const double dtol = tol > 0.0 ? tol : default_degeneracy_tolerance(report.ground_energy);
  const Degeneracy deg = degeneracy_count(spectrum, dtol);
  report.degeneracy = deg.count;

  report.verdicts.push_back({"nonnegative", factor.nonnegative, "min entry " + format_double(factor.min_entry)});
  report.verdicts.push_back({"irreducible", factor.irreducible, "nonzero pattern strongly connected"});
  // A one-dimensional sector has a trivially unique ground state.
  const bool unique = deg.count == 1 && (!deg.underdetermined || h.dimension() == 1);
  report.verdicts.push_back({"unique_ground_state", unique,
                             "degeneracy " + std::to_string(deg.count) + ", gap " + format_double(report.gap)});
  return report;
}

ExpQuadraticReport verify_exp_quadratic(int modes, int particles, int trials, std::uint64_t seed, double tol) {
  if (modes < 1 || particles < 0 || trials < 0) throw PreconditionError("invalid exp-quadratic check sizes");
  ExpQuadraticReport report;
  report.modes = modes;
  report.particles = particles;
  report.trials = trials;

  auto basis = make_basis(OccupationBasis::enumerate(modes, particles));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < trials; ++k) {
    Eigen::MatrixXcd t(modes, modes);
    for (int i = 0; i < modes; ++i)
      for (int j = 0; j < modes; ++j) t(i, j) = 0.5 * cplx(gauss(rng), gauss(rng));
    const RankOneState state{nonzero_complex_normal(modes, rng), particles};

    const Eigen::VectorXcd lhs = rank1_to_vector(apply_quadratic_exponential(t, state), basis).amplitudes;
    const Eigen::MatrixXcd generator = build_quadratic_operator(t, basis).to_dense();
    const Eigen::VectorXcd rhs = matrix_exponential(generator) * rank1_to_vector(state, basis).amplitudes;
    const double err = (lhs - rhs).norm() / std::max(lhs.norm(), 1e-300);
    report.max_error = std::max(report.max_error, err);
  }
  report.passed = report.max_error <= tol;
  return report;
}

}  // namespace bhcone
