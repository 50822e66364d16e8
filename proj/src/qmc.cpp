#include "bhcone/qmc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bhcone {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kResamplingTag = 0xffffffffffffffffull;

void fold_norm(Walker& w) {
  const double nrm = w.state.psi.norm();
  w.state.psi /= nrm;
  w.weight *= std::pow(nrm, w.state.particles);
}

double structure_defect(const QmcModel& model, const RankOneState& s) {
  if (model.kind() == QmcModel::Kind::one) return s.psi.imag().cwiseAbs().maxCoeff();
  const int l = model.sites();
  return (s.psi.tail(l) - s.psi.head(l).conjugate()).cwiseAbs().maxCoeff();
}

void advance_one(Walker& w, const QmcModel& model, const ProjectionSchedule& schedule,
                 const StepPropagators& props, std::uint64_t seed, std::uint64_t index, int step) {
  Rng rng = walker_stream(seed, index, static_cast<std::uint64_t>(step));
  const double tau = schedule.tau();
  if (schedule.splitting == Splitting::symmetric) {
    w = apply_hopping(w, model, props.half);
    w = sample_interaction(w, model, tau, rng);
    w = apply_hopping(w, model, props.half);
  } else {
    w = sample_interaction(w, model, tau, rng);
    w = apply_hopping(w, model, props.full);
  }
}

}  // namespace

Splitting parse_splitting(std::string_view name) {
  if (name == "first_order") return Splitting::first_order;
  if (name == "symmetric") return Splitting::symmetric;
  throw std::invalid_argument("unknown splitting '" + std::string(name) + "'");
}

std::string_view to_string(Splitting s) {
  return s == Splitting::symmetric ? "symmetric" : "first_order";
}

void ProjectionSchedule::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("schedule: beta must be positive");
  if (steps < 1) throw std::invalid_argument("schedule: steps must be positive");
  if (measure_interval < 1) throw std::invalid_argument("schedule: measure_interval must be positive");
  if (equilibration_steps < 0) throw std::invalid_argument("schedule: equilibration_steps must be nonnegative");
  if (equilibration_steps + measure_interval > steps)
    throw std::invalid_argument("schedule: no measurement falls after equilibration");
}

QmcModel::QmcModel(const ModelOneSpec& spec, int particles)
    : kind_(Kind::one), sites_(spec.sites()), particles_(particles) {
  validate_spec(spec);  // shapes
  if (particles < 1) throw std::invalid_argument("qmc: need at least one particle");
  for (int i = 0; i < sites_; ++i)
    if (!(spec.interactions[i] < 0.0))
      throw std::invalid_argument("qmc: model one sampler needs U_i < 0 on every site");
  hopping_ = spec.hopping.cast<cplx>();
  u_ = spec.interactions;
}

QmcModel::QmcModel(const ModelTwoSpec& spec, int particles)
    : kind_(Kind::two), sites_(spec.sites()), particles_(particles) {
  validate_spec(spec);
  if (particles < 1) throw std::invalid_argument("qmc: need at least one particle");
  for (int i = 0; i < sites_; ++i) {
    if (!(spec.interactions_1[i] < 0.0)) throw std::invalid_argument("qmc: model two sampler needs U1_i < 0");
    if (!(spec.interactions_2[i] > 0.0)) throw std::invalid_argument("qmc: model two sampler needs U2_i > 0");
  }
  hopping_ = spec.hopping_b;
  u_ = spec.interactions_1;
  u2_ = spec.interactions_2;
}

Eigen::MatrixXcd QmcModel::hopping_propagator(double tau) const {
  const Eigen::MatrixXcd p = matrix_exponential(tau * hopping_);
  // Real hopping keeps walkers exactly real.
  if (kind_ == Kind::one) return p.real().cast<cplx>();
  return p;
}

Eigen::VectorXd QmcModel::field_widths(double tau) const {
  Eigen::VectorXd w(field_count());
  for (int i = 0; i < sites_; ++i) w[i] = std::sqrt(2.0 * tau * std::abs(u_[i]));
  if (kind_ == Kind::two)
    for (int i = 0; i < sites_; ++i) w[sites_ + i] = std::sqrt(2.0 * tau * u2_[i]);
  return w;
}

RankOneState QmcModel::trial() const {
  if (kind_ == Kind::one) return RankOneState::real(Eigen::VectorXd::Ones(sites_), particles_);
  return RankOneState::reflection(Eigen::VectorXcd::Ones(sites_), particles_);
}

cplx QmcModel::hamiltonian_element(const RankOneState& bra, const RankOneState& ket) const {
  const int l = sites_;
  const bool pairs = particles_ >= 2;
  cplx e(0.0);
  auto density_squared = [&](int mode) {
    cplx v = rank1_matrix_element(bra, ket, op::Number{mode});
    if (pairs) v += rank1_matrix_element(bra, ket, op::Pair{mode});
    return v;
  };

  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < l; ++j) {
      const cplx t = hopping_(i, j);
      if (t == cplx(0.0)) continue;
      e -= t * rank1_matrix_element(bra, ket, op::Hop{i, j});
      if (kind_ == Kind::two) e -= std::conj(t) * rank1_matrix_element(bra, ket, op::Hop{l + i, l + j});
    }
  }
  if (kind_ == Kind::one) {
    for (int i = 0; i < l; ++i) e += u_[i] * density_squared(i);
    return e;
  }
  // U1 (nb + nc)^2 + U2 (nb - nc)^2 = (U1 + U2)(nb^2 + nc^2) + 2 (U1 - U2) nb nc
  for (int i = 0; i < l; ++i) {
    e += (u_[i] + u2_[i]) * (density_squared(i) + density_squared(l + i));
    if (pairs) e += 2.0 * (u_[i] - u2_[i]) * rank1_matrix_element(bra, ket, op::Pair{i, l + i});
  }
  return e;
}

Rng walker_stream(std::uint64_t seed, std::uint64_t walker, std::uint64_t step) {
  return Rng(splitmix64(splitmix64(splitmix64(seed) ^ walker) ^ (step * 0xd1b54a32d192ed03ull)));
}

Rng resampling_stream(std::uint64_t seed, std::uint64_t step) { return walker_stream(seed, kResamplingTag, step); }

Walker apply_hopping(const Walker& walker, const QmcModel& model, const Eigen::MatrixXcd& propagator) {
  Walker out = walker;
  if (model.kind() == QmcModel::Kind::one) {
    out.state.psi = propagator * walker.state.psi;
  } else {
    const int l = model.sites();
    const Eigen::VectorXcd phi = propagator * walker.state.psi.head(l);
    out.state.psi.head(l) = phi;
    out.state.psi.tail(l) = phi.conjugate();
  }
  fold_norm(out);
  return out;
}

Walker propagate_hopping(const Walker& walker, const QmcModel& model, double tau) {
  return apply_hopping(walker, model, model.hopping_propagator(tau));
}

std::vector<double> draw_auxiliary_fields(const QmcModel& model, double tau, Rng& rng) {
  const Eigen::VectorXd widths = model.field_widths(tau);
  std::normal_distribution<double> gauss;
  std::vector<double> x(widths.size());
  for (Eigen::Index i = 0; i < widths.size(); ++i) x[i] = widths[i] * gauss(rng);
  return x;
}

Walker apply_auxiliary_fields(const Walker& walker, const QmcModel& model, std::span<const double> fields) {
  if (static_cast<int>(fields.size()) != model.field_count())
    throw std::invalid_argument("auxiliary field count does not match the model");
  Walker out = walker;
  const int l = model.sites();
  if (model.kind() == QmcModel::Kind::one) {
    for (int i = 0; i < l; ++i) out.state.psi[i] *= std::exp(-fields[i]);
  } else {
    for (int i = 0; i < l; ++i) {
      const cplx factor = std::exp(cplx(-fields[i], -fields[l + i]));
      out.state.psi[i] *= factor;
      out.state.psi[l + i] = std::conj(out.state.psi[i]);
    }
  }
  fold_norm(out);
  return out;
}

Walker sample_interaction(const Walker& walker, const QmcModel& model, double tau, Rng& rng) {
  const auto fields = draw_auxiliary_fields(model, tau, rng);
  return apply_auxiliary_fields(walker, model, fields);
}

EnergyEstimate mixed_energy_estimator(std::span<const Walker> walkers, const RankOneState& trial,
                                      const QmcModel& model) {
  if (walkers.empty()) throw DegenerateEnsemble("mixed estimator on an empty population");
  const std::size_t n = walkers.size();
  std::vector<double> num(n), den(n);
  double scale = 0.0;
  const double tnorm = trial.psi.norm();
  for (std::size_t k = 0; k < n; ++k) {
    const Walker& w = walkers[k];
    num[k] = w.weight * model.hamiltonian_element(trial, w.state).real();
    den[k] = w.weight * overlap_rank1(trial, w.state).real();
    scale += w.weight * factorial(w.state.particles) *
             std::pow(tnorm * w.state.psi.norm(), w.state.particles);
  }

  EnergyEstimate est;
  est.numerator = std::accumulate(num.begin(), num.end(), 0.0);
  est.denominator = std::accumulate(den.begin(), den.end(), 0.0);
  if (!(std::abs(est.denominator) > 1e-12 * scale))
    throw DegenerateEnsemble("mixed estimator denominator vanishes");
  est.energy = est.numerator / est.denominator;

  const std::size_t blocks = std::min<std::size_t>(16, n);
  if (blocks < 2) return est;
  std::vector<double> ratios;
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * n / blocks;
    const std::size_t hi = (b + 1) * n / blocks;
    const double bn = std::accumulate(num.begin() + lo, num.begin() + hi, 0.0);
    const double bd = std::accumulate(den.begin() + lo, den.begin() + hi, 0.0);
    if (bd > 0.0) ratios.push_back(bn / bd);
  }
  if (ratios.size() >= 2) {
    const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / ratios.size();
    double var = 0.0;
    for (double r : ratios) var += (r - mean) * (r - mean);
    var /= double(ratios.size() - 1);
    est.error = std::sqrt(var / double(ratios.size()));
  }
  return est;
}

std::vector<Walker> resample_population(std::span<const Walker> walkers, int target_count, Rng& rng) {
  if (target_count < 1) throw std::invalid_argument("resample: target count must be positive");
  double total = 0.0;
  for (const auto& w : walkers) {
    if (!(w.weight >= 0.0)) throw DegenerateEnsemble("resample: negative or NaN walker weight");
    total += w.weight;
  }
  if (!(total > 0.0) || !std::isfinite(total)) throw DegenerateEnsemble("resample: total weight is not positive");

  const double spacing = total / target_count;
  const double offset = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  std::vector<Walker> out;
  out.reserve(target_count);
  std::size_t idx = 0;
  double cumulative = walkers[0].weight;
  for (int k = 0; k < target_count; ++k) {
    const double tooth = (offset + k) * spacing;
    while (cumulative <= tooth && idx + 1 < walkers.size()) cumulative += walkers[++idx].weight;
    out.push_back({walkers[idx].state, spacing});
  }
  return out;
}

StepPropagators make_step_propagators(const QmcModel& model, const ProjectionSchedule& schedule) {
  return {model.hopping_propagator(schedule.tau()), model.hopping_propagator(0.5 * schedule.tau())};
}

void advance_walkers(std::vector<Walker>& walkers, const QmcModel& model, const ProjectionSchedule& schedule,
                     const StepPropagators& props, std::uint64_t seed, int step) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(walkers.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k)
    advance_one(walkers[k], model, schedule, props, seed, static_cast<std::uint64_t>(k), step);
}

void advance_walkers_serial(std::vector<Walker>& walkers, const QmcModel& model,
                            const ProjectionSchedule& schedule, const StepPropagators& props,
                            std::uint64_t seed, int step) {
  for (std::size_t k = 0; k < walkers.size(); ++k) advance_one(walkers[k], model, schedule, props, seed, k, step);
}

BlockingResult blocking_analysis(std::span<const double> samples) {
  BlockingResult r;
  if (samples.empty()) return r;
  std::vector<double> x(samples.begin(), samples.end());
  r.mean = std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());

  auto standard_error = [](const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    double var = 0.0;
    for (double s : v) var += (s - m) * (s - m);
    var /= double(v.size() - 1);
    return std::sqrt(var / double(v.size()));
  };

  r.error = standard_error(x);
  while (x.size() >= 16) {
    std::vector<double> next(x.size() / 2);
    for (std::size_t k = 0; k < next.size(); ++k) next[k] = 0.5 * (x[2 * k] + x[2 * k + 1]);
    x = std::move(next);
    ++r.levels;
    r.error = std::max(r.error, standard_error(x));
  }
  return r;
}

BlockingResult ratio_blocking_analysis(std::span<const double> numerators, std::span<const double> denominators) {
  if (numerators.size() != denominators.size()) throw std::invalid_argument("ratio blocking: length mismatch");
  BlockingResult r;
  if (numerators.empty()) return r;
  const double n = double(numerators.size());
  const double a = std::accumulate(numerators.begin(), numerators.end(), 0.0) / n;
  const double b = std::accumulate(denominators.begin(), denominators.end(), 0.0) / n;
  if (!(b > 0.0)) throw DegenerateEnsemble("ratio blocking: mean denominator is not positive");
  // Linearized residuals (a_t - R b_t) / <b> carry the variance of R = <a>/<b>.
  std::vector<double> residual(numerators.size());
  const double ratio = a / b;
  for (std::size_t t = 0; t < residual.size(); ++t) residual[t] = (numerators[t] - ratio * denominators[t]) / b;
  r = blocking_analysis(residual);
  r.mean = ratio;
  return r;
}

ProjectionResult run_projection(const QmcModel& model, const ProjectionSchedule& schedule, int walker_count,
                                std::uint64_t seed) {
  schedule.validate();
  if (walker_count < 1) throw std::invalid_argument("run_projection: need at least one walker");

  const StepPropagators props = make_step_propagators(model, schedule);
  const RankOneState trial = model.trial();
  const int particles = model.particles();
  const double tnorm = trial.psi.norm();

  ProjectionResult result;
  result.odd_particle_number = particles % 2 != 0;
  result.min_normalized_overlap = std::numeric_limits<double>::infinity();

  RankOneState start = trial;
  start.psi /= tnorm;
  std::vector<Walker> walkers(walker_count, Walker{start, 1.0});

  std::vector<double> used_num, used_den;
  for (int step = 1; step <= schedule.steps; ++step) {
    advance_walkers(walkers, model, schedule, props, seed, step);
    for (const auto& w : walkers)
      result.max_structure_defect = std::max(result.max_structure_defect, structure_defect(model, w.state));

    if (step % schedule.measure_interval != 0) continue;

    for (const auto& w : walkers) {
      const cplx ov = overlap_rank1(trial, w.state);
      const double scale = factorial(particles) * std::pow(tnorm * w.state.psi.norm(), particles);
      result.min_normalized_overlap = std::min(result.min_normalized_overlap, ov.real() / scale);
      if (ov.real() < -1e-12 * scale || std::abs(ov.imag()) > 1e-8 * scale) ++result.negative_overlaps;
    }
    if (result.negative_overlaps > 0)
      throw SignViolation("negative trial-walker overlap at step " + std::to_string(step));

    const EnergyEstimate est = mixed_energy_estimator(walkers, trial, model);
    double total = 0.0;
    for (const auto& w : walkers) total += w.weight;
    result.trace.push_back({step, est.energy, est.error, total});
    if (step > schedule.equilibration_steps) {
      used_num.push_back(est.numerator / total);
      used_den.push_back(est.denominator / total);
    }

    Rng rng = resampling_stream(seed, static_cast<std::uint64_t>(step));
    walkers = resample_population(walkers, walker_count, rng);
  }

  const BlockingResult b = ratio_blocking_analysis(used_num, used_den);
  result.energy = b.mean;
  result.error = b.error;
  result.measurements_used = static_cast<int>(used_num.size());
  return result;
}

ProjectionResult run_projection(const ModelOneSpec& spec, int particles, const ProjectionSchedule& schedule,
                                int walker_count, std::uint64_t seed) {
  const auto v = validate_spec(spec);
  if (!v.ok()) throw std::invalid_argument("run_projection: model one hypotheses violated: " + v.failures());
  return run_projection(QmcModel(spec, particles), schedule, walker_count, seed);
}

ProjectionResult run_projection(const ModelTwoSpec& spec, int particles, const ProjectionSchedule& schedule,
                                int walker_count, std::uint64_t seed) {
  const auto v = validate_spec(spec);
  if (!v.ok()) throw std::invalid_argument("run_projection: model two hypotheses violated: " + v.failures());
  return run_projection(QmcModel(spec, particles), schedule, walker_count, seed);
}

}  // namespace bhcone
