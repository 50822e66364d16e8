#include "bhcone/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "bhcone/eigensolver.hpp"
#include "bhcone/hamiltonian.hpp"
#include "bhcone/qmc.hpp"
#include "bhcone/verify.hpp"
#include "json.hpp"

namespace bhcone {

using ojson = nlohmann::ordered_json;

namespace {

constexpr int kEdLevels = 6;
constexpr int kSectorLevels = 4;
constexpr double kStructureTol = 1e-12;

// NaN and infinities are not JSON; they are written as null.
ojson num(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

ojson nums(const std::vector<double>& xs) {
  ojson a = ojson::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

ojson verdicts_json(const std::vector<Verdict>& verdicts) {
  ojson a = ojson::array();
  for (const auto& v : verdicts) a.push_back({{"claim", v.claim}, {"passed", v.passed}, {"detail", v.detail}});
  return a;
}

ojson header(Command command, const ExperimentConfig& config) {
  ojson h;
  h["schema_version"] = kReportSchemaVersion;
  h["command"] = to_string(command);
  h["config"] = ojson::parse(serialize_config(config));
  return h;
}

std::string csv_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CommandResult finish(ojson report, const std::vector<Verdict>& verdicts, std::string name,
                     std::vector<Artifact> extra = {}) {
  const bool ok = all_passed(verdicts);
  report["verdicts"] = verdicts_json(verdicts);
  report["passed"] = ok;
  CommandResult r;
  r.exit_status = ok ? kExitPassed : kExitVerdictFailed;
  r.artifacts.push_back({std::move(name), report.dump(2) + "\n"});
  for (auto& a : extra) r.artifacts.push_back(std::move(a));
  return r;
}

struct GlobalLevels {
  std::vector<SectorLevels> sectors;
  double ground = std::numeric_limits<double>::infinity();
  int n_b = 0;
  int n_c = 0;
  std::vector<double> all;  // every computed level, ascending
};

GlobalLevels model_two_levels(const ModelTwoSpec& spec, int particles, std::optional<int> sz2, std::uint64_t seed,
                              int levels) {
  GlobalLevels g;
  for (int n_b = particles; n_b >= 0; --n_b) {
    const int n_c = particles - n_b;
    if (sz2 && n_b - n_c != *sz2) continue;
    const auto spectrum = lowest_eigenpairs(build_model2_hamiltonian(spec, n_b, n_c), levels, seed);
    g.sectors.push_back({n_b, n_c, spectrum.eigenvalues});
    g.all.insert(g.all.end(), spectrum.eigenvalues.begin(), spectrum.eigenvalues.end());
    if (spectrum.eigenvalues.front() < g.ground) {
      g.ground = spectrum.eigenvalues.front();
      g.n_b = n_b;
      g.n_c = n_c;
    }
  }
  std::sort(g.all.begin(), g.all.end());
  return g;
}

CommandResult run_ed(const ExperimentConfig& c) {
  ojson report = header(Command::ed, c);
  if (c.model == ModelChoice::two) {
    const GlobalLevels g = model_two_levels(model_two_spec(c), c.particles, c.sz2, c.seed, kSectorLevels);
    const double tol = c.tolerances.degeneracy > 0.0 ? c.tolerances.degeneracy : default_degeneracy_tolerance(g.ground);
    ojson sectors = ojson::array();
    for (const auto& s : g.sectors)
      sectors.push_back({{"N_b", s.n_b}, {"N_c", s.n_c}, {"eigenvalues", nums(s.energies)}});
    const auto degeneracy =
        std::count_if(g.all.begin(), g.all.end(), [&](double e) { return e - g.ground <= tol; });
    report["ground_energy"] = num(g.ground);
    report["ground_sector"] = {{"N_b", g.n_b}, {"N_c", g.n_c}};
    report["gap"] = num(g.all.size() > 1 ? g.all[1] - g.all[0] : 0.0);
    report["degeneracy"] = degeneracy;
    report["degeneracy_tol"] = num(tol);
    report["sectors"] = sectors;
    return finish(std::move(report), {}, "ed.json");
  }

  const SparseOperator h = build_model1_hamiltonian(model_one_spec(c), c.particles);
  const SpectrumResult s = lowest_eigenpairs(h, kEdLevels, c.seed);
  const double e0 = s.eigenvalues.front();
  const double tol = c.tolerances.degeneracy > 0.0 ? c.tolerances.degeneracy : default_degeneracy_tolerance(e0);
  report["dimension"] = h.dimension();
  report["ground_energy"] = num(e0);
  report["gap"] = num(s.gap());
  report["degeneracy"] = degeneracy_count(s, tol).count;
  report["degeneracy_tol"] = num(tol);
  report["eigenvalues"] = nums(s.eigenvalues);
  report["residuals"] = nums(s.residuals);
  return finish(std::move(report), {}, "ed.json");
}

ojson theorem_json(const TheoremReport& t, bool two_component) {
  ojson j;
  j["ground_energy"] = num(t.ground_energy);
  j["gap"] = num(t.gap);
  j["degeneracy"] = t.degeneracy;
  j["degeneracy_tol"] = num(t.degeneracy_tol);
  j["sector_of_ground"] = t.sector_of_ground;
  j["s2_expectation"] = t.s2_expectation ? num(*t.s2_expectation) : ojson(nullptr);
  j["positivity_trials"] = t.positivity_trials;
  j["positivity_min_overlap"] = num(t.positivity_min_overlap);
  j["positivity_max_imaginary"] = num(t.positivity_max_imaginary);
  ojson sectors = ojson::array();
  for (const auto& s : t.sectors) {
    if (two_component)
      sectors.push_back({{"N_b", s.n_b}, {"N_c", s.n_c}, {"eigenvalues", nums(s.energies)}});
    else
      sectors.push_back({{"N", s.n_b + s.n_c}, {"eigenvalues", nums(s.energies)}});
  }
  j["sectors"] = sectors;
  return j;
}

CommandResult run_verify(const ExperimentConfig& c) {
  ojson report = header(Command::verify, c);
  TheoremOptions options;
  options.degeneracy_tol = c.tolerances.degeneracy;
  options.s2_tol = c.tolerances.s2;
  options.trials = c.tolerances.overlap_trials;
  options.seed = c.seed;

  if (c.model == ModelChoice::variant) {
    const VariantReport v =
        verify_variant_uniqueness(model_one_spec(c), c.particles, c.tolerances.dtau, c.tolerances.degeneracy);
    report["theorem"] = "variant";
    report["particles"] = v.particles;
    report["dtau"] = num(v.dtau);
    report["nonnegative"] = v.nonnegative;
    report["irreducible"] = v.irreducible;
    report["min_entry"] = num(v.min_entry);
    report["ground_energy"] = num(v.ground_energy);
    report["gap"] = num(v.gap);
    report["degeneracy"] = v.degeneracy;
    return finish(std::move(report), v.verdicts, "verify.json");
  }

  if (c.particles % 2 != 0)
    throw PreconditionError("uniqueness is asserted for even N = 2n only, got N = " + std::to_string(c.particles));
  const int n = c.particles / 2;

  if (c.model == ModelChoice::one) {
    const TheoremReport t = verify_theorem1(model_one_spec(c), n, options);
    report["theorem"] = "one";
    report["report"] = theorem_json(t, false);
    return finish(std::move(report), t.verdicts, "verify.json");
  }

  const ModelTwoSpec spec = model_two_spec(c);
  const TheoremReport t = verify_theorem2(spec, n, options);
  const SingletOverlapReport paired = verify_singlet_overlap(spec, n, c.tolerances.paired_overlap);
  report["theorem"] = "two";
  report["report"] = theorem_json(t, true);
  ojson overlaps = ojson::array();
  for (const auto& p : paired.overlaps)
    overlaps.push_back({{"pairs", p.pairs}, {"overlap", num(p.overlap)}, {"imaginary", num(p.imaginary)}});
  report["paired_overlaps"] = {{"max_overlap", num(paired.max_overlap)}, {"overlaps", overlaps}};

  std::vector<Verdict> verdicts = t.verdicts;
  verdicts.push_back({"paired_overlap_positive", paired.passed,
                      "max paired-state overlap " + csv_number(paired.max_overlap)});
  return finish(std::move(report), verdicts, "verify.json");
}

CommandResult run_qmc(const ExperimentConfig& c) {
  ojson report = header(Command::qmc, c);
  const ProjectionSchedule schedule = c.qmc.schedule();

  ProjectionResult r;
  double reference = 0.0;
  if (c.model == ModelChoice::two) {
    const ModelTwoSpec spec = model_two_spec(c);
    r = run_projection(spec, c.particles, schedule, c.qmc.walkers, c.seed);
    reference = model_two_levels(spec, c.particles, std::nullopt, c.seed, 1).ground;
  } else {
    const ModelOneSpec spec = model_one_spec(c);
    r = run_projection(spec, c.particles, schedule, c.qmc.walkers, c.seed);
    reference = lowest_eigenpairs(build_model1_hamiltonian(spec, c.particles), 1, c.seed).eigenvalues.front();
  }

  report["tau"] = num(schedule.tau());
  report["energy"] = num(r.energy);
  report["error"] = num(r.error);
  report["measurements_used"] = r.measurements_used;
  report["negative_overlaps"] = r.negative_overlaps;
  report["min_normalized_overlap"] = num(r.min_normalized_overlap);
  report["max_structure_defect"] = num(r.max_structure_defect);
  report["odd_particle_number"] = r.odd_particle_number;
  report["reference"] = {{"method", "exact diagonalization"},
                         {"energy", num(reference)},
                         {"z_score", num(r.error > 0.0 ? (r.energy - reference) / r.error : 0.0)}};

  const double structure_tol = c.model == ModelChoice::two ? kStructureTol : 0.0;
  std::vector<Verdict> verdicts{
      {"sign_free", r.negative_overlaps == 0, std::to_string(r.negative_overlaps) + " negative trial overlaps"},
      {"walker_structure", r.max_structure_defect <= structure_tol,
       "max structure defect " + csv_number(r.max_structure_defect)},
  };

  std::string trace(kTraceHeader);
  trace += "\n";
  for (const auto& row : r.trace)
    trace += std::to_string(row.step) + "," + csv_number(row.estimator) + "," + csv_number(row.block_error) + "," +
             csv_number(row.total_weight) + "\n";
  return finish(std::move(report), verdicts, "qmc_summary.json", {{"qmc_trace.csv", std::move(trace)}});
}

// Distinct values in order of first appearance.
std::vector<double> distinct(const std::vector<double>& xs) {
  std::vector<double> out;
  for (double x : xs)
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  return out;
}

CommandResult run_identities(const ExperimentConfig& c) {
  ojson report = header(Command::identities, c);
  const auto& id = c.identities;
  const int sites = c.lattice.sites;
  const bool two = c.model == ModelChoice::two;

  // (U, kind) pairs for the auxiliary-field identities
  std::vector<std::pair<double, HsKind>> couplings;
  if (two) {
    for (double u : distinct(c.u1)) couplings.emplace_back(u, HsKind::attractive);
    for (double u : distinct(c.u2)) couplings.emplace_back(u, HsKind::repulsive_imaginary);
  } else {
    for (double u : distinct(c.u))
      if (u != 0.0) couplings.emplace_back(u, u < 0.0 ? HsKind::attractive : HsKind::repulsive_imaginary);
  }

  bool hs_ok = true;
  double hs_worst = 0.0;
  ojson hs = ojson::array();
  for (const auto& [u, kind] : couplings) {
    const HsReport h = verify_hs_identity(u, id.hs_tau, id.n_max, kind, id.hs_tol);
    hs_ok = hs_ok && h.passed;
    hs_worst = std::max(hs_worst, h.max_relative_error);
    ojson rows = ojson::array();
    for (const auto& row : h.rows)
      rows.push_back({{"n", row.n},
                      {"closed_form", num(row.closed_form)},
                      {"quadrature", num(row.quadrature)},
                      {"imaginary", num(row.imaginary)},
                      {"relative_error", num(row.relative_error)}});
    hs.push_back({{"U", num(u)},
                  {"kind", kind == HsKind::attractive ? "attractive" : "repulsive_imaginary"},
                  {"tau", num(h.tau)},
                  {"max_relative_error", num(h.max_relative_error)},
                  {"converged", h.converged},
                  {"passed", h.passed},
                  {"rows", rows}});
  }
  report["hs"] = hs;

  const HamiltonianParts parts =
      two ? model2_parts_full(model_two_spec(c), c.particles) : model1_parts(model_one_spec(c), c.particles);
  const TrotterReport trotter = verify_trotter_scaling(parts, id.trotter_beta, id.trotter_steps);
  std::string sweep(kTrotterHeader);
  sweep += "\n";
  ojson trotter_rows = ojson::array();
  for (const auto& row : trotter.rows) {
    sweep += std::to_string(row.steps) + "," + csv_number(row.tau) + "," + csv_number(row.error) + "\n";
    trotter_rows.push_back({{"steps", row.steps}, {"tau", num(row.tau)}, {"error", num(row.error)}});
  }
  report["trotter"] = {{"beta", num(trotter.beta)},
                       {"slope", num(trotter.slope)},
                       {"slope_window", {kTrotterSlopeLow, kTrotterSlopeHigh}},
                       {"exact_splitting", trotter.exact_splitting},
                       {"passed", trotter.passed},
                       {"rows", trotter_rows}};

  // prefactor: number of terms the projector factor is split into
  const int prefactor = two ? 2 * sites + 1 : sites + 1;
  bool split_ok = true;
  ojson split = ojson::array();
  for (const auto& [u, kind] : couplings) {
    const SplitReport s = verify_split_identity(u, id.split_dtau, prefactor, id.n_max);
    split_ok = split_ok && s.passed;
    split.push_back({{"U", num(u)},
                     {"prefactor", s.prefactor},
                     {"dtaus", nums(s.dtaus)},
                     {"deviations", nums(s.deviations)},
                     {"ratios", nums(s.ratios)},
                     {"fitted_c", num(s.fitted_c)},
                     {"passed", s.passed}});
  }
  report["split"] = split;

  const int modes = two ? 2 * sites : sites;
  const ExpQuadraticReport eq = verify_exp_quadratic(modes, c.particles, id.exp_trials, c.seed, id.exp_tol);
  report["exp_quadratic"] = {{"modes", eq.modes},
                             {"particles", eq.particles},
                             {"trials", eq.trials},
                             {"max_error", num(eq.max_error)},
                             {"passed", eq.passed}};

  std::vector<Verdict> verdicts{
      {"hs_identity", hs_ok, std::to_string(couplings.size()) + " couplings, max relative error " + csv_number(hs_worst)},
      {"trotter_slope", trotter.passed, "slope " + csv_number(trotter.slope)},
      {"split_identity", split_ok, "dtau^2 ratio test over " + std::to_string(split.size()) + " couplings"},
      {"exp_quadratic", eq.passed, "max error " + csv_number(eq.max_error)},
  };
  return finish(std::move(report), verdicts, "identities.json", {{"trotter_sweep.csv", std::move(sweep)}});
}

std::string_view error_kind(const std::exception& e) {
  if (dynamic_cast<const PreconditionError*>(&e)) return "precondition";
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const SectorTooLarge*>(&e)) return "size";
  if (dynamic_cast<const SignViolation*>(&e)) return "sign_violation";
  if (dynamic_cast<const DegenerateEnsemble*>(&e)) return "degenerate_ensemble";
  if (dynamic_cast<const LanczosNonConvergence*>(&e)) return "nonconvergence";
  if (dynamic_cast<const StructuralError*>(&e)) return "structural";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "invalid_argument";
  return "runtime";
}

}  // namespace

Command parse_command(std::string_view name) {
  if (name == "ed") return Command::ed;
  if (name == "verify") return Command::verify;
  if (name == "qmc") return Command::qmc;
  if (name == "identities") return Command::identities;
  throw std::invalid_argument("unknown command '" + std::string(name) + "'");
}

std::string_view to_string(Command c) {
  switch (c) {
    case Command::ed: return "ed";
    case Command::verify: return "verify";
    case Command::qmc: return "qmc";
    case Command::identities: return "identities";
  }
  return "?";
}

const Artifact* CommandResult::find(std::string_view name) const {
  for (const auto& a : artifacts)
    if (a.name == name) return &a;
  return nullptr;
}

CommandResult error_result(std::string_view command, std::string_view kind, const std::string& message,
                           const std::vector<std::string>& details) {
  ojson report;
  report["schema_version"] = kReportSchemaVersion;
  report["command"] = command;
  report["error"] = {{"kind", kind}, {"message", message}, {"details", details}};
  report["passed"] = false;
  CommandResult r;
  r.exit_status = kExitError;
  r.artifacts.push_back({"error.json", report.dump(2) + "\n"});
  return r;
}

CommandResult run_command(Command command, const ExperimentConfig& config) {
  try {
    validate_config(config);
    switch (command) {
      case Command::ed: return run_ed(config);
      case Command::verify: return run_verify(config);
      case Command::qmc: return run_qmc(config);
      case Command::identities: return run_identities(config);
    }
  } catch (const ConfigError& e) {
    return error_result(to_string(command), "config", e.what(), e.errors());
  } catch (const std::exception& e) {
    CommandResult r = error_result(to_string(command), error_kind(e), e.what());
    // keep the resolved config next to the error for provenance
    ojson report = ojson::parse(r.artifacts.front().content);
    report["config"] = ojson::parse(serialize_config(config));
    r.artifacts.front().content = report.dump(2) + "\n";
    return r;
  }
  return error_result(to_string(command), "runtime", "unhandled command");
}

void emit_report(const CommandResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ReportWriteError("cannot create output directory '" + dir.string() + "': " + ec.message());
  for (const auto& a : result.artifacts) {
    const auto path = dir / a.name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ReportWriteError("cannot open '" + path.string() + "' for writing");
    out << a.content;
    out.flush();
    if (!out) throw ReportWriteError("failed writing '" + path.string() + "'");
  }
}

}  // namespace bhcone
