#include "bhcone/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace bhcone {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
  return out;
}

std::string child(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string index(const std::string& path, std::size_t k) { return path + "[" + std::to_string(k) + "]"; }

// Walks a parsed document, collecting every problem with its field path.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  bool object(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) {
      fail(path.empty() ? "$" : path, "expected an object");
      return false;
    }
    for (const auto& [key, _] : j.items()) {
      bool known = false;
      for (auto a : allowed) known = known || key == a;
      if (!known) fail(child(path, key), "unknown key");
    }
    return true;
  }

  const json* find(const json& obj, const std::string& path, std::string_view key, bool required) {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) {
      if (required) fail(child(path, key), "missing required key");
      return nullptr;
    }
    return &*it;
  }

  void number(const json& v, const std::string& path, double& out) {
    if (!v.is_number()) return fail(path, "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) fail(path, "must be finite");
  }

  void integer(const json& v, const std::string& path, int& out) {
    if (!v.is_number_integer()) return fail(path, "expected an integer");
    const auto x = v.get<long long>();
    if (x < -1'000'000'000LL || x > 1'000'000'000LL) return fail(path, "integer out of range");
    out = static_cast<int>(x);
  }

  void text(const json& v, const std::string& path, std::string& out) {
    if (!v.is_string()) return fail(path, "expected a string");
    out = v.get<std::string>();
  }

  template <class T, class F>
  void field(const json& obj, const std::string& path, std::string_view key, T& out, F read,
             bool required = false) {
    if (const json* v = find(obj, path, key, required)) (this->*read)(*v, child(path, key), out);
  }

  // scalar broadcast to every site, or one value per site
  void per_site(const json& v, const std::string& path, std::vector<double>& out, int sites) {
    out.clear();
    if (v.is_array()) {
      for (std::size_t k = 0; k < v.size(); ++k) {
        double x = 0.0;
        number(v[k], index(path, k), x);
        out.push_back(x);
      }
      if (sites > 0 && static_cast<int>(out.size()) != sites)
        fail(path, "has " + std::to_string(out.size()) + " entries for " + std::to_string(sites) + " sites");
      return;
    }
    double x = 0.0;
    number(v, path, x);
    out.assign(std::max(sites, 0), x);
  }
};

void read_lattice(Reader& r, const json& j, LatticeConfig& lat) {
  const std::string path = "lattice";
  if (!r.object(j, path, {"kind", "sites", "t", "t_im", "bonds"})) return;
  r.field(j, path, "sites", lat.sites, &Reader::integer, true);

  const bool has_kind = j.contains("kind");
  const bool has_bonds = j.contains("bonds");
  if (has_kind == has_bonds) {
    r.fail(path, "exactly one of 'kind' and 'bonds' must be given");
  }
  if (has_kind) {
    std::string name;
    r.text(j["kind"], "lattice.kind", name);
    if (!name.empty()) {
      try {
        lat.kind = parse_lattice_kind(name);
      } catch (const std::exception&) {
        r.fail("lattice.kind", "unknown lattice kind '" + name + "' (chain, ring, complete)");
      }
    }
  } else if (j.contains("t") || j.contains("t_im")) {
    r.fail(path, "'t' and 't_im' only apply with 'kind'");
  }
  r.field(j, path, "t", lat.t, &Reader::number);
  r.field(j, path, "t_im", lat.t_im, &Reader::number);

  if (has_bonds) {
    const json& b = j["bonds"];
    if (!b.is_array()) return r.fail("lattice.bonds", "expected an array of [i, j, re, im]");
    for (std::size_t k = 0; k < b.size(); ++k) {
      const std::string p = index("lattice.bonds", k);
      if (!b[k].is_array() || b[k].size() < 3 || b[k].size() > 4) {
        r.fail(p, "expected [i, j, re] or [i, j, re, im]");
        continue;
      }
      BondEntry e;
      r.integer(b[k][0], index(p, 0), e.i);
      r.integer(b[k][1], index(p, 1), e.j);
      r.number(b[k][2], index(p, 2), e.re);
      if (b[k].size() == 4) r.number(b[k][3], index(p, 3), e.im);
      lat.bonds.push_back(e);
    }
  }
}

void read_interactions(Reader& r, const json& j, ExperimentConfig& c) {
  const std::string path = "interactions";
  const int sites = c.lattice.sites;
  if (c.model == ModelChoice::two) {
    if (!r.object(j, path, {"U1", "U2"})) return;
    if (const json* v = r.find(j, path, "U1", true)) r.per_site(*v, "interactions.U1", c.u1, sites);
    if (const json* v = r.find(j, path, "U2", true)) r.per_site(*v, "interactions.U2", c.u2, sites);
  } else {
    if (!r.object(j, path, {"U"})) return;
    if (const json* v = r.find(j, path, "U", true)) r.per_site(*v, "interactions.U", c.u, sites);
  }
}

void read_sector(Reader& r, const json& j, ExperimentConfig& c) {
  if (!r.object(j, "sector", {"N", "Sz"})) return;
  r.field(j, "sector", "N", c.particles, &Reader::integer, true);
  if (const json* v = r.find(j, "sector", "Sz", false)) {
    double sz = 0.0;
    r.number(*v, "sector.Sz", sz);
    if (std::abs(2.0 * sz - std::round(2.0 * sz)) > 0.0)
      r.fail("sector.Sz", "must be a multiple of 1/2");
    else
      c.sz2 = static_cast<int>(std::lround(2.0 * sz));
  }
}

void read_tolerances(Reader& r, const json& j, ToleranceConfig& t) {
  const std::string p = "tolerances";
  if (!r.object(j, p, {"degeneracy", "s2", "overlap_trials", "dtau", "paired_overlap"})) return;
  r.field(j, p, "degeneracy", t.degeneracy, &Reader::number);
  r.field(j, p, "s2", t.s2, &Reader::number);
  r.field(j, p, "overlap_trials", t.overlap_trials, &Reader::integer);
  r.field(j, p, "dtau", t.dtau, &Reader::number);
  r.field(j, p, "paired_overlap", t.paired_overlap, &Reader::number);
}

void read_qmc(Reader& r, const json& j, QmcConfig& q) {
  const std::string p = "qmc";
  if (!r.object(j, p, {"beta", "M", "walkers", "measure_interval", "equilibration_steps", "splitting"})) return;
  r.field(j, p, "beta", q.beta, &Reader::number);
  r.field(j, p, "M", q.steps, &Reader::integer);
  r.field(j, p, "walkers", q.walkers, &Reader::integer);
  r.field(j, p, "measure_interval", q.measure_interval, &Reader::integer);
  r.field(j, p, "equilibration_steps", q.equilibration_steps, &Reader::integer);
  if (const json* v = r.find(j, p, "splitting", false)) {
    std::string name;
    r.text(*v, "qmc.splitting", name);
    try {
      q.splitting = parse_splitting(name);
    } catch (const std::exception&) {
      r.fail("qmc.splitting", "unknown splitting '" + name + "' (first_order, symmetric)");
    }
  }
}

void read_identities(Reader& r, const json& j, IdentityConfig& d) {
  const std::string p = "identities";
  if (!r.object(j, p,
                {"hs_tau", "n_max", "hs_tol", "trotter_beta", "trotter_steps", "split_dtau", "exp_trials",
                 "exp_tol"}))
    return;
  r.field(j, p, "hs_tau", d.hs_tau, &Reader::number);
  r.field(j, p, "n_max", d.n_max, &Reader::integer);
  r.field(j, p, "hs_tol", d.hs_tol, &Reader::number);
  r.field(j, p, "trotter_beta", d.trotter_beta, &Reader::number);
  if (const json* v = r.find(j, p, "trotter_steps", false)) {
    if (!v->is_array()) {
      r.fail("identities.trotter_steps", "expected an array of integers");
    } else {
      d.trotter_steps.clear();
      for (std::size_t k = 0; k < v->size(); ++k) {
        int m = 0;
        r.integer((*v)[k], index("identities.trotter_steps", k), m);
        d.trotter_steps.push_back(m);
      }
    }
  }
  r.field(j, p, "split_dtau", d.split_dtau, &Reader::number);
  r.field(j, p, "exp_trials", d.exp_trials, &Reader::integer);
  r.field(j, p, "exp_tol", d.exp_tol, &Reader::number);
}

void check_lattice(const ExperimentConfig& c, std::vector<std::string>& errors) {
  const auto& lat = c.lattice;
  const bool real_only = c.model != ModelChoice::two;
  if (lat.sites < 1) {
    errors.push_back("lattice.sites: must be at least 1");
    return;
  }
  if (lat.kind && !lat.bonds.empty()) errors.push_back("lattice: exactly one of 'kind' and 'bonds' must be given");
  if (lat.kind) {
    if (lat.sites >= 2 && lat.t == 0.0 && lat.t_im == 0.0) errors.push_back("lattice.t: must be nonzero");
    if (real_only && lat.t_im != 0.0) errors.push_back("lattice.t_im: hopping must be real for this model");
    return;
  }
  std::set<std::pair<int, int>> seen;
  for (std::size_t k = 0; k < lat.bonds.size(); ++k) {
    const auto& b = lat.bonds[k];
    const std::string p = index("lattice.bonds", k);
    bool in_range = true;
    for (int s : {b.i, b.j}) {
      if (s < 1 || s > lat.sites) {
        errors.push_back(p + ": site " + std::to_string(s) + " outside [1, " + std::to_string(lat.sites) + "]");
        in_range = false;
      }
    }
    if (!in_range) continue;
    if (!seen.insert({std::min(b.i, b.j), std::max(b.i, b.j)}).second)
      errors.push_back(p + ": repeats bond (" + std::to_string(b.i) + ", " + std::to_string(b.j) + ")");
    if (b.im != 0.0 && (real_only || b.i == b.j))
      errors.push_back(p + ": imaginary part must be zero" +
                       std::string(b.i == b.j ? " on the diagonal" : " for this model"));
  }
}

void check_sites(const std::vector<double>& v, const std::string& path, int sites, int sign,
                 std::vector<std::string>& errors) {
  if (static_cast<int>(v.size()) != sites) {
    errors.push_back(path + ": expected " + std::to_string(sites) + " values, got " + std::to_string(v.size()));
    return;
  }
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!std::isfinite(v[k])) errors.push_back(index(path, k) + ": must be finite");
    else if (sign < 0 && !(v[k] < 0.0)) errors.push_back(index(path, k) + ": must be negative");
    else if (sign > 0 && !(v[k] > 0.0)) errors.push_back(index(path, k) + ": must be positive");
  }
}

void positive(double x, const std::string& path, std::vector<std::string>& errors) {
  if (!(x > 0.0) || !std::isfinite(x)) errors.push_back(path + ": must be positive");
}

void at_least(int x, int lo, const std::string& path, std::vector<std::string>& errors) {
  if (x < lo) errors.push_back(path + ": must be at least " + std::to_string(lo));
}

std::vector<std::string> structural_errors(const ExperimentConfig& c) {
  std::vector<std::string> e;
  if (c.schema_version != kConfigSchemaVersion)
    e.push_back("schema_version: unsupported version " + std::to_string(c.schema_version));
  check_lattice(c, e);
  const int sites = c.lattice.sites;
  if (sites >= 1) {
    switch (c.model) {
      case ModelChoice::one:
        check_sites(c.u, "interactions.U", sites, -1, e);
        break;
      case ModelChoice::variant:
        check_sites(c.u, "interactions.U", sites, 0, e);
        break;
      case ModelChoice::two:
        check_sites(c.u1, "interactions.U1", sites, -1, e);
        check_sites(c.u2, "interactions.U2", sites, +1, e);
        break;
    }
  }
  if (c.model != ModelChoice::two && (!c.u1.empty() || !c.u2.empty()))
    e.push_back("interactions: U1/U2 only apply to model two");
  if (c.model == ModelChoice::two && !c.u.empty()) e.push_back("interactions: U only applies to models one and variant");

  at_least(c.particles, 1, "sector.N", e);
  if (c.sz2) {
    if (c.model != ModelChoice::two)
      e.push_back("sector.Sz: only model two has a spin sector");
    else if (std::abs(*c.sz2) > c.particles || (c.particles - *c.sz2) % 2 != 0)
      e.push_back("sector.Sz: incompatible with N = " + std::to_string(c.particles));
  }

  const auto& t = c.tolerances;
  if (!(t.degeneracy >= 0.0)) e.push_back("tolerances.degeneracy: must be nonnegative");
  positive(t.s2, "tolerances.s2", e);
  at_least(t.overlap_trials, 1, "tolerances.overlap_trials", e);
  positive(t.dtau, "tolerances.dtau", e);
  if (!(t.paired_overlap >= 0.0)) e.push_back("tolerances.paired_overlap: must be nonnegative");

  const auto& q = c.qmc;
  positive(q.beta, "qmc.beta", e);
  at_least(q.steps, 1, "qmc.M", e);
  at_least(q.walkers, 1, "qmc.walkers", e);
  at_least(q.measure_interval, 1, "qmc.measure_interval", e);
  at_least(q.equilibration_steps, 0, "qmc.equilibration_steps", e);
  if (q.steps >= 1 && q.measure_interval >= 1 && q.equilibration_steps >= 0 &&
      (q.steps / q.measure_interval) * q.measure_interval <= q.equilibration_steps)
    e.push_back("qmc.equilibration_steps: no measurement falls after equilibration");

  const auto& d = c.identities;
  positive(d.hs_tau, "identities.hs_tau", e);
  at_least(d.n_max, 1, "identities.n_max", e);
  positive(d.hs_tol, "identities.hs_tol", e);
  positive(d.trotter_beta, "identities.trotter_beta", e);
  if (d.trotter_steps.size() < 2) e.push_back("identities.trotter_steps: need at least two step counts");
  for (std::size_t k = 0; k < d.trotter_steps.size(); ++k)
    at_least(d.trotter_steps[k], 1, index("identities.trotter_steps", k), e);
  positive(d.split_dtau, "identities.split_dtau", e);
  at_least(d.exp_trials, 1, "identities.exp_trials", e);
  positive(d.exp_tol, "identities.exp_tol", e);

  if (c.output_dir.empty()) e.push_back("outputs.dir: must not be empty");
  return e;
}

}  // namespace

ModelChoice parse_model_choice(std::string_view name) {
  if (name == "one") return ModelChoice::one;
  if (name == "two") return ModelChoice::two;
  if (name == "variant") return ModelChoice::variant;
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

std::string_view to_string(ModelChoice m) {
  switch (m) {
    case ModelChoice::one: return "one";
    case ModelChoice::two: return "two";
    case ModelChoice::variant: return "variant";
  }
  return "?";
}

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error("invalid config: " + join(errors)), errors_(std::move(errors)) {}

ProjectionSchedule QmcConfig::schedule() const {
  ProjectionSchedule s;
  s.beta = beta;
  s.steps = steps;
  s.equilibration_steps = equilibration_steps;
  s.measure_interval = measure_interval;
  s.splitting = splitting;
  return s;
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("$: ") + e.what()});
  }

  Reader r;
  ExperimentConfig c;
  if (!r.object(doc, "",
                {"schema_version", "model", "lattice", "interactions", "sector", "tolerances", "qmc", "identities",
                 "seed", "outputs"}))
    throw ConfigError(r.errors);

  r.field(doc, "", "schema_version", c.schema_version, &Reader::integer);
  if (const json* v = r.find(doc, "", "model", true)) {
    std::string name;
    r.text(*v, "model", name);
    try {
      c.model = parse_model_choice(name);
    } catch (const std::exception&) {
      r.fail("model", "unknown model '" + name + "' (one, two, variant)");
    }
  }
  if (const json* v = r.find(doc, "", "lattice", true)) read_lattice(r, *v, c.lattice);
  if (const json* v = r.find(doc, "", "interactions", true)) read_interactions(r, *v, c);
  if (const json* v = r.find(doc, "", "sector", true)) read_sector(r, *v, c);
  if (const json* v = r.find(doc, "", "tolerances", false)) read_tolerances(r, *v, c.tolerances);
  if (const json* v = r.find(doc, "", "qmc", false)) read_qmc(r, *v, c.qmc);
  if (const json* v = r.find(doc, "", "identities", false)) read_identities(r, *v, c.identities);
  if (const json* v = r.find(doc, "", "seed", false)) {
    if (!v->is_number_unsigned())
      r.fail("seed", "expected a nonnegative integer");
    else
      c.seed = v->get<std::uint64_t>();
  }
  if (const json* v = r.find(doc, "", "outputs", false)) {
    if (r.object(*v, "outputs", {"dir"})) r.field(*v, "outputs", "dir", c.output_dir, &Reader::text);
  }

  // type errors first; range checks would only repeat them
  if (!r.errors.empty()) throw ConfigError(r.errors);
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"$: cannot read config file '" + path + "'"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const ExperimentConfig& config) {
  auto errors = structural_errors(config);
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

std::string serialize_config(const ExperimentConfig& c) {
  ojson doc;
  doc["schema_version"] = c.schema_version;
  doc["model"] = to_string(c.model);

  ojson lat;
  if (c.lattice.kind) {
    lat["kind"] = to_string(*c.lattice.kind);
    lat["sites"] = c.lattice.sites;
    lat["t"] = c.lattice.t;
    lat["t_im"] = c.lattice.t_im;
  } else {
    lat["sites"] = c.lattice.sites;
    lat["bonds"] = ojson::array();
    for (const auto& b : c.lattice.bonds) lat["bonds"].push_back({b.i, b.j, b.re, b.im});
  }
  doc["lattice"] = lat;

  ojson inter;
  if (c.model == ModelChoice::two) {
    inter["U1"] = c.u1;
    inter["U2"] = c.u2;
  } else {
    inter["U"] = c.u;
  }
  doc["interactions"] = inter;

  ojson sector;
  sector["N"] = c.particles;
  if (c.sz2) sector["Sz"] = 0.5 * *c.sz2;
  doc["sector"] = sector;

  const auto& t = c.tolerances;
  doc["tolerances"] = {{"degeneracy", t.degeneracy},
                       {"s2", t.s2},
                       {"overlap_trials", t.overlap_trials},
                       {"dtau", t.dtau},
                       {"paired_overlap", t.paired_overlap}};
  const auto& q = c.qmc;
  doc["qmc"] = {{"beta", q.beta},
                {"M", q.steps},
                {"walkers", q.walkers},
                {"measure_interval", q.measure_interval},
                {"equilibration_steps", q.equilibration_steps},
                {"splitting", to_string(q.splitting)}};
  const auto& d = c.identities;
  doc["identities"] = {{"hs_tau", d.hs_tau},
                       {"n_max", d.n_max},
                       {"hs_tol", d.hs_tol},
                       {"trotter_beta", d.trotter_beta},
                       {"trotter_steps", d.trotter_steps},
                       {"split_dtau", d.split_dtau},
                       {"exp_trials", d.exp_trials},
                       {"exp_tol", d.exp_tol}};
  doc["seed"] = c.seed;
  doc["outputs"] = {{"dir", c.output_dir}};
  return doc.dump(2) + "\n";
}

Eigen::MatrixXcd config_hopping(const ExperimentConfig& c) {
  const int L = c.lattice.sites;
  if (c.lattice.kind) return standard_hopping(*c.lattice.kind, L, cplx(c.lattice.t, c.lattice.t_im));
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(L, L);
  for (const auto& b : c.lattice.bonds) {
    const cplx v(b.re, b.im);
    t(b.i - 1, b.j - 1) = v;
    t(b.j - 1, b.i - 1) = std::conj(v);
  }
  return t;
}

ModelOneSpec model_one_spec(const ExperimentConfig& c) {
  if (c.model == ModelChoice::two) throw std::invalid_argument("config describes model two");
  ModelOneSpec spec;
  spec.hopping = config_hopping(c).real();
  spec.interactions = Eigen::Map<const Eigen::VectorXd>(c.u.data(), static_cast<Eigen::Index>(c.u.size()));
  return spec;
}

ModelTwoSpec model_two_spec(const ExperimentConfig& c) {
  if (c.model != ModelChoice::two) throw std::invalid_argument("config does not describe model two");
  ModelTwoSpec spec;
  spec.hopping_b = config_hopping(c);
  spec.interactions_1 = Eigen::Map<const Eigen::VectorXd>(c.u1.data(), static_cast<Eigen::Index>(c.u1.size()));
  spec.interactions_2 = Eigen::Map<const Eigen::VectorXd>(c.u2.data(), static_cast<Eigen::Index>(c.u2.size()));
  return spec;
}

}  // namespace bhcone
