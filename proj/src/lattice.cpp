#include "bhcone/lattice.hpp"

#include <queue>

namespace bhcone {

namespace {

template <typename Matrix>
bool connected_impl(const Matrix& hopping) {
  const Eigen::Index n = hopping.rows();
  if (n <= 1) return true;
  std::vector<bool> seen(n, false);
  std::queue<Eigen::Index> frontier;
  frontier.push(0);
  seen[0] = true;
  Eigen::Index reached = 1;
  while (!frontier.empty()) {
    const Eigen::Index i = frontier.front();
    frontier.pop();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i || seen[j]) continue;
      if (std::abs(hopping(i, j)) > 0.0 || std::abs(hopping(j, i)) > 0.0) {
        seen[j] = true;
        ++reached;
        frontier.push(j);
      }
    }
  }
  return reached == n;
}

void require_shape(bool ok, const std::string& what) {
  if (!ok) throw StructuralError(what);
}

CheckResult connectivity_check(bool connected) {
  return {"connected", connected,
          connected ? "bond graph is connected" : "bond graph is disconnected"};
}

}  // namespace

bool ModelTwoSpec::has_real_hopping() const {
  return hopping_b.imag().cwiseAbs().maxCoeff() == 0.0;
}

bool ValidationReport::ok() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

const CheckResult* ValidationReport::find(std::string_view name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string ValidationReport::failures() const {
  std::string out;
  for (const auto& c : checks) {
    if (c.passed) continue;
    if (!out.empty()) out += ", ";
    out += c.name;
  }
  return out;
}

bool bonds_connected(const Eigen::MatrixXcd& hopping) {
  return connected_impl(hopping);
}

bool bonds_connected(const Eigen::MatrixXd& hopping) {
  return connected_impl(hopping);
}

ValidationReport validate_spec(const ModelOneSpec& spec) {
  const Eigen::Index n = spec.interactions.size();
  require_shape(n >= 1, "model one: at least one site required");
  require_shape(spec.hopping.rows() == n && spec.hopping.cols() == n,
                "model one: hopping must be L x L with L = interactions size");

  ValidationReport report;
  const double asym = (spec.hopping - spec.hopping.transpose()).cwiseAbs().maxCoeff();
  report.checks.push_back({"hopping_symmetric", asym == 0.0,
                           "max |t_ij - t_ji| = " + std::to_string(asym)});

  bool attractive = true;
  for (Eigen::Index i = 0; i < n; ++i) attractive = attractive && spec.interactions[i] < 0.0;
  report.checks.push_back({"interaction_sign", attractive,
                           attractive ? "U_i < 0 on every site" : "some U_i >= 0"});
  report.checks.push_back(connectivity_check(bonds_connected(spec.hopping)));
  return report;
}

ValidationReport validate_spec(const ModelTwoSpec& spec) {
  const Eigen::Index n = spec.interactions_1.size();
  require_shape(n >= 1, "model two: at least one site required");
  require_shape(spec.interactions_2.size() == n,
                "model two: interactions_1 and interactions_2 differ in length");
  require_shape(spec.hopping_b.rows() == n && spec.hopping_b.cols() == n,
                "model two: hopping_b must be L x L");

  ValidationReport report;
  const double defect = (spec.hopping_b - spec.hopping_b.adjoint()).cwiseAbs().maxCoeff();
  report.checks.push_back({"hopping_hermitian", defect == 0.0,
                           "max |t_ij - conj(t_ji)| = " + std::to_string(defect)});

  bool u1_ok = true;
  bool u2_ok = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    u1_ok = u1_ok && spec.interactions_1[i] < 0.0;
    u2_ok = u2_ok && spec.interactions_2[i] > 0.0;
  }
  report.checks.push_back({"interaction_sign", u1_ok && u2_ok,
                           std::string(u1_ok ? "" : "some U1_i >= 0; ") +
                               (u2_ok ? "" : "some U2_i <= 0")});
  report.checks.push_back(connectivity_check(bonds_connected(spec.hopping_b)));
  return report;
}

ValidationReport validate_variant_spec(const ModelOneSpec& spec) {
  const Eigen::Index n = spec.interactions.size();
  require_shape(n >= 1, "variant: at least one site required");
  require_shape(spec.hopping.rows() == n && spec.hopping.cols() == n,
                "variant: hopping must be L x L with L = interactions size");

  ValidationReport report;
  const double asym = (spec.hopping - spec.hopping.transpose()).cwiseAbs().maxCoeff();
  report.checks.push_back({"hopping_symmetric", asym == 0.0,
                           "max |t_ij - t_ji| = " + std::to_string(asym)});
  const double min_t = spec.hopping.minCoeff();
  report.checks.push_back({"hopping_nonnegative", min_t >= 0.0,
                           "min t_ij = " + std::to_string(min_t)});
  report.checks.push_back(connectivity_check(bonds_connected(spec.hopping)));
  return report;
}

LatticeKind parse_lattice_kind(std::string_view name) {
  if (name == "chain") return LatticeKind::chain;
  if (name == "ring") return LatticeKind::ring;
  if (name == "complete") return LatticeKind::complete;
  throw std::invalid_argument("unknown lattice kind '" + std::string(name) + "'");
}

std::string_view to_string(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::chain: return "chain";
    case LatticeKind::ring: return "ring";
    case LatticeKind::complete: return "complete";
  }
  return "chain";
}

Eigen::MatrixXcd standard_hopping(LatticeKind kind, int sites, cplx t) {
  if (sites < 1) throw std::invalid_argument("lattice needs at least one site");
  if (sites >= 2 && t == cplx(0.0)) throw std::invalid_argument("zero hopping disconnects the lattice");

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(sites, sites);
  auto bond = [&](int i, int j) {
    h(i, j) = t;
    h(j, i) = std::conj(t);
  };
  switch (kind) {
    case LatticeKind::chain:
      for (int i = 0; i + 1 < sites; ++i) bond(i, i + 1);
      break;
    case LatticeKind::ring:
      for (int i = 0; i + 1 < sites; ++i) bond(i, i + 1);
      if (sites > 2) bond(sites - 1, 0);
      break;
    case LatticeKind::complete:
      for (int i = 0; i < sites; ++i)
        for (int j = i + 1; j < sites; ++j) bond(i, j);
      break;
  }
  return h;
}

ModelOneSpec build_model_one(LatticeKind kind, int sites, double t, double u) {
  ModelOneSpec spec;
  spec.hopping = standard_hopping(kind, sites, t).real();
  spec.interactions = Eigen::VectorXd::Constant(sites, u);
  return spec;
}

ModelTwoSpec build_model_two(LatticeKind kind, int sites, cplx t, double u1, double u2) {
  ModelTwoSpec spec;
  spec.hopping_b = standard_hopping(kind, sites, t);
  spec.interactions_1 = Eigen::VectorXd::Constant(sites, u1);
  spec.interactions_2 = Eigen::VectorXd::Constant(sites, u2);
  return spec;
}

}  // namespace bhcone
