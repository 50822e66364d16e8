#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace bhcone {

using cplx = std::complex<double>;

// Single-component model: H = -sum_ij t_ij a_i^+ a_j + sum_i U_i n_i^2.
// Theorem hypotheses: t real symmetric, U_i < 0, bond graph connected.
struct ModelOneSpec {
  Eigen::MatrixXd hopping;
  Eigen::VectorXd interactions;

  int sites() const { return static_cast<int>(interactions.size()); }
  bool operator==(const ModelOneSpec&) const = default;
};

// Two-component model. Only t^b is stored; the c component always hops with
// conj(t^b).
//   H = -sum t^b_ij b_i^+ b_j - sum conj(t^b_ij) c_i^+ c_j
//       + sum U1_i (n^b_i + n^c_i)^2 + sum U2_i (n^b_i - n^c_i)^2
struct ModelTwoSpec {
  Eigen::MatrixXcd hopping_b;
  Eigen::VectorXd interactions_1;
  Eigen::VectorXd interactions_2;

  int sites() const { return static_cast<int>(interactions_1.size()); }
  Eigen::MatrixXcd hopping_c() const { return hopping_b.conjugate(); }
  bool has_real_hopping() const;
  bool operator==(const ModelTwoSpec&) const = default;
};

// Inconsistent shapes. Distinct from a spec that is well formed but violates
// a model hypothesis (those are reported in a ValidationReport).
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool ok() const;
  const CheckResult* find(std::string_view name) const;
  // Names of failed checks, joined with ", ".
  std::string failures() const;
};

// Checks: "hopping_symmetric" / "hopping_hermitian", "interaction_sign",
// "connected". Throws StructuralError on dimension mismatch.
ValidationReport validate_spec(const ModelOneSpec& spec);
ValidationReport validate_spec(const ModelTwoSpec& spec);

// Relaxed model-one hypotheses: t symmetric with t_ij >= 0, connected, any U.
ValidationReport validate_variant_spec(const ModelOneSpec& spec);

// Connectivity of the graph with an edge wherever |t_ij| > 0, i != j.
// Diagonal entries never count.
bool bonds_connected(const Eigen::MatrixXcd& hopping);
bool bonds_connected(const Eigen::MatrixXd& hopping);

enum class LatticeKind { chain, ring, complete };

LatticeKind parse_lattice_kind(std::string_view name);
std::string_view to_string(LatticeKind kind);

// Hopping matrix of a standard lattice with uniform amplitude t on every
// bond; t is placed at (i, j) for i < j and conj(t) at (j, i). A ring with
// L <= 2 coincides with the chain.
Eigen::MatrixXcd standard_hopping(LatticeKind kind, int sites, cplx t);

ModelOneSpec build_model_one(LatticeKind kind, int sites, double t, double u);
ModelTwoSpec build_model_two(LatticeKind kind, int sites, cplx t, double u1,
                             double u2);

}  // namespace bhcone
