#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "bhcone/fock.hpp"
#include "bhcone/lattice.hpp"

namespace bhcone {

inline constexpr std::size_t kDefaultNonzeroCap = 10'000'000;

// Sector-restricted operator in compressed row storage. Never couples states
// outside its basis, so every operator built here commutes with the total
// particle number.
class SparseOperator {
 public:
  using Matrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor, std::ptrdiff_t>;

  struct Entry {
    std::ptrdiff_t row;
    std::ptrdiff_t col;
    cplx value;
  };

  SparseOperator(BasisPtr basis, Matrix matrix);

  const BasisPtr& basis() const { return basis_; }
  std::ptrdiff_t dimension() const { return matrix_.rows(); }
  std::ptrdiff_t nonzeros() const { return matrix_.nonZeros(); }
  const Matrix& matrix() const { return matrix_; }

  // y = A x. Rows are distributed over OpenMP threads; each row is summed in
  // storage order, so the result is identical to apply_serial.
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  void apply_serial(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const;

  Eigen::MatrixXcd to_dense() const { return Eigen::MatrixXcd(matrix_); }
  std::vector<Entry> entries() const;

  // max |A_ij - conj(A_ji)|
  double hermitian_defect() const;
  // Max absolute row sum; an upper bound on the spectral norm.
  double norm_bound() const;
  cplx expectation(const Eigen::VectorXcd& v) const { return v.dot(apply(v)); }

  // One "row col re im" line per stored entry, 0-based indices, preceded by a
  // "# dim nnz" header.
  void write_coordinate_text(std::ostream& out) const;

 private:
  BasisPtr basis_;
  Matrix matrix_;
};

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);

// -sum_ij t_ij a_i^+ a_j over an arbitrary fixed-N basis; `hopping` is an
// m x m mode-space matrix. Diagonal t_ii contribute -t_ii n_i.
SparseOperator build_hopping_operator(const Eigen::MatrixXcd& hopping, const BasisPtr& basis,
                                      std::size_t nonzero_cap = kDefaultNonzeroCap);

// sum_i a_i^+ T_ij a_j, i.e. the one-body operator a^+ T a.
SparseOperator build_quadratic_operator(const Eigen::MatrixXcd& t, const BasisPtr& basis,
                                        std::size_t nonzero_cap = kDefaultNonzeroCap);

struct HamiltonianParts {
  SparseOperator kinetic;
  SparseOperator interaction;  // diagonal

  SparseOperator total() const { return kinetic + interaction; }
};

HamiltonianParts model1_parts(const ModelOneSpec& spec, int particles,
                              std::size_t nonzero_cap = kDefaultNonzeroCap);
// On the (N_b, N_c) sector basis.
HamiltonianParts model2_parts(const ModelTwoSpec& spec, int n_b, int n_c,
                              std::size_t nonzero_cap = kDefaultNonzeroCap);
// On the full N-particle space (direct sum over N_b + N_c = N).
HamiltonianParts model2_parts_full(const ModelTwoSpec& spec, int particles,
                                   std::size_t nonzero_cap = kDefaultNonzeroCap);

SparseOperator build_model1_hamiltonian(const ModelOneSpec& spec, int particles,
                                        std::size_t nonzero_cap = kDefaultNonzeroCap);
SparseOperator build_model2_hamiltonian(const ModelTwoSpec& spec, int n_b, int n_c,
                                        std::size_t nonzero_cap = kDefaultNonzeroCap);

struct SpinOperators {
  SparseOperator sz;
  SparseOperator s2;
  SparseOperator s_plus;
};

// Total spin of the two-component model over the full N-particle space,
// S^+ = sum_i b_i^+ c_i and S^2 = S^- S^+ + S^z (S^z + 1).
SpinOperators build_spin_operators(int sites, int particles);

struct ProjectorFactor {
  SparseOperator matrix;  // 1 - dtau H
  bool nonnegative = false;
  bool irreducible = false;
  double min_entry = 0.0;
};

// 1 - dtau H on the occupation basis for the relaxed model-one variant.
// Entry signs and strong connectivity of the nonzero pattern are reported,
// not enforced.
ProjectorFactor build_projector_factor(const ModelOneSpec& spec, int particles, double dtau);

// Strong connectivity of the directed graph i -> j for every stored A_ij != 0.
bool pattern_strongly_connected(const SparseOperator& a);

}  // namespace bhcone
