#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace bhcone {

using cplx = std::complex<double>;
using Occupation = std::vector<int>;

inline constexpr std::size_t kDefaultStateCap = 10'000'000;

class SectorTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Number of occupation vectors of `particles` bosons in `modes` modes,
// binomial(N + m - 1, N). Saturates at SIZE_MAX.
std::size_t sector_dimension(int modes, int particles);

// Fixed-particle-number occupation basis, ordered lexicographically
// descending: (N,0,...,0) first, (0,...,0,N) last.
//
// For the two-component model the modes are ordered b_1..b_L, c_1..c_L and a
// (N_b, N_c) sector is the subset of the (2L, N_b + N_c) basis with
// sum_i n^b_i = N_b, in the same relative order.
class OccupationBasis {
 public:
  static OccupationBasis enumerate(int modes, int particles,
                                   std::size_t cap = kDefaultStateCap);
  static OccupationBasis two_component_sector(int sites, int n_b, int n_c,
                                              std::size_t cap = kDefaultStateCap);

  int mode_count() const { return modes_; }
  int particle_count() const { return particles_; }
  std::size_t size() const { return states_.size(); }

  const Occupation& state(std::size_t index) const { return states_[index]; }
  const std::vector<Occupation>& states() const { return states_; }
  std::optional<std::size_t> index_of(const Occupation& occupation) const;

 private:
  struct Hash {
    std::size_t operator()(const Occupation& o) const noexcept;
  };

  OccupationBasis(int modes, int particles, std::vector<Occupation> states);

  int modes_ = 0;
  int particles_ = 0;
  std::vector<Occupation> states_;
  std::unordered_map<Occupation, std::size_t, Hash> index_;
};

using BasisPtr = std::shared_ptr<const OccupationBasis>;

inline BasisPtr make_basis(OccupationBasis basis) {
  return std::make_shared<const OccupationBasis>(std::move(basis));
}

// Amplitudes of a many-body state in the orthonormal occupation basis.
struct SectorVector {
  BasisPtr basis;
  Eigen::VectorXcd amplitudes;

  cplx dot(const SectorVector& other) const;  // <this|other>
  double norm() const { return amplitudes.norm(); }
};

// |psi^N> = (sum_i psi_i a_i^+)^N |0>, unnormalized.
struct RankOneState {
  Eigen::VectorXcd psi;
  int particles = 0;

  int modes() const { return static_cast<int>(psi.size()); }
  // psi = (phi, conj(phi)) for some phi, to within `tol` componentwise.
  bool is_reflection_structured(double tol = 0.0) const;
  bool is_real(double tol = 0.0) const;

  static RankOneState real(const Eigen::VectorXd& psi, int particles);
  static RankOneState reflection(const Eigen::VectorXcd& phi, int particles);
};

// n! as a double; exact for n <= 20, log-gamma beyond.
double factorial(int n);

// Amplitude on occupation (n_1..n_m) is N! prod_i psi_i^{n_i} / sqrt(n_i!).
// Any basis with matching (m, N) is accepted, including two-component sectors.
SectorVector rank1_to_vector(const RankOneState& state, const BasisPtr& basis);

// <psi1^N | psi2^N> = N! (psi1^dagger psi2)^N.
cplx overlap_rank1(const RankOneState& bra, const RankOneState& ket);

// exp(T). Hermitian and anti-Hermitian inputs go through an eigendecomposition,
// anything else through Pade scaling and squaring.
Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& t);

// exp(a^+ T a)|psi^N> = |(exp(T) psi)^N>.
RankOneState apply_quadratic_exponential(const Eigen::MatrixXcd& t,
                                         const RankOneState& state);

// Operators with closed-form matrix elements between rank-1 states.
namespace op {
struct Hop {  // a_i^+ a_j
  int i;
  int j;
};
struct Number {  // a_i^+ a_i
  int i;
};
struct Pair {  // a_i^+ a_j^+ a_j a_i; Pair{i, i} is a_i^+ a_i^+ a_i a_i
  int i;
  int j;
  explicit Pair(int site) : i(site), j(site) {}
  Pair(int a, int b) : i(a), j(b) {}
};
}  // namespace op

using RankOneOperator = std::variant<op::Hop, op::Number, op::Pair>;

// <bra^N| O |ket^N> from the ladder action a_j |psi^N> = N psi_j |psi^{N-1}>.
cplx rank1_matrix_element(const RankOneState& bra, const RankOneState& ket,
                          const RankOneOperator& o);

}  // namespace bhcone
