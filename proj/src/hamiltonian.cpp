#include "bhcone/hamiltonian.hpp"

#include <cmath>
#include <ostream>
#include <stack>
#include <string>

namespace bhcone {

namespace {

using Triplet = Eigen::Triplet<cplx, std::ptrdiff_t>;

SparseOperator::Matrix assemble(std::ptrdiff_t dim, const std::vector<Triplet>& triplets) {
  SparseOperator::Matrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.prune(cplx(0.0));
  m.makeCompressed();
  return m;
}

void check_nonzero_cap(std::size_t count, std::size_t cap) {
  if (count > cap)
    throw SectorTooLarge("operator needs " + std::to_string(count) +
                         " nonzeros, cap is " + std::to_string(cap));
}

// sum_ij coeff(i, j) a_i^+ a_j, applied column by column: for each basis
// state, move one boson from mode j to mode i.
SparseOperator one_body(const Eigen::MatrixXcd& coeff, const BasisPtr& basis, std::size_t cap) {
  const int m = basis->mode_count();
  if (coeff.rows() != m || coeff.cols() != m)
    throw std::invalid_argument("one-body coefficient matrix does not match the mode count");

  std::vector<Triplet> triplets;
  const auto& states = basis->states();
  Occupation target;
  for (std::size_t col = 0; col < states.size(); ++col) {
    const Occupation& s = states[col];
    for (int j = 0; j < m; ++j) {
      if (s[j] == 0) continue;
      for (int i = 0; i < m; ++i) {
        const cplx c = coeff(i, j);
        if (c == cplx(0.0)) continue;
        if (i == j) {
          triplets.emplace_back(col, col, c * double(s[j]));
          continue;
        }
        target = s;
        target[j] -= 1;
        target[i] += 1;
        const auto row = basis->index_of(target);
        if (!row) continue;  // leaves a two-component sector
        triplets.emplace_back(*row, col, c * std::sqrt(double(s[j]) * double(s[i] + 1)));
      }
    }
    check_nonzero_cap(triplets.size(), cap);
  }
  return SparseOperator(basis, assemble(static_cast<std::ptrdiff_t>(states.size()), triplets));
}

template <typename DiagonalFn>
SparseOperator diagonal(const BasisPtr& basis, DiagonalFn&& value) {
  std::vector<Triplet> triplets;
  const auto& states = basis->states();
  triplets.reserve(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) triplets.emplace_back(k, k, value(states[k]));
  return SparseOperator(basis, assemble(static_cast<std::ptrdiff_t>(states.size()), triplets));
}

Eigen::MatrixXcd two_component_hopping(const ModelTwoSpec& spec) {
  const int l = spec.sites();
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(2 * l, 2 * l);
  t.topLeftCorner(l, l) = spec.hopping_b;
  t.bottomRightCorner(l, l) = spec.hopping_c();
  return t;
}

HamiltonianParts model2_on(const ModelTwoSpec& spec, const BasisPtr& basis, std::size_t cap) {
  const int l = spec.sites();
  auto kinetic = build_hopping_operator(two_component_hopping(spec), basis, cap);
  auto interaction = diagonal(basis, [&](const Occupation& o) {
    double e = 0.0;
    for (int i = 0; i < l; ++i) {
      const double sum = o[i] + o[l + i];
      const double diff = o[i] - o[l + i];
      e += spec.interactions_1[i] * sum * sum + spec.interactions_2[i] * diff * diff;
    }
    return cplx(e);
  });
  return {std::move(kinetic), std::move(interaction)};
}

}  // namespace

SparseOperator::SparseOperator(BasisPtr basis, Matrix matrix)
    : basis_(std::move(basis)), matrix_(std::move(matrix)) {
  if (!basis_) throw std::invalid_argument("operator needs a basis");
  if (matrix_.rows() != static_cast<std::ptrdiff_t>(basis_->size()) || matrix_.cols() != matrix_.rows())
    throw std::invalid_argument("operator shape does not match its basis");
  matrix_.makeCompressed();
}

void SparseOperator::apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
  const std::ptrdiff_t n = matrix_.rows();
  y.resize(n);
  const auto* outer = matrix_.outerIndexPtr();
  const auto* inner = matrix_.innerIndexPtr();
  const cplx* values = matrix_.valuePtr();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    cplx acc(0.0);
    for (std::ptrdiff_t k = outer[r]; k < outer[r + 1]; ++k) acc += values[k] * x[inner[k]];
    y[r] = acc;
  }
}

Eigen::VectorXcd SparseOperator::apply(const Eigen::VectorXcd& x) const {
  Eigen::VectorXcd y;
  apply(x, y);
  return y;
}

void SparseOperator::apply_serial(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
  const std::ptrdiff_t n = matrix_.rows();
  y.resize(n);
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    cplx acc(0.0);
    for (Matrix::InnerIterator it(matrix_, r); it; ++it) acc += it.value() * x[it.col()];
    y[r] = acc;
  }
}

std::vector<SparseOperator::Entry> SparseOperator::entries() const {
  std::vector<Entry> out;
  out.reserve(matrix_.nonZeros());
  for (std::ptrdiff_t r = 0; r < matrix_.outerSize(); ++r)
    for (Matrix::InnerIterator it(matrix_, r); it; ++it) out.push_back({it.row(), it.col(), it.value()});
  return out;
}

double SparseOperator::hermitian_defect() const {
  const Matrix adj = matrix_.adjoint();
  const Matrix diff = matrix_ - adj;
  double worst = 0.0;
  for (std::ptrdiff_t k = 0; k < diff.nonZeros(); ++k) worst = std::max(worst, std::abs(diff.valuePtr()[k]));
  return worst;
}

double SparseOperator::norm_bound() const {
  double worst = 0.0;
  for (std::ptrdiff_t r = 0; r < matrix_.outerSize(); ++r) {
    double row = 0.0;
    for (Matrix::InnerIterator it(matrix_, r); it; ++it) row += std::abs(it.value());
    worst = std::max(worst, row);
  }
  return worst;
}

void SparseOperator::write_coordinate_text(std::ostream& out) const {
  out << "# " << dimension() << ' ' << nonzeros() << '\n';
  const auto old = out.precision(17);
  for (const auto& e : entries())
    out << e.row << ' ' << e.col << ' ' << e.value.real() << ' ' << e.value.imag() << '\n';
  out.precision(old);
}

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("operator sum: dimension mismatch");
  SparseOperator::Matrix sum = a.matrix() + b.matrix();
  sum.prune(cplx(0.0));
  return SparseOperator(a.basis(), std::move(sum));
}

SparseOperator build_hopping_operator(const Eigen::MatrixXcd& hopping, const BasisPtr& basis,
                                      std::size_t nonzero_cap) {
  return one_body(-hopping, basis, nonzero_cap);
}

SparseOperator build_quadratic_operator(const Eigen::MatrixXcd& t, const BasisPtr& basis,
                                        std::size_t nonzero_cap) {
  return one_body(t, basis, nonzero_cap);
}

HamiltonianParts model1_parts(const ModelOneSpec& spec, int particles, std::size_t nonzero_cap) {
  auto basis = make_basis(OccupationBasis::enumerate(spec.sites(), particles));
  auto kinetic = build_hopping_operator(spec.hopping.cast<cplx>(), basis, nonzero_cap);
  auto interaction = diagonal(basis, [&](const Occupation& o) {
    double e = 0.0;
    for (int i = 0; i < spec.sites(); ++i) e += spec.interactions[i] * double(o[i]) * double(o[i]);
    return cplx(e);
  });
  return {std::move(kinetic), std::move(interaction)};
}

HamiltonianParts model2_parts(const ModelTwoSpec& spec, int n_b, int n_c, std::size_t nonzero_cap) {
  auto basis = make_basis(OccupationBasis::two_component_sector(spec.sites(), n_b, n_c));
  return model2_on(spec, basis, nonzero_cap);
}

HamiltonianParts model2_parts_full(const ModelTwoSpec& spec, int particles, std::size_t nonzero_cap) {
  auto basis = make_basis(OccupationBasis::enumerate(2 * spec.sites(), particles));
  return model2_on(spec, basis, nonzero_cap);
}

SparseOperator build_model1_hamiltonian(const ModelOneSpec& spec, int particles, std::size_t nonzero_cap) {
  return model1_parts(spec, particles, nonzero_cap).total();
}

SparseOperator build_model2_hamiltonian(const ModelTwoSpec& spec, int n_b, int n_c,
                                        std::size_t nonzero_cap) {
  return model2_parts(spec, n_b, n_c, nonzero_cap).total();
}

SpinOperators build_spin_operators(int sites, int particles) {
  auto basis = make_basis(OccupationBasis::enumerate(2 * sites, particles));

  auto sz = diagonal(basis, [sites](const Occupation& o) {
    int nb = 0;
    for (int i = 0; i < sites; ++i) nb += o[i] - o[sites + i];
    return cplx(0.5 * nb);
  });

  // S^+ = sum_i b_i^+ c_i: coefficient 1 at (b_i, c_i) in mode space.
  Eigen::MatrixXcd raise = Eigen::MatrixXcd::Zero(2 * sites, 2 * sites);
  for (int i = 0; i < sites; ++i) raise(i, sites + i) = 1.0;
  auto s_plus = build_quadratic_operator(raise, basis);

  const SparseOperator::Matrix s_minus = s_plus.matrix().adjoint();
  const auto& zm = sz.matrix();
  SparseOperator::Matrix identity(zm.rows(), zm.cols());
  identity.setIdentity();
  SparseOperator::Matrix s2 = s_minus * s_plus.matrix() + zm * (zm + identity);
  s2.prune(cplx(0.0));
  return {std::move(sz), SparseOperator(basis, std::move(s2)), std::move(s_plus)};
}

bool pattern_strongly_connected(const SparseOperator& a) {
  const auto& m = a.matrix();
  const std::ptrdiff_t n = m.rows();
  if (n <= 1) return true;
  const SparseOperator::Matrix transposed = m.transpose();

  auto reaches_all = [n](const SparseOperator::Matrix& g) {
    std::vector<bool> seen(n, false);
    std::stack<std::ptrdiff_t> todo;
    todo.push(0);
    seen[0] = true;
    std::ptrdiff_t count = 1;
    while (!todo.empty()) {
      const auto r = todo.top();
      todo.pop();
      for (SparseOperator::Matrix::InnerIterator it(g, r); it; ++it) {
        if (it.value() == cplx(0.0) || seen[it.col()]) continue;
        seen[it.col()] = true;
        ++count;
        todo.push(it.col());
      }
    }
    return count == n;
  };
  return reaches_all(m) && reaches_all(transposed);
}

ProjectorFactor build_projector_factor(const ModelOneSpec& spec, int particles, double dtau) {
  if (!(dtau > 0.0)) throw std::invalid_argument("dtau must be positive");
  const SparseOperator h = build_model1_hamiltonian(spec, particles);
  SparseOperator::Matrix identity(h.dimension(), h.dimension());
  identity.setIdentity();
  SparseOperator::Matrix factor = identity - dtau * h.matrix();
  factor.prune(cplx(0.0));

  ProjectorFactor out{SparseOperator(h.basis(), std::move(factor))};
  // Entries absent from the sparse pattern are exact zeros, which are
  // nonnegative, so the minimum over stored entries is enough.
  double min_entry = 0.0;
  bool first = true;
  bool real = true;
  for (const auto& e : out.matrix.entries()) {
    real = real && e.value.imag() == 0.0;
    if (first || e.value.real() < min_entry) min_entry = e.value.real();
    first = false;
  }
  if (out.matrix.nonzeros() < out.matrix.dimension() * out.matrix.dimension())
    min_entry = std::min(min_entry, 0.0);
  out.min_entry = min_entry;
  out.nonnegative = real && min_entry >= 0.0;
  out.irreducible = pattern_strongly_connected(out.matrix);
  return out;
}

}  // namespace bhcone
