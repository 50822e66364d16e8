#include "bhcone/fock.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace bhcone {

namespace {

cplx ipow(cplx base, int exponent) {
  cplx result(1.0, 0.0);
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

void enumerate_into(int modes, int particles, Occupation& current, int mode,
                    std::vector<Occupation>& out) {
  if (mode == modes - 1) {
    current[mode] = particles;
    out.push_back(current);
    return;
  }
  for (int n = particles; n >= 0; --n) {
    current[mode] = n;
    enumerate_into(modes, particles - n, current, mode + 1, out);
  }
}

std::vector<Occupation> enumerate_states(int modes, int particles) {
  std::vector<Occupation> out;
  Occupation current(modes, 0);
  enumerate_into(modes, particles, current, 0, out);
  return out;
}

void check_cap(std::size_t dim, std::size_t cap) {
  if (dim > cap)
    throw SectorTooLarge("sector dimension " + std::to_string(dim) +
                         " exceeds cap " + std::to_string(cap));
}

void require_particles(const RankOneState& a, const RankOneState& b) {
  if (a.particles != b.particles || a.modes() != b.modes())
    throw std::invalid_argument("rank-1 states differ in particle or mode count");
}

}  // namespace

std::size_t sector_dimension(int modes, int particles) {
  if (modes < 1 || particles < 0) return 0;
  // binomial(N + m - 1, m - 1), built incrementally so every step is exact.
  const int k = modes - 1;
  unsigned __int128 value = 1;
  for (int i = 1; i <= k; ++i) {
    value = value * static_cast<unsigned>(particles + i) / static_cast<unsigned>(i);
    if (value > std::numeric_limits<std::size_t>::max())
      return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(value);
}

std::size_t OccupationBasis::Hash::operator()(const Occupation& o) const noexcept {
  std::uint64_t h = 1469598103934665603ull;
  for (int n : o) {
    h ^= static_cast<std::uint64_t>(n) + 0x9e3779b97f4a7c15ull;
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

OccupationBasis::OccupationBasis(int modes, int particles, std::vector<Occupation> states)
    : modes_(modes), particles_(particles), states_(std::move(states)) {
  index_.reserve(states_.size());
  for (std::size_t k = 0; k < states_.size(); ++k) index_.emplace(states_[k], k);
}

OccupationBasis OccupationBasis::enumerate(int modes, int particles, std::size_t cap) {
  if (modes < 1) throw std::invalid_argument("basis needs at least one mode");
  if (particles < 0) throw std::invalid_argument("negative particle count");
  check_cap(sector_dimension(modes, particles), cap);
  return OccupationBasis(modes, particles, enumerate_states(modes, particles));
}

OccupationBasis OccupationBasis::two_component_sector(int sites, int n_b, int n_c,
                                                      std::size_t cap) {
  if (sites < 1) throw std::invalid_argument("basis needs at least one site");
  if (n_b < 0 || n_c < 0) throw std::invalid_argument("negative particle count");
  const std::size_t db = sector_dimension(sites, n_b);
  const std::size_t dc = sector_dimension(sites, n_c);
  if (dc != 0 && db > cap / dc) check_cap(std::numeric_limits<std::size_t>::max(), cap);
  check_cap(db * dc, cap);

  const auto b_states = enumerate_states(sites, n_b);
  const auto c_states = enumerate_states(sites, n_c);
  std::vector<Occupation> states;
  states.reserve(db * dc);
  for (const auto& b : b_states) {
    for (const auto& c : c_states) {
      Occupation o(b);
      o.insert(o.end(), c.begin(), c.end());
      states.push_back(std::move(o));
    }
  }
  return OccupationBasis(2 * sites, n_b + n_c, std::move(states));
}

std::optional<std::size_t> OccupationBasis::index_of(const Occupation& occupation) const {
  auto it = index_.find(occupation);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

cplx SectorVector::dot(const SectorVector& other) const {
  if (amplitudes.size() != other.amplitudes.size())
    throw std::invalid_argument("sector vectors live on different bases");
  return amplitudes.dot(other.amplitudes);
}

bool RankOneState::is_reflection_structured(double tol) const {
  if (psi.size() % 2 != 0) return false;
  const Eigen::Index l = psi.size() / 2;
  for (Eigen::Index i = 0; i < l; ++i)
    if (std::abs(psi[l + i] - std::conj(psi[i])) > tol) return false;
  return true;
}

bool RankOneState::is_real(double tol) const {
  return psi.size() == 0 || psi.imag().cwiseAbs().maxCoeff() <= tol;
}

RankOneState RankOneState::real(const Eigen::VectorXd& psi, int particles) {
  return {psi.cast<cplx>(), particles};
}

RankOneState RankOneState::reflection(const Eigen::VectorXcd& phi, int particles) {
  Eigen::VectorXcd psi(2 * phi.size());
  psi << phi, phi.conjugate();
  return {psi, particles};
}

double factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial of a negative number");
  if (n <= 20) {
    std::uint64_t f = 1;
    for (int k = 2; k <= n; ++k) f *= static_cast<std::uint64_t>(k);
    return static_cast<double>(f);
  }
  return std::exp(std::lgamma(n + 1.0));
}

SectorVector rank1_to_vector(const RankOneState& state, const BasisPtr& basis) {
  if (!basis) throw std::invalid_argument("null basis");
  if (basis->mode_count() != state.modes() || basis->particle_count() != state.particles)
    throw std::invalid_argument("rank-1 state and basis disagree on (modes, particles)");

  const int m = state.modes();
  const int n = state.particles;
  // scaled_powers(k, i) = psi_i^k / sqrt(k!)
  Eigen::MatrixXcd scaled_powers(n + 1, m);
  for (int i = 0; i < m; ++i) {
    scaled_powers(0, i) = 1.0;
    for (int k = 1; k <= n; ++k)
      scaled_powers(k, i) = scaled_powers(k - 1, i) * state.psi[i] / std::sqrt(double(k));
  }

  const double prefactor = factorial(n);
  const auto& states = basis->states();
  const std::ptrdiff_t dim = static_cast<std::ptrdiff_t>(states.size());
  Eigen::VectorXcd amplitudes(dim);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < dim; ++s) {
    cplx a = prefactor;
    const Occupation& o = states[s];
    for (int i = 0; i < m; ++i) a *= scaled_powers(o[i], i);
    amplitudes[s] = a;
  }
  return {basis, std::move(amplitudes)};
}

cplx overlap_rank1(const RankOneState& bra, const RankOneState& ket) {
  require_particles(bra, ket);
  // extended-precision accumulation: the N-th power amplifies any cancellation in <bra|ket>
  using lcplx = std::complex<long double>;
  lcplx inner = 0.0L;
  for (Eigen::Index i = 0; i < bra.psi.size(); ++i)
    inner += std::conj(lcplx(bra.psi[i].real(), bra.psi[i].imag())) * lcplx(ket.psi[i].real(), ket.psi[i].imag());
  lcplx power = 1.0L;
  for (int k = 0; k < bra.particles; ++k) power *= inner;
  const lcplx r = static_cast<long double>(factorial(bra.particles)) * power;
  return {static_cast<double>(r.real()), static_cast<double>(r.imag())};
}

Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& t) {
  if (t.rows() != t.cols()) throw std::invalid_argument("matrix_exponential needs a square matrix");
  if (t.size() == 0) return t;
  if (!t.allFinite()) throw std::domain_error("matrix_exponential: non-finite entries");

  const double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
  const double herm_defect = (t - t.adjoint()).cwiseAbs().maxCoeff();
  const double anti_defect = (t + t.adjoint()).cwiseAbs().maxCoeff();
  constexpr double kStructureTol = 1e-14;

  Eigen::MatrixXcd result;
  if (herm_defect <= kStructureTol * scale) {
    const Eigen::MatrixXcd sym = 0.5 * (t + t.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym);
    const Eigen::VectorXd lambda = es.eigenvalues();
    result = es.eigenvectors() * lambda.array().exp().matrix().cast<cplx>().asDiagonal() *
             es.eigenvectors().adjoint();
  } else if (anti_defect <= kStructureTol * scale) {
    // t = i k with k Hermitian
    const Eigen::MatrixXcd k = cplx(0.0, -0.5) * (t - t.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(k);
    Eigen::VectorXcd phases(k.rows());
    for (Eigen::Index i = 0; i < k.rows(); ++i)
      phases[i] = std::polar(1.0, es.eigenvalues()[i]);
    result = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  } else {
    result = t.exp();
  }
  if (!result.allFinite()) throw std::overflow_error("matrix_exponential overflowed");
  return result;
}

RankOneState apply_quadratic_exponential(const Eigen::MatrixXcd& t, const RankOneState& state) {
  if (t.rows() != state.modes() || t.cols() != state.modes())
    throw std::invalid_argument("generator and rank-1 state disagree on mode count");
  return {matrix_exponential(t) * state.psi, state.particles};
}

cplx rank1_matrix_element(const RankOneState& bra, const RankOneState& ket,
                          const RankOneOperator& o) {
  require_particles(bra, ket);
  const int n = ket.particles;
  const int m = ket.modes();
  auto check_mode = [m](int i) {
    if (i < 0 || i >= m) throw std::out_of_range("mode index out of range");
  };
  const cplx s = bra.psi.dot(ket.psi);

  return std::visit(
      [&](const auto& term) -> cplx {
        using T = std::decay_t<decltype(term)>;
        if constexpr (std::is_same_v<T, op::Hop> || std::is_same_v<T, op::Number>) {
          int i, j;
          if constexpr (std::is_same_v<T, op::Hop>) {
            i = term.i;
            j = term.j;
          } else {
            i = j = term.i;
          }
          check_mode(i);
          check_mode(j);
          if (n == 0) return 0.0;
          // N^2 (N-1)! = N * N!
          return double(n) * factorial(n) * std::conj(bra.psi[i]) * ket.psi[j] * ipow(s, n - 1);
        } else {
          check_mode(term.i);
          check_mode(term.j);
          if (n < 2) throw std::invalid_argument("pair matrix element needs N >= 2");
          // N^2 (N-1)^2 (N-2)! = N (N-1) N!
          return double(n) * double(n - 1) * factorial(n) *
                 std::conj(bra.psi[term.i] * bra.psi[term.j]) * ket.psi[term.i] *
                 ket.psi[term.j] * ipow(s, n - 2);
        }
      },
      o);
}

}  // namespace bhcone
