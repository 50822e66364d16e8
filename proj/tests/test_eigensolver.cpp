#include <gtest/gtest.h>

#include <random>

#include "bhcone/eigensolver.hpp"
#include "test_support.hpp"

using namespace bhcone;

namespace {

SparseOperator from_dense(const Eigen::MatrixXcd& m) {
  const int n = static_cast<int>(m.rows());
  auto basis = make_basis(OccupationBasis::enumerate(n, 1));
  return SparseOperator(basis, m.sparseView().cast<cplx>().eval());
}

SparseOperator random_hermitian(int n, std::mt19937_64& rng) {
  const Eigen::MatrixXcd a = oracle::random_matrix(n, rng);
  return from_dense(0.5 * (a + a.adjoint()));
}

}  // namespace

TEST(DenseSpectrum, TwoByTwo) {
  Eigen::Matrix2cd m;
  m << -1.0, -0.5, -0.5, -1.0;
  const auto r = dense_spectrum(from_dense(m));
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r.eigenvalues[0], -1.5, 1e-15);
  EXPECT_NEAR(r.eigenvalues[1], -0.5, 1e-15);
  EXPECT_NEAR(r.gap(), 1.0, 1e-15);
  EXPECT_LE(r.residuals[0], 1e-14);
}

TEST(DenseSpectrum, ChainThreeSitesTwoParticles) {
  const auto h = build_model1_hamiltonian(build_model_one(LatticeKind::chain, 3, 1.0, -1.0), 2);
  const auto r = dense_spectrum(h);
  EXPECT_EQ(r.size(), 6u);
  EXPECT_EQ(degeneracy_count(r, default_degeneracy_tolerance(r.eigenvalues[0])).count, 1);
  EXPECT_GT(r.gap(), 1e-3);
  for (std::size_t k = 0; k < r.size(); ++k)
    for (std::size_t l = 0; l < r.size(); ++l)
      EXPECT_NEAR(std::abs(r.eigenvectors[k].dot(r.eigenvectors[l])), k == l ? 1.0 : 0.0, 1e-12);
}

TEST(DenseSpectrum, CapIsEnforced) {
  const auto h = build_model1_hamiltonian(build_model_one(LatticeKind::chain, 4, 1.0, -1.0), 3);
  EXPECT_THROW(dense_spectrum(h, 10), SectorTooLarge);
}

TEST(Lanczos, MatchesDenseOnRandomHermitian) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const auto op = random_hermitian(40 + 10 * trial, rng);
    const auto dense = dense_spectrum(op);
    LanczosOptions opt;
    opt.k = 4;
    opt.seed = trial;
    const auto lz = lanczos_lowest(op, opt);
    ASSERT_EQ(lz.size(), 4u);
    for (int k = 0; k < 4; ++k) {
      EXPECT_NEAR(lz.eigenvalues[k], dense.eigenvalues[k], 1e-8 * op.norm_bound());
      EXPECT_LE(lz.residuals[k], 1e-9 * op.norm_bound());
    }
  }
}

TEST(Lanczos, MatchesDenseOnHamiltonian) {
  const auto h = build_model1_hamiltonian(build_model_one(LatticeKind::ring, 5, 1.0, -0.7), 4);
  const auto dense = dense_spectrum(h);
  LanczosOptions opt;
  opt.k = 3;
  const auto lz = lanczos_lowest(h, opt);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(lz.eigenvalues[k], dense.eigenvalues[k], 1e-8);
  EXPECT_NEAR(std::abs(lz.eigenvectors[0].dot(dense.eigenvectors[0])), 1.0, 1e-8);
}

TEST(Lanczos, ResolvesExactDegeneracy) {
  Eigen::VectorXd d(6);
  d << -2.0, -2.0, -2.0, 0.5, 1.0, 3.0;
  std::mt19937_64 rng(3);
  // rotate by a random unitary so the copies are not basis vectors
  const Eigen::MatrixXcd q = Eigen::HouseholderQR<Eigen::MatrixXcd>(oracle::random_matrix(6, rng)).householderQ();
  const Eigen::MatrixXcd m = q * d.cast<cplx>().asDiagonal() * q.adjoint();
  LanczosOptions opt;
  opt.k = 4;
  const auto r = lanczos_lowest(from_dense(0.5 * (m + m.adjoint())), opt);
  ASSERT_EQ(r.size(), 4u);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(r.eigenvalues[k], -2.0, 1e-9);
  EXPECT_NEAR(r.eigenvalues[3], 0.5, 1e-9);
  EXPECT_EQ(degeneracy_count(r, 1e-8).count, 3);
}

TEST(Lanczos, KClippedToDimension) {
  Eigen::Matrix2cd m;
  m << 1.0, 0.0, 0.0, 2.0;
  LanczosOptions opt;
  opt.k = 10;
  const auto r = lanczos_lowest(from_dense(m), opt);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r.eigenvalues[0], 1.0, 1e-14);
  EXPECT_NEAR(r.eigenvalues[1], 2.0, 1e-14);
}

TEST(Lanczos, NonConvergenceCarriesBestEstimate) {
  std::mt19937_64 rng(4);
  const auto op = random_hermitian(200, rng);
  LanczosOptions opt;
  opt.k = 1;
  opt.max_iter = 3;
  opt.tol = 1e-14;
  try {
    lanczos_lowest(op, opt);
    FAIL() << "expected LanczosNonConvergence";
  } catch (const LanczosNonConvergence& e) {
    ASSERT_EQ(e.best().size(), 1u);
    const double exact = dense_spectrum(op).eigenvalues[0];
    EXPECT_GE(e.best().eigenvalues[0], exact - 1e-10);  // Rayleigh quotient bound
    EXPECT_GT(e.best().residuals[0], opt.tol * op.norm_bound());
  }
}

TEST(Lanczos, RejectsBadArguments) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
  LanczosOptions opt;
  opt.k = 0;
  EXPECT_THROW(lanczos_lowest(from_dense(m), opt), std::invalid_argument);
}

TEST(Lanczos, SeedDeterminism) {
  std::mt19937_64 rng(5);
  const auto op = random_hermitian(60, rng);
  LanczosOptions opt;
  opt.k = 2;
  opt.seed = 99;
  const auto a = lanczos_lowest(op, opt);
  const auto b = lanczos_lowest(op, opt);
  EXPECT_EQ(a.eigenvalues, b.eigenvalues);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Degeneracy, CountsWithinTolerance) {
  SpectrumResult r;
  r.eigenvalues = {-1.0, -1.0 + 1e-10, -0.5};
  EXPECT_EQ(degeneracy_count(r, 1e-8).count, 2);
  EXPECT_EQ(degeneracy_count(r, 1e-12).count, 1);
  EXPECT_EQ(degeneracy_count(r, 1.0).count, 3);
  EXPECT_FALSE(degeneracy_count(r, 1e-8).underdetermined);
  r.eigenvalues = {-3.0};
  EXPECT_TRUE(degeneracy_count(r, 1e-8).underdetermined);
  EXPECT_EQ(default_degeneracy_tolerance(-0.1), 1e-8);
  EXPECT_EQ(default_degeneracy_tolerance(-200.0), 2e-6);
}

TEST(LowestEigenpairs, DenseAndLanczosPathsAgree) {
  const auto h = build_model1_hamiltonian(build_model_one(LatticeKind::chain, 4, 1.0, -1.0), 4);
  const auto dense = lowest_eigenpairs(h, 3, 0, 1 << 20);
  const auto lz = lowest_eigenpairs(h, 3, 0, 1);
  ASSERT_EQ(dense.size(), 3u);
  ASSERT_EQ(lz.size(), 3u);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(dense.eigenvalues[k], lz.eigenvalues[k], 1e-8);
}

TEST(LowestEigenpairs, SpectrumIsSortedAndBoundedByNorm) {
  std::mt19937_64 rng(6);
  for (int L = 2; L <= 4; ++L) {
    ModelOneSpec spec;
    spec.hopping = oracle::random_connected_hopping(L, rng);
    spec.interactions = Eigen::VectorXd::Constant(L, -0.8);
    const auto h = build_model1_hamiltonian(spec, 3);
    const auto r = dense_spectrum(h);
    EXPECT_TRUE(std::is_sorted(r.eigenvalues.begin(), r.eigenvalues.end()));
    EXPECT_LE(std::abs(r.eigenvalues.front()), h.norm_bound() + 1e-12);
    EXPECT_LE(std::abs(r.eigenvalues.back()), h.norm_bound() + 1e-12);
  }
}
