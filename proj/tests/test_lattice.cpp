#include <gtest/gtest.h>

#include <random>

#include "bhcone/lattice.hpp"
#include "test_support.hpp"

using namespace bhcone;

namespace {

ModelOneSpec two_site(double t12, double u) {
  ModelOneSpec s;
  s.hopping = Eigen::MatrixXd::Zero(2, 2);
  s.hopping(0, 1) = s.hopping(1, 0) = t12;
  s.interactions = Eigen::VectorXd::Constant(2, u);
  return s;
}

// reachability by powers of the adjacency matrix
bool reachability_connected(const Eigen::MatrixXd& adjacency) {
  const int L = static_cast<int>(adjacency.rows());
  Eigen::MatrixXd reach = Eigen::MatrixXd::Identity(L, L);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(L, L);
  for (int k = 1; k < L; ++k) {
    power = power * adjacency;
    reach += power;
  }
  return (reach.array() > 0.0).all();
}

}  // namespace

TEST(ValidateSpec, TwoSiteChainPasses) {
  const auto r = validate_spec(two_site(1.0, -1.0));
  EXPECT_TRUE(r.ok());
  ASSERT_NE(r.find("connected"), nullptr);
  EXPECT_TRUE(r.find("connected")->passed);
  EXPECT_TRUE(r.find("hopping_symmetric")->passed);
  EXPECT_TRUE(r.find("interaction_sign")->passed);
  EXPECT_EQ(r.failures(), "");
}

TEST(ValidateSpec, ZeroBondIsDisconnected) {
  const auto r = validate_spec(two_site(0.0, -1.0));
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.find("connected")->passed);
  EXPECT_EQ(r.failures(), "connected");
}

TEST(ValidateSpec, RepulsiveSiteFailsSign) {
  auto s = two_site(1.0, -1.0);
  s.interactions[1] = 0.0;
  const auto r = validate_spec(s);
  EXPECT_FALSE(r.find("interaction_sign")->passed);
  EXPECT_TRUE(r.find("connected")->passed);
}

TEST(ValidateSpec, AsymmetricHoppingFails) {
  auto s = two_site(1.0, -1.0);
  s.hopping(0, 1) = 0.5;
  EXPECT_FALSE(validate_spec(s).find("hopping_symmetric")->passed);
}

TEST(ValidateSpec, DimensionMismatchIsStructural) {
  ModelOneSpec s = two_site(1.0, -1.0);
  s.interactions = Eigen::VectorXd::Constant(3, -1.0);
  EXPECT_THROW(validate_spec(s), StructuralError);

  ModelTwoSpec m = build_model_two(LatticeKind::chain, 3, 1.0, -1.0, 1.0);
  m.interactions_2 = Eigen::VectorXd::Constant(2, 1.0);
  EXPECT_THROW(validate_spec(m), StructuralError);
}

TEST(ValidateSpec, ModelTwoNegativeU2FailsSign) {
  auto m = build_model_two(LatticeKind::chain, 2, 1.0, -1.0, 1.0);
  m.interactions_2[0] = -1.0;
  const auto r = validate_spec(m);
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.find("interaction_sign")->passed);
  EXPECT_TRUE(r.find("hopping_hermitian")->passed);
}

TEST(ValidateSpec, ModelTwoNonHermitianHopping) {
  auto m = build_model_two(LatticeKind::chain, 2, cplx(0.0, 1.0), -1.0, 1.0);
  EXPECT_TRUE(validate_spec(m).ok());
  EXPECT_FALSE(m.has_real_hopping());
  m.hopping_b(1, 0) = cplx(0.0, 1.0);  // should be -i
  EXPECT_FALSE(validate_spec(m).find("hopping_hermitian")->passed);
}

TEST(ValidateSpec, ModelTwoCComponentIsConjugate) {
  const auto m = build_model_two(LatticeKind::ring, 3, std::polar(1.0, 0.3), -1.0, 0.5);
  EXPECT_TRUE(m.hopping_c().isApprox(m.hopping_b.conjugate()));
}

TEST(ValidateVariant, NegativeHoppingFails) {
  auto s = two_site(-1.0, 2.0);
  const auto r = validate_variant_spec(s);
  EXPECT_FALSE(r.find("hopping_nonnegative")->passed);
  EXPECT_TRUE(r.find("connected")->passed);
  EXPECT_TRUE(validate_variant_spec(two_site(1.0, 2.0)).ok());
}

TEST(StandardLattice, ChainIsTridiagonal) {
  const auto s = build_model_one(LatticeKind::chain, 3, 1.0, -1.0);
  Eigen::MatrixXd expected(3, 3);
  expected << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  EXPECT_EQ(s.hopping, expected);
  EXPECT_EQ(s.interactions, Eigen::VectorXd::Constant(3, -1.0));
}

TEST(StandardLattice, RingAddsClosingBond) {
  const auto s = build_model_one(LatticeKind::ring, 3, 1.0, -1.0);
  EXPECT_EQ(s.hopping(2, 0), 1.0);
  EXPECT_EQ(s.hopping(0, 2), 1.0);
  EXPECT_EQ(s.hopping.sum(), 6.0);
  EXPECT_EQ(build_model_one(LatticeKind::ring, 2, 1.0, -1.0).hopping,
            build_model_one(LatticeKind::chain, 2, 1.0, -1.0).hopping);
}

TEST(StandardLattice, CompleteGraphAllOffDiagonalOne) {
  const auto s = build_model_one(LatticeKind::complete, 4, 1.0, -1.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_EQ(s.hopping(i, j), i == j ? 0.0 : 1.0);
}

TEST(StandardLattice, ComplexAmplitudeAboveDiagonal) {
  const cplx t = std::polar(1.0, 0.7);
  const auto h = standard_hopping(LatticeKind::chain, 3, t);
  EXPECT_EQ(h(0, 1), t);
  EXPECT_EQ(h(1, 0), std::conj(t));
}

TEST(StandardLattice, RejectsBadSizes) {
  EXPECT_THROW(standard_hopping(LatticeKind::chain, 0, 1.0), std::invalid_argument);
  EXPECT_THROW(standard_hopping(LatticeKind::ring, 3, 0.0), std::invalid_argument);
  // one site has no bonds, so zero hopping is fine
  EXPECT_NO_THROW(standard_hopping(LatticeKind::chain, 1, 0.0));
}

TEST(StandardLattice, EveryKindValidates) {
  for (auto kind : {LatticeKind::chain, LatticeKind::ring, LatticeKind::complete}) {
    for (int L = 2; L <= 8; ++L) {
      EXPECT_TRUE(validate_spec(build_model_one(kind, L, 0.7, -1.3)).ok()) << to_string(kind) << " L=" << L;
      EXPECT_TRUE(validate_spec(build_model_two(kind, L, cplx(0.3, -0.4), -1.0, 0.2)).ok());
    }
  }
}

TEST(StandardLattice, KindNamesRoundTrip) {
  for (auto kind : {LatticeKind::chain, LatticeKind::ring, LatticeKind::complete})
    EXPECT_EQ(parse_lattice_kind(to_string(kind)), kind);
  EXPECT_THROW(parse_lattice_kind("square"), std::invalid_argument);
}

TEST(Connectivity, DiagonalEntriesIgnored) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_FALSE(bonds_connected(t));
  t(0, 1) = t(1, 0) = 1.0;
  t(1, 2) = t(2, 1) = 1.0;
  EXPECT_TRUE(bonds_connected(t));
  EXPECT_TRUE(bonds_connected(Eigen::MatrixXd(Eigen::MatrixXd::Zero(1, 1))));
}

TEST(Connectivity, ComplexHoppingUsesModulus) {
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(2, 2);
  t(0, 1) = cplx(0.0, 1e-300);
  t(1, 0) = std::conj(t(0, 1));
  EXPECT_TRUE(bonds_connected(t));
}

// every graph on up to five vertices against the reachability matrix
TEST(Connectivity, MatchesReachabilityOnAllSmallGraphs) {
  for (int L = 1; L <= 5; ++L) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < L; ++i)
      for (int j = i + 1; j < L; ++j) edges.emplace_back(i, j);
    const unsigned count = 1u << edges.size();
    for (unsigned mask = 0; mask < count; ++mask) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(L, L);
      Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(L, L);
      for (std::size_t e = 0; e < edges.size(); ++e) {
        if (!(mask >> e & 1u)) continue;
        const auto [i, j] = edges[e];
        t(i, j) = t(j, i) = (e % 2 ? -0.5 : 2.0);
        adj(i, j) = adj(j, i) = 1.0;
      }
      ASSERT_EQ(bonds_connected(t), reachability_connected(adj)) << "L=" << L << " mask=" << mask;
    }
  }
}

TEST(Connectivity, RandomTreesAreConnected) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int L = 2 + trial % 6;
    ModelOneSpec s;
    s.hopping = oracle::random_connected_hopping(L, rng);
    s.interactions = Eigen::VectorXd::Constant(L, -0.5);
    EXPECT_TRUE(validate_spec(s).ok());
  }
}
