#include "stabkit/kalman.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "oracles.h"
#include "stabkit/branches.h"
#include "stabkit/linalg_util.h"

namespace stabkit {
namespace {

Eigen::MatrixXd M2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

Eigen::MatrixXd Diag(std::initializer_list<double> v) {
  Eigen::VectorXd d(v.size());
  int i = 0;
  for (double x : v) d(i++) = x;
  return d.asDiagonal();
}

const Eigen::MatrixXd kI2 = Eigen::MatrixXd::Identity(2, 2);
const Eigen::MatrixXd kZero2 = Eigen::MatrixXd::Zero(2, 2);

// A pair with a known answer: A = Q diag(lambda) Q^T with repeated
// eigenvalues, and D = B B^T where B spans exactly the orthogonal complement
// of the eigenvectors q_j, j in `killed`. Ker(D) = span(q_killed) is then
// A-invariant, so the Kalman rank is N - |killed|.
struct KnownPair {
  CouplingPair pair;
  int killed = 0;
};

KnownPair MakeKnownPair(std::mt19937_64* rng) {
  std::uniform_int_distribution<int> size(1, 5);
  const int n = size(*rng);
  std::uniform_int_distribution<int> level(0, 3);
  Eigen::VectorXd lambda(n);
  for (int i = 0; i < n; ++i) lambda(i) = 0.5 + level(*rng);
  const Eigen::MatrixXd Q = RandomOrthogonal(n, rng);
  std::bernoulli_distribution kill(0.35);
  Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(n, n);
  int killed = 0;
  for (int j = 0; j < n; ++j) {
    if (kill(*rng)) {
      proj -= Q.col(j) * Q.col(j).transpose();
      ++killed;
    }
  }
  std::normal_distribution<double> g;
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = g(*rng);
  // With every direction killed the product is rounding noise, not zero.
  const Eigen::MatrixXd B = killed == n ? Eigen::MatrixXd(Eigen::MatrixXd::Zero(n, n))
                                         : Eigen::MatrixXd(proj * G);
  const Eigen::MatrixXd A = Q * lambda.asDiagonal() * Q.transpose();
  return {CouplingPair(A, B * B.transpose()), killed};
}

TEST(CouplingPairTest, SymmetrizesAndRecordsDefect) {
  const CouplingPair p(M2(1, 0.2, 0, 1), kI2);
  EXPECT_DOUBLE_EQ(p.A()(0, 1), 0.1);
  EXPECT_DOUBLE_EQ(p.A()(1, 0), 0.1);
  EXPECT_DOUBLE_EQ(p.asymmetry_defect(), 0.1);
}

TEST(CouplingPairTest, RejectsIndefiniteAndMismatchedInput) {
  EXPECT_THROW(CouplingPair(Diag({1, -1}), kI2), std::invalid_argument);
  EXPECT_THROW(CouplingPair(kI2, Diag({-1, 0})), std::invalid_argument);
  EXPECT_THROW(CouplingPair(kI2, Eigen::MatrixXd::Identity(3, 3)),
               std::invalid_argument);
  Eigen::MatrixXd bad = kI2;
  bad(0, 0) = NAN;
  EXPECT_THROW(CouplingPair(bad, kI2), std::invalid_argument);
}

TEST(NumericalRankTest, CountsAboveRelativeCut) {
  EXPECT_EQ(NumericalRank(Diag({1, 1e-3, 1e-17}), 2), 2);
  EXPECT_EQ(NumericalRank(kZero2, 2), 0);
  // An absolute scale overrides the largest singular value.
  EXPECT_EQ(NumericalRank(Diag({1e-14, 1e-14}), 2, 1.0), 2);
  EXPECT_EQ(NumericalRank(Diag({1e-16, 1e-16}), 2, 1.0), 0);
}

TEST(KalmanRankTest, WaveExamplePairHasFullRank) {
  EXPECT_EQ(KalmanRank(WaveExamplePair()), 2);
}

TEST(KalmanRankTest, ZeroDampingGivesZero) {
  EXPECT_EQ(KalmanRank(CouplingPair(kI2, kZero2)), 0);
}

TEST(KalmanRankTest, RankOneDampingReachesBothComponents) {
  const CouplingPair p(Diag({1, 2}), M2(1, 1, 1, 1));
  EXPECT_EQ(KalmanRank(p), 2);
  EXPECT_EQ(oracle::EliminationRank(oracle::Controllability(p.A(), p.D())), 2);
}

TEST(KalmanRankTest, ControllabilityMatrixMatchesRepeatedProducts) {
  const CouplingPair p = WaveExamplePair();
  EXPECT_LE((ControllabilityMatrix(p) - oracle::Controllability(p.A(), p.D()))
                .cwiseAbs()
                .maxCoeff(),
            1e-14);
}

TEST(MaxInvariantDimTest, Examples) {
  EXPECT_EQ(MaxInvariantDim(CouplingPair(kI2, kZero2)), 2);
  // Ker(D) = span(2, -1) is not an eigenvector of diag(1, 2).
  EXPECT_EQ(MaxInvariantDim(WaveExamplePair()), 0);
  EXPECT_EQ(MaxInvariantDim(CouplingPair(kI2, Diag({1, 0}))), 1);
}

TEST(EigGroupTest, DiagonalWithDistinctEntries) {
  const EigenGroups g = EigGroup(Diag({1, 2}), 0.0);
  ASSERT_EQ(g.num_groups(), 2);
  EXPECT_EQ(g.sigmas, (std::vector<int>{1, 1}));
  EXPECT_NEAR(g.lambdas[0], 1, 1e-15);
  EXPECT_NEAR(g.lambdas[1], 2, 1e-15);
  EXPECT_EQ(g.offsets, (std::vector<int>{0, 1, 2}));
}

TEST(EigGroupTest, IdentityIsOneGroup) {
  const EigenGroups g = EigGroup(kI2, 0.0);
  ASSERT_EQ(g.num_groups(), 1);
  EXPECT_EQ(g.sigmas[0], 2);
}

TEST(EigGroupTest, TwoByTwoClosedForm) {
  const EigenGroups g = EigGroup(M2(2, 1, 1, 2), 0.0);
  ASSERT_EQ(g.num_groups(), 2);
  EXPECT_NEAR(g.lambdas[0], 1, 1e-14);
  EXPECT_NEAR(g.lambdas[1], 3, 1e-14);
  const double r = 1 / std::sqrt(2.0);
  EXPECT_NEAR(g.P(0, 0), r, 1e-14);
  EXPECT_NEAR(g.P(1, 0), -r, 1e-14);
  EXPECT_NEAR(g.P(0, 1), r, 1e-14);
  EXPECT_NEAR(g.P(1, 1), r, 1e-14);
}

TEST(EigGroupTest, ToleranceMergesCloseEigenvalues) {
  EXPECT_EQ(EigGroup(Diag({1, 1 + 1e-10, 2}), 1e-8).num_groups(), 2);
  EXPECT_EQ(EigGroup(Diag({1, 1 + 1e-10, 2}), 0.0).num_groups(), 3);
  EXPECT_THROW(EigGroup(kI2, -1.0), std::invalid_argument);
}

TEST(BlockPartitionTest, WaveExampleBlocksAreIndependent) {
  const CouplingPair p = WaveExamplePair();
  const BlockPartition bp = MakeBlockPartition(p, EigGroup(p.A(), 0.0));
  ASSERT_EQ(bp.blocks.size(), 2u);
  EXPECT_EQ(bp.blocks[0].rows(), 2);
  EXPECT_EQ(bp.blocks[0].cols(), 1);
  EXPECT_TRUE(bp.all_independent());
}

TEST(BlockPartitionTest, RepeatedEigenvalueWithRankOneDamping) {
  const CouplingPair p(kI2, Diag({1, 0}));
  const BlockPartition bp = MakeBlockPartition(p, EigGroup(p.A(), 0.0));
  ASSERT_EQ(bp.blocks.size(), 1u);
  EXPECT_EQ(bp.blocks[0].cols(), 2);
  EXPECT_FALSE(bp.independence[0]);
}

TEST(BlockPartitionTest, ZeroDampingMakesEveryBlockDependent) {
  const CouplingPair p(Diag({1, 2}), kZero2);
  const BlockPartition bp = MakeBlockPartition(p, EigGroup(p.A(), 0.0));
  for (bool b : bp.independence) EXPECT_FALSE(b);
}

TEST(CoercivityTest, ExampleConstants) {
  const CouplingPair wave = WaveExamplePair();
  EXPECT_NEAR(CoercivityConstant(MakeBlockPartition(wave, EigGroup(wave.A(), 0.0))),
              5.0, 1e-12);
  const CouplingPair tip = TipExamplePair();
  EXPECT_NEAR(CoercivityConstant(MakeBlockPartition(tip, EigGroup(tip.A(), 0.0))),
              2.0, 1e-12);
}

TEST(CoercivityTest, OrthonormalColumnsGiveOne) {
  std::mt19937_64 rng(7);
  const Eigen::MatrixXd Q = RandomOrthogonal(3, &rng);
  const CouplingPair p(Diag({1, 1, 2}), Q * Q.transpose());
  EXPECT_NEAR(CoercivityConstant(MakeBlockPartition(p, EigGroup(p.A(), 0.0))), 1.0,
              1e-12);
}

TEST(CoercivityTest, DependentBlockThrows) {
  const CouplingPair p(kI2, Diag({1, 0}));
  EXPECT_THROW(CoercivityConstant(MakeBlockPartition(p, EigGroup(p.A(), 0.0))),
               std::domain_error);
}

TEST(CoercivityTest, InequalityHoldsAndIsSharp) {
  const CouplingPair p = WaveExamplePair();
  const BlockPartition bp = MakeBlockPartition(p, EigGroup(p.A(), 0.0));
  const double c = CoercivityConstant(bp);
  const CoercivityCheck ok = VerifyCoercivity(bp, c, 1000, 3);
  EXPECT_TRUE(ok.pass);
  EXPECT_GE(ok.worst_slack, -1e-12);
  // The per-block minimizer attains c, so any larger constant fails there.
  EXPECT_FALSE(VerifyCoercivity(bp, c * (1 + 1e-3), 0, 3).pass);
}

TEST(ConstructMinRankDTest, DistinctEigenvalues) {
  const CouplingPair p = ConstructMinRankD(EigGroup(Diag({1, 2}), 0.0));
  EXPECT_LE((p.D() - M2(1, 1, 1, 1)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(oracle::EliminationRank(p.D()), 1);
  EXPECT_EQ(oracle::EliminationRank(oracle::Controllability(p.A(), p.D())), 2);
}

TEST(ConstructMinRankDTest, SingleGroupForcesFullRank) {
  const CouplingPair p = ConstructMinRankD(EigGroup(kI2, 0.0));
  EXPECT_LE((p.D() - kI2).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ConstructMinRankDTest, RankEqualsLargestMultiplicity) {
  const CouplingPair p = ConstructMinRankD(EigGroup(Diag({1, 1, 2}), 0.0));
  EXPECT_EQ(oracle::EliminationRank(p.D()), 2);
  EXPECT_EQ(oracle::EliminationRank(oracle::Controllability(p.A(), p.D())), 3);
}

TEST(ConstructMinRankDTest, RandomGroupingsAlwaysSatisfyKalman) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const KnownPair k = MakeKnownPair(&rng);
    const EigenGroups g = EigGroup(k.pair.A(), DefaultGroupTolerance(k.pair.A()));
    const CouplingPair p = ConstructMinRankD(g);
    const int sigma1 = *std::max_element(g.sigmas.begin(), g.sigmas.end());
    EXPECT_EQ(NumericalRank(p.D(), p.size()), sigma1);
    EXPECT_EQ(KalmanRank(p), p.size());
  }
}

TEST(CommutatorNormTest, ExampleValues) {
  EXPECT_NEAR(CommutatorNorm(WaveExamplePair()), 2.0, 1e-12);
  EXPECT_NEAR(CommutatorNorm(TipExamplePair()), 1.0, 1e-12);
  EXPECT_EQ(CommutatorNorm(CouplingPair(kI2, M2(1, 2, 2, 4))), 0.0);
}

TEST(CommutatorNormTest, SymmetricInItsArguments) {
  const CouplingPair p = WaveExamplePair();
  EXPECT_NEAR(CommutatorNorm(p), CommutatorNorm(CouplingPair(p.D(), p.A())), 1e-14);
}

TEST(CommutatorNormTest, ScalarMultipleOfIdentityCommutesExactly) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const KnownPair k = MakeKnownPair(&rng);
    const int n = k.pair.size();
    EXPECT_EQ(CommutatorNorm(CouplingPair(2.5 * Eigen::MatrixXd::Identity(n, n),
                                          k.pair.D())),
              0.0);
  }
}

TEST(SpectralFactorTest, RankOneClosedForm) {
  const SpectralFactorD f = SpectralFactor(M2(1, 2, 2, 4));
  ASSERT_EQ(f.rank, 1);
  EXPECT_NEAR(f.deltas[0], 5.0, 1e-14);
  EXPECT_NEAR(f.P(0, 0), 1 / std::sqrt(5.0), 1e-14);
  EXPECT_NEAR(f.P(1, 0), 2 / std::sqrt(5.0), 1e-14);
}

TEST(SpectralFactorTest, IdentityAndZero) {
  const SpectralFactorD id = SpectralFactor(Eigen::MatrixXd::Identity(3, 3));
  EXPECT_EQ(id.rank, 3);
  for (double d : id.deltas) EXPECT_NEAR(d, 1.0, 1e-15);
  EXPECT_EQ(SpectralFactor(kZero2).rank, 0);
}

TEST(SpectralFactorTest, ReconstructsAndBoundsRandomD) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const KnownPair k = MakeKnownPair(&rng);
    const Eigen::MatrixXd& D = k.pair.D();
    const SpectralFactorD f = SpectralFactor(D);
    Eigen::VectorXd m = Eigen::VectorXd::Zero(D.rows());
    for (int i = 0; i < f.rank; ++i) m(i) = f.deltas[i];
    const double norm = SpectralNorm(D);
    const Eigen::MatrixXd rebuilt = f.P * m.asDiagonal() * f.P.transpose();
    EXPECT_LE(SpectralNorm(Eigen::MatrixXd(D - rebuilt)),
              1e-10 * std::max(norm, 1.0));
    EXPECT_LE(SpectralBoundSlack(D, f, 100, trial), 1e-12 * std::max(norm * norm, 1.0));
  }
}

TEST(LiftPairTest, LiftedWaveExampleKeepsKalman) {
  const CouplingPair lifted = LiftPair(WaveExamplePair(), 4);
  ASSERT_EQ(lifted.size(), 8);
  EXPECT_EQ(oracle::EliminationRank(oracle::Controllability(lifted.A(), lifted.D())), 8);
  EXPECT_EQ(KalmanRank(lifted), 8);
}

TEST(LiftPairTest, LiftByOneIsIdentity) {
  const CouplingPair p = WaveExamplePair();
  const CouplingPair q = LiftPair(p, 1);
  EXPECT_EQ(q.A(), p.A());
  EXPECT_EQ(q.D(), p.D());
}

TEST(LiftPairTest, LiftingCannotCreateKalman) {
  const CouplingPair lifted = LiftPair(CouplingPair(kI2, Diag({1, 0})), 2);
  EXPECT_EQ(KalmanRank(lifted), 2);
  EXPECT_EQ(oracle::EliminationRank(oracle::Controllability(lifted.A(), lifted.D())), 2);
}

TEST(LiftPairTest, PreservesSymmetryPsdAndKalmanStatus) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const KnownPair k = MakeKnownPair(&rng);
    if (k.pair.size() > 4) continue;
    const CouplingPair lifted = LiftPair(k.pair, 3);
    EXPECT_EQ(lifted.asymmetry_defect(), 0.0);
    EXPECT_EQ(KalmanRank(lifted) == lifted.size(), k.killed == 0);
  }
}

// Three routes to the same structural fact on pairs whose answer is known by
// construction: SVD-based Kalman rank, elimination rank of the
// controllability matrix, and the invariant-subspace count over eigenspaces.
TEST(KalmanEquivalenceTest, KnownPairsAgreeAcrossRoutes) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const KnownPair k = MakeKnownPair(&rng);
    const int n = k.pair.size();
    SCOPED_TRACE("trial " + std::to_string(trial) + ", N = " + std::to_string(n));
    EXPECT_EQ(KalmanRank(k.pair), n - k.killed);
    EXPECT_EQ(oracle::EliminationRank(oracle::Controllability(k.pair.A(), k.pair.D())),
              n - k.killed);
    EXPECT_EQ(MaxInvariantDim(k.pair), k.killed);
    const BlockPartition bp =
        MakeBlockPartition(k.pair, EigGroup(k.pair.A(), DefaultGroupTolerance(k.pair.A())));
    EXPECT_EQ(bp.all_independent(), k.killed == 0);
  }
}

TEST(KalmanEquivalenceTest, CoercivityHoldsOnKalmanPairs) {
  std::mt19937_64 rng(23);
  int checked = 0;
  while (checked < 30) {
    const KnownPair k = MakeKnownPair(&rng);
    if (k.killed > 0) continue;
    const BlockPartition bp =
        MakeBlockPartition(k.pair, EigGroup(k.pair.A(), DefaultGroupTolerance(k.pair.A())));
    EXPECT_TRUE(VerifyCoercivity(bp, 200, checked).pass);
    ++checked;
  }
}

}  // namespace
}  // namespace stabkit
