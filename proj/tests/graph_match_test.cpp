#include <gtest/gtest.h>

#include <cmath>

#include "graph_oracles.hpp"
#include "radar_odom/error.hpp"
#include "radar_odom/graph_match.hpp"

namespace radar_odom {
namespace {

using testing::dense_eigenvalues;
using testing::dense_principal_vector;
using testing::exhaustive_optimum;
using testing::Gen;
using testing::keypoint_set;
using testing::random_compatibility;
using testing::random_instance;

Eigen::MatrixXd clique(int u, std::initializer_list<int> members) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(u, u);
  for (int g : members) {
    for (int h : members) {
      if (g != h) c(g, h) = 1.0;
    }
  }
  return c;
}

UnaryMatches disjoint_candidates(int u) {
  UnaryMatches m;
  for (int g = 0; g < u; ++g) m.pairs.push_back({g, g, 0.0});
  return m;
}

TEST(CompatibilityMatrix, RejectsInvalidScores) {
  Eigen::MatrixXd c = clique(3, {0, 1, 2});
  EXPECT_NO_THROW(CompatibilityMatrix{c});
  Eigen::MatrixXd diag = c;
  diag(1, 1) = 0.5;
  EXPECT_THROW(CompatibilityMatrix{diag}, Error);
  Eigen::MatrixXd asym = c;
  asym(0, 1) = 0.5;
  EXPECT_THROW(CompatibilityMatrix{asym}, Error);
  Eigen::MatrixXd big = c;
  big(0, 1) = big(1, 0) = 1.5;
  EXPECT_THROW(CompatibilityMatrix{big}, Error);
  EXPECT_THROW(CompatibilityMatrix{Eigen::MatrixXd::Zero(2, 3)}, Error);
}

TEST(PairwiseCompatibility, RigidCorrespondencesScoreOne) {
  const KeypointSet l1 = keypoint_set({{0, 0}, {3, 1}, {-2, 5}});
  const Pose2 t(1.5, -0.5, 0.7);
  const KeypointSet l2 = keypoint_set({t.apply({0, 0}), t.apply({3, 1}), t.apply({-2, 5})});
  const CompatibilityMatrix c = pairwise_compatibility(disjoint_candidates(3), l1, l2, 0.5);
  for (int g = 0; g < 3; ++g) {
    for (int h = 0; h < 3; ++h) EXPECT_NEAR(c(g, h), g == h ? 0.0 : 1.0, 1e-12);
  }
}

TEST(PairwiseCompatibility, KernelValueAndCutoff) {
  const double sigma = 0.5;
  const KeypointSet l1 = keypoint_set({{0, 0}, {10, 0}});
  const auto score_for = [&](double delta) {
    const KeypointSet l2 = keypoint_set({{0, 0}, {10 + delta, 0}});
    return pairwise_compatibility(disjoint_candidates(2), l1, l2, sigma)(0, 1);
  };
  EXPECT_NEAR(score_for(sigma), std::exp(-0.5), 1e-12);
  EXPECT_NEAR(score_for(-sigma), 0.6065306597126334, 1e-12);
  EXPECT_GT(score_for(3 * sigma - 1e-9), 0.0);
  EXPECT_EQ(score_for(3 * sigma + 1e-9), 0.0);
}

TEST(PairwiseCompatibility, ConflictingCandidatesScoreZero) {
  const KeypointSet l1 = keypoint_set({{0, 0}, {5, 0}});
  const KeypointSet l2 = keypoint_set({{0, 0}, {5, 0}, {0, 5}});
  UnaryMatches u;
  u.pairs = {{0, 0, 0.0}, {1, 0, 0.0}, {1, 1, 0.0}, {1, 2, 0.0}};
  const CompatibilityMatrix c = pairwise_compatibility(u, l1, l2, 0.5);
  EXPECT_EQ(c(0, 1), 0.0);  // share L2 keypoint 0
  EXPECT_EQ(c(1, 2), 0.0);  // share L1 keypoint 1
  EXPECT_NEAR(c(0, 2), 1.0, 1e-12);
  EXPECT_NEAR(c(0, 3), 1.0, 1e-12);
}

TEST(PairwiseCompatibility, SingleCandidateIsDegenerate) {
  const KeypointSet l = keypoint_set({{0, 0}});
  try {
    pairwise_compatibility(disjoint_candidates(1), l, l, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateProblem);
  }
}

TEST(PrincipalEigenvector, ThreeCliqueAmongFive) {
  const SpectralSolution s = principal_eigenvector(CompatibilityMatrix(clique(5, {0, 1, 2})));
  EXPECT_TRUE(s.converged);
  EXPECT_NEAR(s.eigenvalue, 2.0, 1e-9);
  for (int g = 0; g < 3; ++g) EXPECT_NEAR(s.eigenvector(g), 1.0 / std::sqrt(3.0), 1e-9);
  EXPECT_NEAR(s.eigenvector(3), 0.0, 1e-9);
  EXPECT_NEAR(s.eigenvector(4), 0.0, 1e-9);
}

TEST(PrincipalEigenvector, BipartiteGraphConverges) {
  // A single edge oscillates under plain power iteration (eigenvalues +-1).
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(4, 4);
  c(0, 1) = c(1, 0) = 1.0;
  c(1, 2) = c(2, 1) = 1.0;
  c(2, 3) = c(3, 2) = 1.0;
  const SpectralSolution s = principal_eigenvector(CompatibilityMatrix(c));
  EXPECT_TRUE(s.converged);
  EXPECT_NEAR(s.eigenvalue, dense_eigenvalues(c).maxCoeff(), 1e-9);
}

TEST(PrincipalEigenvector, TwoEqualBlocksAreFlaggedByEigengap) {
  const Eigen::MatrixXd c = clique(6, {0, 1, 2}) + clique(6, {3, 4, 5});
  const CompatibilityMatrix cm(c);
  const SpectralSolution s = principal_eigenvector(cm);
  EXPECT_NEAR(s.eigenvalue, 2.0, 1e-9);
  // The uniform start lies in the span of both block vectors.
  EXPECT_NEAR(s.eigenvector(0), s.eigenvector(3), 1e-9);
  const std::vector<int> both = {0, 1, 2, 3, 4, 5};
  EXPECT_NEAR(eigengap_measure(cm, both), 0.0, 1e-9);
}

TEST(PrincipalEigenvector, ZeroMatrixHasNoStructure) {
  try {
    principal_eigenvector(CompatibilityMatrix(Eigen::MatrixXd::Zero(4, 4)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoCompatibilityStructure);
  }
}

TEST(PrincipalEigenvector, RayleighQuotientMatchesDenseSolver) {
  Gen gen(51);
  for (int trial = 0; trial < 60; ++trial) {
    const int u = gen.integer(2, 50);
    Eigen::MatrixXd c = random_compatibility(gen, u, gen.uniform(0.1, 1.0));
    if (c.isZero(0.0)) c(0, 1) = c(1, 0) = 0.5;
    const SpectralSolution s = principal_eigenvector(CompatibilityMatrix(c));
    const double oracle = dense_eigenvalues(c).maxCoeff();
    EXPECT_NEAR(s.eigenvalue, oracle, 1e-6 * std::max(1.0, oracle)) << "trial " << trial;
    EXPECT_NEAR(s.eigenvector.norm(), 1.0, 1e-12);
    EXPECT_GE(s.eigenvector.minCoeff(), 0.0);
  }
}

TEST(GlobalScore, Examples) {
  const CompatibilityMatrix c(clique(5, {0, 1, 2}));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(5);
  x << 1, 1, 1, 0, 0;
  EXPECT_DOUBLE_EQ(global_score(x, c), 2.0);
  Eigen::VectorXd single = Eigen::VectorXd::Zero(5);
  single(4) = 1;
  EXPECT_EQ(global_score(single, c), 0.0);
  EXPECT_THROW(global_score(Eigen::VectorXd::Zero(5), c), Error);
}

TEST(GlobalScore, BoundedByLargestEigenvalue) {
  Gen gen(52);
  for (int trial = 0; trial < 100; ++trial) {
    const int u = gen.integer(2, 20);
    const Eigen::MatrixXd c = random_compatibility(gen, u, 0.6);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(u);
    for (int g = 0; g < u; ++g) x(g) = gen.coin(0.5) ? 1.0 : 0.0;
    if (x.isZero(0.0)) x(0) = 1.0;
    EXPECT_LE(global_score(x, CompatibilityMatrix(c)), dense_eigenvalues(c).maxCoeff() + 1e-9);
  }
}

TEST(MutualCompatibility, Examples) {
  const CompatibilityMatrix c(clique(5, {0, 1, 2}));
  const SpectralSolution s = principal_eigenvector(c);
  Eigen::VectorXd clique_ind = Eigen::VectorXd::Zero(5);
  clique_ind << 1, 1, 1, 0, 0;
  EXPECT_NEAR(mutual_compatibility_index(c, s.eigenvector, clique_ind), 1.0, 1e-12);

  Eigen::VectorXd single = Eigen::VectorXd::Zero(5);
  single(0) = 1;
  EXPECT_EQ(mutual_compatibility_index(c, s.eigenvector, single), 0.0);

  // Clique plus an isolated candidate, with a uniform v so the isolated one counts.
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(5, 1 / std::sqrt(5.0));
  Eigen::VectorXd with_isolated = clique_ind;
  with_isolated(4) = 1;
  EXPECT_LT(mutual_compatibility_index(c, uniform, with_isolated), mutual_compatibility_index(c, uniform, clique_ind));
  EXPECT_THROW(mutual_compatibility_index(c, uniform, Eigen::VectorXd::Zero(5)), Error);
}

TEST(Eigengap, CliqueGivesSizeOverCandidates) {
  for (int k = 2; k <= 6; ++k) {
    const int u = 9;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(u, u);
    std::vector<int> members;
    for (int g = 0; g < k; ++g) members.push_back(g);
    for (int g : members) {
      for (int h : members) {
        if (g != h) c(g, h) = 1.0;
      }
    }
    EXPECT_NEAR(eigengap_measure(CompatibilityMatrix(c), members), static_cast<double>(k) / u, 1e-9) << k;
  }
}

TEST(Eigengap, SingleSelectionIsZero) {
  const std::vector<int> one = {1};
  EXPECT_EQ(eigengap_measure(CompatibilityMatrix(clique(4, {0, 1, 2})), one), 0.0);
}

TEST(TopTwoEigenvalues, MatchDenseSolver) {
  Gen gen(53);
  for (int trial = 0; trial < 60; ++trial) {
    const int u = gen.integer(2, 30);
    const Eigen::MatrixXd c = random_compatibility(gen, u, gen.uniform(0.2, 1.0));
    const Eigen::VectorXd oracle = dense_eigenvalues(c);
    const auto [l1, l2] = top_two_eigenvalues(c);
    EXPECT_NEAR(l1, oracle(u - 1), 1e-6) << "trial " << trial;
    EXPECT_NEAR(l2, oracle(u - 2), 1e-5) << "trial " << trial;
  }
}

TEST(GreedySelect, ThreeCliqueExample) {
  const CompatibilityMatrix c(clique(5, {0, 1, 2}));
  const MatchSelection m = greedy_select(c, principal_eigenvector(c), disjoint_candidates(5));
  const std::vector<std::pair<int, int>> expected = {{0, 0}, {1, 1}, {2, 2}};
  EXPECT_EQ(m.selected, expected);
  EXPECT_NEAR(m.mutual_compatibility, 1.0, 1e-12);
  EXPECT_NEAR(m.global_score, 2.0, 1e-12);
  EXPECT_NEAR(m.eigengap, 3.0 / 5.0, 1e-9);
  EXPECT_EQ(m.indicator.sum(), 3.0);
}

TEST(GreedySelect, SingleCandidateIsCommitted) {
  const CompatibilityMatrix c(Eigen::MatrixXd::Zero(1, 1));
  SpectralSolution s;
  s.eigenvector = Eigen::VectorXd::Ones(1);
  const MatchSelection m = greedy_select(c, s, disjoint_candidates(1));
  ASSERT_EQ(m.selected.size(), 1u);
  EXPECT_EQ(m.mutual_compatibility, 0.0);  // w vanishes under the zero diagonal
  EXPECT_EQ(m.eigengap, 0.0);
}

TEST(GreedySelect, ExactRigidTenPointsSelectsAllAndIsOptimal) {
  Gen gen(54);
  const auto inst = random_instance(gen, 10, 0, 0.0);
  const CompatibilityMatrix c = pairwise_compatibility(inst.unary, inst.l1, inst.l2, 0.5);
  const MatchSelection m = greedy_select(c, principal_eigenvector(c), inst.unary);
  EXPECT_EQ(m.selected.size(), 10u);
  EXPECT_NEAR(m.global_score, exhaustive_optimum(c, inst.unary).score, 1e-12);
}

TEST(GreedySelect, RespectsUniquenessAndBeatsFirstCandidate) {
  Gen gen(55);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = random_instance(gen, gen.integer(2, 8), gen.integer(0, 5), gen.uniform(0.0, 0.4));
    const CompatibilityMatrix c = pairwise_compatibility(inst.unary, inst.l1, inst.l2, 0.5);
    if (c.scores().isZero(0.0)) continue;
    const SpectralSolution s = principal_eigenvector(c);
    const MatchSelection m = greedy_select(c, s, inst.unary);
    EXPECT_TRUE(satisfies_uniqueness(m.selected));
    Eigen::VectorXd first = Eigen::VectorXd::Zero(c.size());
    first(m.candidates.front()) = 1.0;
    EXPECT_GE(m.global_score, global_score(first, c) - 1e-12);
    EXPECT_EQ(m.indicator.sum(), static_cast<double>(m.selected.size()));
  }
}

TEST(SatisfiesUniqueness, DetectsRepeats) {
  const std::vector<std::pair<int, int>> ok = {{0, 1}, {1, 0}, {2, 2}};
  const std::vector<std::pair<int, int>> first = {{0, 1}, {0, 2}};
  const std::vector<std::pair<int, int>> second = {{0, 1}, {1, 1}};
  EXPECT_TRUE(satisfies_uniqueness(ok));
  EXPECT_FALSE(satisfies_uniqueness(first));
  EXPECT_FALSE(satisfies_uniqueness(second));
}

TEST(RestrictTo, ZeroesRowsOutsideKeep) {
  Gen gen(56);
  const Eigen::MatrixXd c = random_compatibility(gen, 6, 1.0);
  const std::vector<int> keep = {1, 4};
  const CompatibilityMatrix r = restrict_to(CompatibilityMatrix(c), keep);
  for (int g = 0; g < 6; ++g) {
    for (int h = 0; h < 6; ++h) {
      const bool kept = (g == 1 || g == 4) && (h == 1 || h == 4);
      EXPECT_EQ(r(g, h), kept ? c(g, h) : 0.0);
    }
  }
}

TEST(Optimism, RestrictedScoreNeverExceedsFullScore) {
  Gen gen(57);
  for (int trial = 0; trial < 100; ++trial) {
    const int u = gen.integer(2, 20);
    const CompatibilityMatrix c(random_compatibility(gen, u, gen.uniform(0.2, 1.0)));
    std::vector<int> keep;
    for (int g = 0; g < u; ++g) {
      if (gen.coin(0.5)) keep.push_back(g);
    }
    const CompatibilityMatrix c_star = restrict_to(c, keep);
    Eigen::VectorXd m = Eigen::VectorXd::Zero(u);
    for (int g = 0; g < u; ++g) m(g) = gen.coin(0.5) ? 1.0 : 0.0;
    if (m.isZero(0.0)) m(gen.integer(0, u - 1)) = 1.0;
    EXPECT_GE(global_score(m, c), global_score(m, c_star) - 1e-12);

    Eigen::VectorXd inside = Eigen::VectorXd::Zero(u);
    for (int g : keep) inside(g) = gen.coin(0.5) ? 1.0 : 0.0;
    if (inside.isZero(0.0)) continue;
    EXPECT_NEAR(global_score(inside, c), global_score(inside, c_star), 1e-12);
  }
}

TEST(CorrectedMatrix, PrincipalVectorIsNormalizedIndicator) {
  Gen gen(58);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = random_instance(gen, gen.integer(2, 15), gen.integer(1, 10), 0.0);
    const CompatibilityMatrix c = pairwise_compatibility(inst.unary, inst.l1, inst.l2, 0.5);
    const CompatibilityMatrix c_bar = restrict_to(c, inst.truth);
    const SpectralSolution s = principal_eigenvector(c_bar);
    const double expected = 1.0 / std::sqrt(static_cast<double>(inst.truth.size()));
    for (Eigen::Index g = 0; g < c.size(); ++g) {
      const bool in_truth = g < static_cast<Eigen::Index>(inst.truth.size());
      EXPECT_NEAR(s.eigenvector(g), in_truth ? expected : 0.0, 1e-6);
    }
    EXPECT_LT((dense_principal_vector(c_bar.scores()) - s.eigenvector).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(GreedySelect, MatchesExhaustiveOptimumWithoutNoise) {
  Gen gen(59);
  for (int trial = 0; trial < 25; ++trial) {
    const int inliers = gen.integer(2, 8);
    const auto inst = random_instance(gen, inliers, gen.integer(0, 12 - inliers), 0.0);
    const CompatibilityMatrix c = pairwise_compatibility(inst.unary, inst.l1, inst.l2, 0.5);
    const MatchSelection m = greedy_select(c, principal_eigenvector(c), inst.unary);
    EXPECT_TRUE(satisfies_uniqueness(m.selected));
    EXPECT_NEAR(m.global_score, exhaustive_optimum(c, inst.unary).score, 1e-9) << "trial " << trial;
  }
}

TEST(GreedySelect, NearExhaustiveOptimumWithNoise) {
  Gen gen(60);
  for (int trial = 0; trial < 25; ++trial) {
    const int inliers = gen.integer(2, 8);
    const auto inst = random_instance(gen, inliers, gen.integer(0, 12 - inliers), gen.uniform(0.05, 0.3));
    const CompatibilityMatrix c = pairwise_compatibility(inst.unary, inst.l1, inst.l2, 0.5);
    if (c.scores().isZero(0.0)) continue;
    const MatchSelection m = greedy_select(c, principal_eigenvector(c), inst.unary);
    EXPECT_TRUE(satisfies_uniqueness(m.selected));
    EXPECT_GE(m.global_score, 0.9 * exhaustive_optimum(c, inst.unary).score) << "trial " << trial;
  }
}

}  // namespace
}  // namespace radar_odom
