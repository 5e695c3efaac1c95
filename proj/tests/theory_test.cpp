#include "ddsel/bench.hpp"
#include "ddsel/milo.hpp"
#include "ddsel/theory.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace ddsel {
namespace {

using testing::gaussian_matrix;
using testing::gaussian_vector;
using testing::orthonormal_design;

// Points of the solution set: each free coordinate at −δ, 0 or +δ offsets.
std::vector<Vector> sample_set(const OrthoSolutionSet& set, Index p) {
  std::vector<Vector> out;
  const int k = set.k;
  int combos = 1;
  for (int i = 0; i < k; ++i) combos *= 3;
  for (int code = 0; code < combos; ++code) {
    Vector beta = Vector::Zero(p);
    int c = code;
    for (int i = 0; i < k; ++i, c /= 3) {
      const double u = (c % 3 - 1) * set.slack;
      beta[set.support[static_cast<size_t>(i)]] = set.base[i] + u;
    }
    out.push_back(beta);
  }
  return out;
}

TEST(OrthonormalSolution, SmallExample) {
  Vector c(3);
  c << 5.0, 1.0, 0.2;
  const OrthoSolutionSet set = orthonormal_solution(c, 0.5);
  EXPECT_EQ(set.k, 2);
  EXPECT_EQ(set.support, (Support{0, 1}));
  EXPECT_EQ(set.base, (Vector(2) << 5.0, 1.0).finished());
  Vector inside(3), outside(3);
  inside << 5.4, 0.6, 0.0;
  outside << 5.0, 1.0, 0.1;
  EXPECT_TRUE(set.contains(inside));
  EXPECT_FALSE(set.contains(outside));
}

TEST(OrthonormalSolution, LargeDeltaGivesZero) {
  Vector c(3);
  c << 5.0, -1.0, 0.2;
  EXPECT_EQ(orthonormal_solution(c, 6.0).k, 0);
  EXPECT_TRUE(orthonormal_solution(c, 7.0).contains(Vector::Zero(3)));
}

TEST(OrthonormalSolution, TieAtThresholdThrows) {
  Vector c(2);
  c << 1.0, 0.5;
  try {
    orthonormal_solution(c, 0.5);
    FAIL() << "expected TieAtThreshold";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTieAtThreshold);
  }
}

TEST(OrthonormalSolution, SetMembersAreFeasibleAndOptimal) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const Index p = 3 + trial % 6;
    const Matrix x = orthonormal_design(rng, 12, p);
    const ProblemData base(x, gaussian_vector(rng, 12));
    const double delta = 0.3 * base.correlations().cwiseAbs().maxCoeff() * (0.5 + 0.1 * trial);
    const ProblemData prob = base.with_delta(delta);
    const OrthoSolutionSet set = orthonormal_solution(prob.correlations(), delta);
    EXPECT_EQ(brute_force_dds(prob).objective, set.k);
    for (const Vector& beta : sample_set(set, p)) {
      EXPECT_TRUE(set.contains(beta));
      EXPECT_LE(residual_inf(prob, beta), delta + 1e-9);
      EXPECT_LE(static_cast<int>(support_of(beta).size()), set.k);
    }
  }
}

TEST(BruteForce, LargeDeltaGivesEmptySupport) {
  std::mt19937_64 rng(2);
  const ProblemData base(gaussian_matrix(rng, 10, 5), gaussian_vector(rng, 10));
  const BruteForceResult r = brute_force_dds(base.with_delta(base.correlations().cwiseAbs().maxCoeff()));
  EXPECT_EQ(r.objective, 0);
  EXPECT_TRUE(r.support.empty());
}

TEST(BruteForce, Example1RecoversSparseRepresentation) {
  const Example1 ex = gen_example1(10, 1.0 / 22.0);
  const BruteForceResult r = brute_force_dds(ex.instance.problem.with_delta(0.9 * ex.recovery_threshold));
  EXPECT_EQ(r.objective, 2);
  EXPECT_EQ(r.support, (Support{0, 1}));
}

TEST(BruteForce, AgreesWithOrthonormalCountAndBranchAndBound) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 8; ++trial) {
    const ProblemData base(orthonormal_design(rng, 16, 8), gaussian_vector(rng, 16));
    const double delta = base.correlations().cwiseAbs().maxCoeff() * (0.1 + 0.1 * trial);
    const ProblemData prob = base.with_delta(delta);
    const int k = orthonormal_solution(prob.correlations(), delta).k;
    EXPECT_EQ(brute_force_dds(prob).objective, k);
    EXPECT_EQ(branch_and_bound(build_formulation(prob)).incumbent.objective, k);
  }
}

TEST(BruteForce, TooLargeThrows) {
  std::mt19937_64 rng(4);
  const ProblemData prob(gaussian_matrix(rng, 10, 16), gaussian_vector(rng, 10), 0.1);
  EXPECT_THROW(brute_force_dds(prob), Error);
}

TEST(Gamma, IdentityIsOne) {
  const Matrix x = Matrix::Identity(6, 6);
  for (int k = 1; k <= 6; ++k) EXPECT_NEAR(gamma_constant(x, k), 1.0, 1e-12);
}

TEST(Gamma, DuplicateColumnGivesZeroForPairs) {
  std::mt19937_64 rng(5);
  Matrix x = gaussian_matrix(rng, 8, 5);
  x.col(3) = x.col(1);
  EXPECT_NEAR(gamma_constant(x, 2), 0.0, 1e-10);
  EXPECT_GT(gamma_constant(x, 1), 0.0);
}

TEST(Gamma, MatchesPairEnumeration) {
  std::mt19937_64 rng(6);
  const Matrix x = gaussian_matrix(rng, 10, 6);
  double best = kInf;
  int pairs = 0;
  testing::for_each_subset(6, 2, [&](const Support& s) {
    Matrix sub(10, 2);
    sub << x.col(s[0]), x.col(s[1]);
    // σ_min² is the smaller eigenvalue of the 2×2 Gram matrix.
    const Eigen::Matrix2d g = sub.transpose() * sub;
    const double tr = g.trace(), det = g.determinant();
    best = std::min(best, std::sqrt(0.5 * (tr - std::sqrt(tr * tr - 4.0 * det))));
    ++pairs;
    return true;
  });
  EXPECT_EQ(pairs, 15);
  EXPECT_NEAR(gamma_constant(x, 2), best, 1e-10);
}

TEST(Gamma, NonincreasingInK) {
  std::mt19937_64 rng(7);
  const Matrix x = gaussian_matrix(rng, 12, 7);
  for (int k = 1; k < 7; ++k) EXPECT_LE(gamma_constant(x, k + 1), gamma_constant(x, k) + 1e-12);
}

TEST(Gamma, SupersetRestrictionNeverBelowUnrestricted) {
  std::mt19937_64 rng(8);
  const Matrix x = gaussian_matrix(rng, 12, 7);
  const Support j{2, 5};
  EXPECT_GE(gamma_constant(x, 4, &j), gamma_constant(x, 4) - 1e-12);
}

TEST(Kappa, Example1ConeContainsNullDirection) {
  const Example1 ex = gen_example1(10, 1.0 / 22.0);
  EXPECT_LT(kappa_estimate(ex.instance.problem.X(), 2, 1.0), 1e-3);
}

TEST(Kappa, IdentityAgainstGamma) {
  const Matrix x = Matrix::Identity(5, 5);
  const double kappa = kappa_estimate(x, 2, 1.0);
  EXPECT_GE(kappa, gamma_constant(x, 4) / std::sqrt(2.0));
  EXPECT_NEAR(kappa, 1.0, 1e-6);
}

TEST(Kappa, DeterministicForFixedSeed) {
  std::mt19937_64 rng(9);
  const Matrix x = gaussian_matrix(rng, 10, 6);
  KappaOptions o;
  o.seed = 17;
  EXPECT_EQ(kappa_estimate(x, 2, 1.0, o), kappa_estimate(x, 2, 1.0, o));
}

TEST(Kappa, GridAndEstimateBoundedBySqrtTwoGamma) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 4; ++trial) {
    const Matrix x = gaussian_matrix(rng, 8, 4);
    const double grid = kappa_grid(x, 1, 1.0);
    EXPECT_LE(grid, std::sqrt(2.0) * gamma_constant(x, 2) + 1e-9) << "trial " << trial;
    // Both are upper estimates of the same minimum; the finer search should
    // not be far above the grid.
    EXPECT_LE(kappa_estimate(x, 1, 1.0), grid * 1.05 + 1e-9);
  }
}

TEST(ErrorBounds, ExactEstimateHasZeroErrors) {
  SynthSpec spec;
  spec.n = 30;
  spec.p = 12;
  spec.k_star = 3;
  const Instance inst = gen_type_synth(spec);
  const ErrorBoundReport r = error_bound_check(inst.problem, inst.beta_star, inst.beta_star, 0.0, inst.sigma);
  EXPECT_EQ(r.l1_lhs, 0.0);
  EXPECT_EQ(r.l2sq_lhs, 0.0);
  EXPECT_EQ(r.pred_lhs, 0.0);
  EXPECT_TRUE(r.sparsity_ok && r.l1_ok && r.l2sq_ok && r.pred_ok);
  EXPECT_NEAR(r.delta, inst.sigma * std::sqrt(2.0 * std::log(12.0)), 1e-12);
}

TEST(ErrorBounds, NoiselessOptimumIsNoLargerThanTruth) {
  SynthSpec spec;
  spec.n = 20;
  spec.p = 10;
  spec.k_star = 3;
  spec.snr = kInf;
  const Instance inst = gen_type_synth(spec);
  const BruteForceResult exact = brute_force_dds(inst.problem.with_delta(1e-9));
  const Solution s = polish(inst.problem.with_delta(1e-9), exact.support);
  const ErrorBoundReport r = error_bound_check(inst.problem, inst.beta_star, s.beta, 0.0, inst.sigma);
  EXPECT_TRUE(r.sparsity_ok);
  EXPECT_LE(exact.objective, 3);
}

TEST(ErrorBounds, LargeGammaEnumerationNeedsSuppliedValue) {
  SynthSpec spec;
  spec.n = 60;
  spec.p = 120;
  spec.k_star = 5;
  const Instance inst = gen_type_synth(spec);
  try {
    error_bound_check(inst.problem, inst.beta_star, inst.beta_star, 0.0, inst.sigma);
    FAIL() << "expected GammaUnavailable";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGammaUnavailable);
  }
  EXPECT_NO_THROW(error_bound_check(inst.problem, inst.beta_star, inst.beta_star, 0.0, inst.sigma, 0.5));
}

}  // namespace
}  // namespace ddsel
