#include "ddsel/bench.hpp"
#include "ddsel/lp.hpp"
#include "ddsel/theory.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace ddsel {
namespace {

double sample_variance(const Vector& v) {
  const double mean = v.mean();
  return (v.array() - mean).square().sum() / static_cast<double>(v.size() - 1);
}

double sample_correlation(const Vector& a, const Vector& b) {
  const Vector ca = a.array() - a.mean(), cb = b.array() - b.mean();
  return ca.dot(cb) / (ca.norm() * cb.norm());
}

TEST(TypeSynth, SameSeedIsBitIdentical) {
  SynthSpec spec;
  spec.n = 30;
  spec.p = 40;
  spec.rho = 0.5;
  spec.seed = 42;
  const Instance a = gen_type_synth(spec), b = gen_type_synth(spec);
  EXPECT_TRUE(a.problem.X() == b.problem.X());
  EXPECT_TRUE(a.problem.y() == b.problem.y());
  EXPECT_EQ(a.sigma, b.sigma);
  spec.seed = 43;
  EXPECT_FALSE(gen_type_synth(spec).problem.y() == a.problem.y());
}

TEST(TypeSynth, StandardizedColumnsAndPlantedSupport) {
  SynthSpec spec;
  spec.n = 100;
  spec.p = 1000;
  const Instance inst = gen_type_synth(spec);
  const Matrix& x = inst.problem.X();
  EXPECT_EQ(x.rows(), 100);
  EXPECT_EQ(x.cols(), 1000);
  EXPECT_LE(x.colwise().mean().cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((x.colwise().norm().array() - 1.0).abs().maxCoeff(), 1e-12);
  EXPECT_EQ(support_of(inst.beta_star), equispaced_support(1000, 10));
  EXPECT_EQ(inst.beta_star.sum(), 10.0);
}

TEST(TypeSynth, SnrCalibration) {
  double ratio = 0.0;
  const int seeds = 100;
  for (int seed = 1; seed <= seeds; ++seed) {
    SynthSpec spec;
    spec.n = 100;
    spec.p = 20;
    spec.k_star = 5;
    spec.snr = 4.0;
    spec.seed = static_cast<std::uint64_t>(seed);
    const Instance inst = gen_type_synth(spec);
    const Vector signal = inst.problem.X() * inst.beta_star;
    EXPECT_NEAR(sample_variance(signal) / (inst.sigma * inst.sigma), 4.0, 1e-9);
    ratio += sample_variance(signal) / sample_variance(inst.problem.y() - signal);
  }
  EXPECT_NEAR(ratio / seeds, 4.0, 0.4);
}

TEST(TypeSynth, UncorrelatedColumnsAtRhoZero) {
  double total = 0.0;
  int pairs = 0;
  for (int seed = 1; seed <= 100; ++seed) {
    SynthSpec spec;
    spec.n = 100;
    spec.p = 10;
    spec.k_star = 2;
    spec.seed = static_cast<std::uint64_t>(seed);
    const Matrix& x = gen_type_synth(spec).problem.X();
    for (Index i = 0; i < 10; ++i)
      for (Index j = i + 1; j < 10; ++j, ++pairs) total += std::abs(sample_correlation(x.col(i), x.col(j)));
  }
  EXPECT_LE(total / pairs, 3.0 / std::sqrt(100.0));
}

TEST(TypeSynth, NeighbourCorrelationFollowsRho) {
  double total = 0.0;
  for (int seed = 1; seed <= 50; ++seed) {
    SynthSpec spec;
    spec.n = 200;
    spec.p = 6;
    spec.k_star = 2;
    spec.rho = 0.6;
    spec.seed = static_cast<std::uint64_t>(seed);
    const Matrix& x = gen_type_synth(spec).problem.X();
    total += sample_correlation(x.col(2), x.col(3));
  }
  EXPECT_NEAR(total / 50, 0.6, 0.05);
}

TEST(TypeSynth, NoiselessReferenceDeltaIsZero) {
  SynthSpec spec;
  spec.n = 40;
  spec.p = 30;
  spec.k_star = 4;
  spec.snr = kInf;
  const Instance inst = gen_type_synth(spec);
  EXPECT_EQ(inst.sigma, 0.0);
  EXPECT_NEAR(reference_delta(inst.problem, inst.beta_star), 0.0, 1e-12);
}

TEST(EquispacedSupport, RoundedPositions) {
  EXPECT_EQ(equispaced_support(10, 4), (Support{0, 3, 6, 9}));
  EXPECT_EQ(equispaced_support(200, 10), (Support{0, 22, 44, 66, 88, 111, 133, 155, 177, 199}));
  EXPECT_EQ(equispaced_support(3, 3), (Support{0, 1, 2}));
  EXPECT_EQ(equispaced_support(7, 1), (Support{0}));
  EXPECT_THROW(equispaced_support(3, 4), Error);
}

TEST(Example1Generator, Construction) {
  const Example1 ex = gen_example1(10, 1.0 / 22.0);
  const ProblemData& prob = ex.instance.problem;
  EXPECT_EQ(prob.p(), 11);
  EXPECT_TRUE(prob.y() == prob.X().col(0) - prob.X().col(1));
  EXPECT_DOUBLE_EQ(ex.l1_failure_product, 9.0 / 22.0);
  EXPECT_LT(ex.l1_failure_product, 2.0);
  EXPECT_DOUBLE_EQ(ex.recovery_threshold, (1.0 / 22.0) / (1.0 + 1.0 / 22.0));
  EXPECT_EQ(brute_force_dds(prob.with_delta(0.9 * ex.recovery_threshold)).objective, 2);
}

TEST(Example1Generator, L1PicksDenseRepresentation) {
  const Example1 ex = gen_example1(10, 1.0 / 22.0);
  const Solution l1 = solve_l1_dantzig(ex.instance.problem.with_delta(1e-6));
  EXPECT_GE(l1.objective, 9);
  EXPECT_LT(l1.beta.lpNorm<1>(), 2.0);
}

TEST(CorrPairGenerator, CorrelationAndSupport) {
  double total = 0.0;
  for (int seed = 1; seed <= 20; ++seed) {
    const Instance inst = gen_example_corr_pair(100, 8, 0.7, 10.0, static_cast<std::uint64_t>(seed));
    const double r = sample_correlation(inst.problem.X().col(0), inst.problem.X().col(1));
    EXPECT_NEAR(r, 0.7, 0.15);
    total += r;
    EXPECT_EQ(support_of(inst.beta_star), (Support{0, 1}));
    EXPECT_EQ(inst.beta_star[0], 1.0);
    EXPECT_EQ(inst.beta_star[1], -1.0);
  }
  EXPECT_NEAR(total / 20, 0.7, 0.05);
}

TEST(CorrPairGenerator, SomeGridPointRecoversSupport) {
  const Instance inst = gen_example_corr_pair(60, 8, 0.7, 10.0, 3);
  const double bar = reference_delta(inst.problem, inst.beta_star);
  const PathResult r = path_run(inst.problem, default_grid(bar, 8), PathMethod::kL0);
  bool found = false;
  for (const PathPoint& pt : r.points) {
    if (pt.solution && pt.solution->support == Support{0, 1}) found = true;
  }
  EXPECT_TRUE(found);
}

TEST(Evaluate, ExactAndZeroEstimates) {
  SynthSpec spec;
  spec.n = 30;
  spec.p = 15;
  spec.k_star = 3;
  const Instance inst = gen_type_synth(spec);
  const Metrics exact = evaluate(inst.problem, inst.beta_star, inst.beta_star);
  EXPECT_EQ(exact.est_error, 0.0);
  EXPECT_EQ(exact.selection_error, 0);
  EXPECT_EQ(exact.pred_error, 0.0);
  EXPECT_EQ(exact.nonzeros, 3);
  const Metrics zero = evaluate(inst.problem, inst.beta_star, Vector::Zero(15));
  EXPECT_EQ(zero.est_error, 3.0);
  EXPECT_EQ(zero.selection_error, 3);
  EXPECT_DOUBLE_EQ(zero.pred_error, 1.0);
  EXPECT_EQ(zero.nonzeros, 0);
}

TEST(Evaluate, MatchesDirectComputation) {
  std::mt19937_64 rng(1);
  const Matrix x = testing::gaussian_matrix(rng, 20, 8);
  const ProblemData prob(x, testing::gaussian_vector(rng, 20));
  Vector star = Vector::Zero(8), hat = Vector::Zero(8);
  star << 1, 0, -2, 0, 0, 0.5, 0, 0;
  hat << 0.9, 0.1, -2.2, 0, 0, 0, 0, 0.3;
  const Metrics m = evaluate(prob, star, hat);
  EXPECT_NEAR(m.est_error, 0.01 + 0.01 + 0.04 + 0.25 + 0.09, 1e-12);
  EXPECT_EQ(m.selection_error, 3);
  EXPECT_EQ(m.nonzeros, 4);
  const Vector fit = x * star;
  EXPECT_NEAR(m.pred_error, (x * hat - fit).squaredNorm() / fit.squaredNorm(), 1e-12);
  try {
    evaluate(prob, Vector::Zero(8), hat);
    FAIL() << "expected ZeroSignal";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroSignal);
  }
}

TEST(DefaultGrid, LogSpacedAndDescending) {
  const auto grid = default_grid(2.0);
  ASSERT_EQ(grid.size(), 30u);
  EXPECT_NEAR(grid.front(), 3.0, 1e-12);
  EXPECT_NEAR(grid.back(), 0.4, 1e-12);
  for (size_t i = 2; i < grid.size(); ++i) {
    EXPECT_LT(grid[i], grid[i - 1]);
    EXPECT_NEAR(grid[i] / grid[i - 1], grid[1] / grid[0], 1e-12);
  }
  EXPECT_THROW(default_grid(0.0), Error);
}

TEST(Path, LargeDeltaGivesZeroPath) {
  SynthSpec spec;
  spec.n = 20;
  spec.p = 10;
  spec.k_star = 2;
  const Instance inst = gen_type_synth(spec);
  const double top = inst.problem.correlations().cwiseAbs().maxCoeff();
  for (PathMethod method : {PathMethod::kL0, PathMethod::kL1}) {
    const PathResult r = path_run(inst.problem, {top, 2 * top, 1.5 * top}, method);
    EXPECT_EQ(r.grid, (std::vector<double>{2 * top, 1.5 * top, top}));
    for (const PathPoint& pt : r.points) {
      ASSERT_TRUE(pt.solution.has_value());
      EXPECT_EQ(pt.solution->objective, 0);
    }
  }
}

TEST(Path, Example1SizeDropsAcrossThreshold) {
  const Example1 ex = gen_example1(10, 1.0 / 22.0);
  const double t = ex.recovery_threshold;
  const PathResult r = path_run(ex.instance.problem, {0.5 * t, 0.9 * t, 0.98 * t, 1.02 * t, 1.1 * t}, PathMethod::kL0);
  for (const PathPoint& pt : r.points) {
    ASSERT_TRUE(pt.solution.has_value());
    EXPECT_TRUE(pt.optimal);
    if (pt.delta < t) {
      EXPECT_EQ(pt.solution->objective, 2) << pt.delta;
      EXPECT_EQ(pt.solution->support, (Support{0, 1}));
    }
  }
  // Above the threshold the one-column fit on x₁ is feasible.
  EXPECT_LE(r.points.front().solution->objective, 1);
}

TEST(Path, OptimalSizesNonincreasingInDelta) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 3; ++trial) {
    const ProblemData prob(testing::gaussian_matrix(rng, 16, 8), testing::gaussian_vector(rng, 16));
    const double top = prob.correlations().cwiseAbs().maxCoeff();
    std::vector<double> grid;
    for (int i = 1; i <= 8; ++i) grid.push_back(top * 0.1 * i);
    const PathResult r = path_run(prob, grid, PathMethod::kL0);
    for (size_t i = 1; i < r.points.size(); ++i) {
      const PathPoint &looser = r.points[i - 1], &tighter = r.points[i];
      ASSERT_TRUE(looser.optimal && tighter.optimal);
      EXPECT_LE(looser.solution->objective, tighter.solution->objective);
    }
    for (const auto& [size, index] : r.representatives) {
      for (const PathPoint& pt : r.points) {
        if (pt.solution->objective == size) EXPECT_GE(pt.solution->residual_inf, r.points[index].solution->residual_inf);
      }
    }
  }
}

TEST(Compare, RowsForEveryEstimator) {
  SynthSpec spec;
  spec.n = 40;
  spec.p = 30;
  spec.k_star = 3;
  const Instance inst = gen_type_synth(spec);
  CompareOptions options;
  options.grid_points = 5;
  const auto rows = compare(inst, options);
  std::vector<std::string> names;
  for (const CompareRow& row : rows) {
    names.push_back(row.estimator);
    EXPECT_GE(row.metrics.est_error, 0.0);
    EXPECT_LE(row.metrics.selection_error, 30);
  }
  for (const char* expected : {"L0-DS", "L0-DS-Pol", "L1-DS", "L1-DS-Pol"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), expected), names.end()) << expected;
  }
}

}  // namespace
}  // namespace ddsel
