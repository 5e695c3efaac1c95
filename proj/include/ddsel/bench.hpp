#pragma once

#include "ddsel/core.hpp"
#include "ddsel/milo.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ddsel {

struct SynthSpec {
  Index n = 100;
  Index p = 200;
  double rho = 0.0;
  int k_star = 10;
  double snr = 10.0;
  std::uint64_t seed = 1;
};

struct Instance {
  ProblemData problem;
  Vector beta_star;
  double sigma = 0.0;
};

/// Indices round(1 + (t−1)(p−1)/(k−1)) − 1 for t = 1..k, deduplicated.
Support equispaced_support(Index p, int k);

/// Rows of X ~ N(0, Σ) with Σ_ij = ρ^|i−j| (drawn by an AR(1) recursion
/// across columns), columns standardized, β* with k* equispaced ones,
/// y = Xβ* + ε with σ² = sample variance of Xβ* divided by the SNR.
/// An infinite SNR gives σ = 0.
Instance gen_type_synth(const SynthSpec& spec);

struct Example1 {
  Instance instance;
  double tau = 0.0;
  /// Sparse recovery holds for δ below τ/(1+τ).
  double recovery_threshold = 0.0;
  /// The ℓ1 estimator picks the dense representation while τ(n−1) < 2.
  double l1_failure_product = 0.0;
};

/// Literal, unstandardized construction with p = n + 1:
/// x₁ = (1, τ, …, τ), x_j = e_{j−1} for j ≥ 2, y = x₁ − x₂.
/// A positive snr adds Gaussian noise.
Example1 gen_example1(Index n, double tau, double snr = 0.0, std::uint64_t seed = 1);

/// Independent standard normal columns except corr(x₁, x₂) = corr,
/// standardized; β* = (1, −1, 0, …).
Instance gen_example_corr_pair(Index n, Index p, double corr = 0.7, double snr = 10.0, std::uint64_t seed = 1);

struct Metrics {
  double est_error = 0.0;
  int selection_error = 0;
  double pred_error = 0.0;
  int nonzeros = 0;
};

/// Throws ZeroSignal when Xβ* = 0.
Metrics evaluate(const ProblemData& problem, const Vector& beta_star, const Vector& beta_hat);

/// `points` log-spaced values in [lo·δ̄, hi·δ̄], descending.
std::vector<double> default_grid(double delta_bar, int points = 30, double lo = 0.2, double hi = 1.5);

enum class PathMethod { kL0, kL1 };

struct PathPoint {
  double delta = 0.0;
  std::optional<Solution> solution;
  bool optimal = false;
  std::string error;
};

struct PathResult {
  std::vector<double> grid;
  std::vector<PathPoint> points;
  /// For each model size, the index of the point with the smallest residual.
  std::vector<std::pair<int, size_t>> representatives;
};

struct PathOptions {
  IntelligenceConfig milo;
  /// Seed the solve at each δ with the previous point's solution when it
  /// stays feasible.
  bool warm_chain = true;
};

/// Solves along a descending grid. Per-point failures are recorded, not thrown.
PathResult path_run(const ProblemData& problem, std::vector<double> grid, PathMethod method,
                    const PathOptions& options = {});

/// Estimator rows for one replicate at the δ minimizing each estimator's
/// estimation error over the grid.
struct CompareRow {
  std::string estimator;
  double delta = 0.0;
  Metrics metrics;
};

struct CompareOptions {
  std::vector<double> grid_multipliers;  // empty: default_grid multipliers
  int grid_points = 30;
  IntelligenceConfig milo;
  int workers = 1;
};

/// L0, L0-Pol, L1, L1-Pol and the heuristic warm start on one instance.
std::vector<CompareRow> compare(const Instance& instance, const CompareOptions& options = {});

}  // namespace ddsel
