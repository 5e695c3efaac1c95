#pragma once

#include "ddsel/core.hpp"
#include "ddsel/lp.hpp"

#include <optional>
#include <vector>

namespace ddsel {

struct AdmmState {
  Vector beta;
  Vector alpha;
  Vector nu;
  double lambda = 1.0;
  int iteration = 0;
};

struct AdmmOptions {
  int max_iter = 500;
  double tol1 = 1e-4;
  double tol2 = 1e-4;
  DualProxOptions prox;
  /// Strong-convexity weight for the projection; 0 means the exact projection.
  double prox_tau = 0.0;
};

struct AdmmResult {
  Vector beta_sparse;
  /// Feasible within feas_tol after repair.
  Vector alpha_feasible;
  AdmmState state;
  bool converged = false;
  /// True when the last projection needed a tighter re-solve or an LP repair.
  bool repaired = false;
};

/// Alternates a hard-thresholding step, a projection onto the Dantzig polytope
/// and a multiplier update, stopping on relative iterate and coupling change.
AdmmResult admm_run(const ProblemData& problem, double lambda, const AdmmState* init = nullptr,
                    const AdmmOptions& options = {});

enum class PenaltyKind { kLog, kPower };

/// Concave surrogate of the ℓ0 count, parameterized by γ.
///   Log:   ρ(t) = log(t/γ + 1) / log(1/γ + 1)
///   Power: ρ(t) = t^γ
struct PenaltyFamily {
  static constexpr double kMaxWeight = 1e8;

  PenaltyKind kind = PenaltyKind::kLog;
  double gamma = 1e-2;

  double value(double t) const;
  /// ρ′(t) for t ≥ 0, capped at kMaxWeight.
  double derivative(double t) const;
  /// h(β) = Σ ρ(|β_i|).
  double objective(const Vector& beta) const;
  Vector weights(const Vector& beta) const;
};

struct GammaSchedule {
  std::vector<double> values;

  /// first·ratio^(i−1) for i = 1..count.
  static GammaSchedule geometric(double first = 1e-2, double ratio = 0.8, int count = 10);
  /// Throws InvalidArgument unless strictly decreasing and positive.
  void validate() const;
};

/// Δ(θ) = min over the polytope of Σ ρ′(|θ_i|)(|β_i| − |θ_i|), optionally
/// restricted to coordinates in `allowed`. Always ≤ 0 for feasible θ.
double stationarity_gap(const ProblemData& problem, const Vector& theta, const PenaltyFamily& penalty,
                        const Support* allowed = nullptr);

struct ReweightedOptions {
  double stat_tol = 1e-5;
  int max_inner = 200;
  /// Stop once two consecutive γ stages end on the same support.
  bool early_stop = true;
  /// Weighted-ℓ1 subproblems switch from simplex to the regularized dual
  /// method above this many coordinates.
  Index simplex_max_p = 500;
  double regularization = 1e-4;
};

/// One weighted-ℓ1 step: β^k → β^{k+1} under penalty γ.
struct ReweightedStep {
  double gamma = 0.0;
  int k = 0;
  double h_before = 0.0;       // h(β^k)
  double h_after = 0.0;        // h(β^{k+1})
  double stationarity = 0.0;   // Δ(β^k)
  int support_size = 0;        // ‖β^{k+1}‖₀
};

struct ReweightedResult {
  Vector beta;
  std::vector<ReweightedStep> history;
  int stages = 0;
};

/// Sequential weighted-ℓ1 minimization with γ-continuation. When `init` is
/// null the first step uses the weights at zero, which is the ℓ1 solution.
ReweightedResult reweighted_run(const ProblemData& problem, PenaltyKind kind, const GammaSchedule& schedule,
                                const Vector* init = nullptr, const ReweightedOptions& options = {},
                                const Support* allowed = nullptr);

struct HybridOptions {
  /// λ values are these multipliers times p/‖d‖∞.
  std::vector<double> lambda_multipliers{0.1, 1.0, 10.0};
  AdmmOptions admm;
  GammaSchedule schedule = GammaSchedule::geometric();
  PenaltyKind kind = PenaltyKind::kLog;
  ReweightedOptions reweighted;
  int workers = 1;
};

struct HybridResult {
  Solution solution;
  /// Feasible point on the expanded ADMM support, before reweighting.
  Solution admm_repaired;
  Support expanded;
  double best_lambda = 0.0;
  int expansions = 0;
};

/// Grows `support` by the largest |score_i| outside it until the restricted
/// polytope is nonempty.
Support expand_until_feasible(const ProblemData& problem, Support support, const Vector& score, int* added = nullptr);

/// ADMM over a λ grid, support expansion, then reweighted ℓ1 on the expanded set.
HybridResult hybrid_run_detailed(const ProblemData& problem, const HybridOptions& options = {});
Solution hybrid_run(const ProblemData& problem, const HybridOptions& options = {});

/// Projects onto the polytope restricted to `allowed` with the least ℓ1 move
/// from `point`. Returns nullopt if that restricted polytope is empty.
std::optional<Vector> feasibility_repair(const ProblemData& problem, const Vector& point, const Support* allowed = nullptr);

}  // namespace ddsel
