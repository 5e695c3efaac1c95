#pragma once

#include "ddsel/bounds.hpp"
#include "ddsel/core.hpp"
#include "ddsel/heuristics.hpp"
#include "ddsel/lp.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ddsel {

inline constexpr double kIntTol = 1e-6;
inline constexpr double kDefaultBigM = 1e3;

/// Mixed-integer model: min Σz s.t. |d − Qβ| ≤ δ, −M_j z_j ≤ β_j ≤ M_j z_j,
/// z binary, plus the structured rows when bounds are supplied.
struct MiloFormulation {
  ProblemData problem;
  double big_m = kDefaultBigM;
  std::optional<BoundSet> bounds;
  /// Lift ξ = Xβ as explicit variables; otherwise prediction bounds act
  /// directly on Xβ and the ‖ξ‖₁ row is omitted.
  bool use_prediction_vars = false;

  /// Counts for the explicit model with β, z (and ξ) variables.
  int num_constraints = 0;
  int num_variables = 0;

  /// Per-coordinate big-M: min(big_m, coef_upper_j).
  Vector coordinate_m() const;
  /// Explicit LP relaxation over (β, z[, ξ]) with z ∈ [0, 1], minimizing Σz.
  LinearProgram relaxation() const;
};

/// Throws InvalidArgument for big_m ≤ 0 and InconsistentBounds for invalid
/// bounds. With bounds present, ξ-lifting is used unless n > 2p.
MiloFormulation build_formulation(const ProblemData& problem, double big_m = kDefaultBigM,
                                  const std::optional<BoundSet>& bounds = std::nullopt);

struct BnbNode {
  Support fixed_zero;
  Support fixed_one;
  double relaxation_bound = 0.0;
  int depth = 0;
};

enum class MiloStatus { kOptimal, kGapLimit, kTimeLimit, kNodeLimit, kInfeasible };
const char* to_string(MiloStatus status);

struct MiloLimits {
  double time_s = std::numeric_limits<double>::infinity();
  long nodes = std::numeric_limits<long>::max();
  double gap = 0.0;
};

struct NodeTrace {
  long node = 0;
  int depth = 0;
  double node_bound = 0.0;    // bound of the processed node
  double parent_bound = 0.0;
  double global_lower = 0.0;  // global bound after processing
  int upper = 0;              // incumbent objective after processing, −1 if none
};

struct ProgressEntry {
  double seconds = 0.0;
  int upper = -1;
  double lower = 0.0;
  double gap = 1.0;
  long nodes = 0;
};

struct MiloResult {
  Solution incumbent;
  bool has_incumbent = false;
  double lower_bound = 0.0;
  double gap = 1.0;
  double root_bound = 0.0;
  long nodes_explored = 0;
  long lp_iterations = 0;
  double wall_time = 0.0;
  MiloStatus status = MiloStatus::kInfeasible;
  std::vector<NodeTrace> trace;
  std::vector<ProgressEntry> progress;
  /// Notable events such as a rejected warm start or relaxed bounds.
  std::vector<std::string> events;
};

struct MiloOptions {
  MiloLimits limits;
  int plunge_every = 10;
  bool record_trace = false;
  std::function<void(const ProgressEntry&)> on_progress;
};

/// (UB − ⌈LB − int_tol⌉)/UB, zero when UB is zero.
double optimality_gap(int upper, double lower);

/// Best-bound branch and bound on z with periodic depth-first plunges.
/// Node relaxations eliminate z (z_j = |β_j|/M_j at the optimum), so each
/// node solves an LP over β = β⁺ − β⁻ whose value plus |fixed_one| is the
/// bound. Every node LP solution is feasible for the Dantzig constraint and
/// is offered as an incumbent.
MiloResult branch_and_bound(const MiloFormulation& form, const std::optional<Solution>& warm_start = std::nullopt,
                            const MiloOptions& options = {});

enum class BoundsSource { kNone, kWarmStart, kLp };

struct IntelligenceConfig {
  BoundsSource bounds = BoundsSource::kWarmStart;
  double tau = 1.5;
  double big_m = kDefaultBigM;
  bool guarded_pred_l1 = false;
  /// Relax-and-retry rounds when the structured model looks too tight.
  int max_doublings = 3;
  HybridOptions hybrid;
  /// Run the hybrid heuristic for a warm start.
  bool run_heuristic = true;
  /// Extra warm start candidate; the sparser feasible candidate is used.
  std::optional<Solution> warm_start;
  MiloOptions milo;
  int workers = 1;
};

/// Heuristic warm start, bound estimation, then branch and bound.
MiloResult solve_with_intelligence(const ProblemData& problem, double delta, const IntelligenceConfig& config = {});

}  // namespace ddsel
