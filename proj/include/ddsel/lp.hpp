#pragma once

#include "ddsel/core.hpp"

#include <Eigen/LU>

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ddsel {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { kLessEqual, kEqual, kGreaterEqual };
enum class ObjectiveSense { kMinimize, kMaximize };

/// Dense LP: optimize cᵀx subject to row_lower ≤ Ax ≤ row_upper and
/// var_lower ≤ x ≤ var_upper. Infinite bounds are allowed on both.
struct LinearProgram {
  ObjectiveSense sense = ObjectiveSense::kMinimize;
  Vector objective;
  Matrix constraint_matrix;
  Vector row_lower;
  Vector row_upper;
  Vector var_lower;
  Vector var_upper;

  LinearProgram() = default;
  LinearProgram(Index num_rows, Index num_vars);

  Index num_rows() const { return constraint_matrix.rows(); }
  Index num_vars() const { return constraint_matrix.cols(); }

  /// Sets row i to a one-sided or equality constraint aᵢᵀx (sense) rhs.
  void set_row_sense(Index i, RowSense sense, double rhs);
  RowSense row_sense(Index i) const;

  /// Throws MalformedProblem on non-finite data or crossed bounds.
  void validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };
const char* to_string(LpStatus status);

enum class VarStatus : std::uint8_t { kBasic, kAtLower, kAtUpper, kFreeZero };

/// Status of every structural variable followed by every row logical.
struct Basis {
  std::vector<VarStatus> status;
  bool empty() const { return status.empty(); }
};

struct LpSolution {
  LpStatus status = LpStatus::kIterationLimit;
  Vector x;
  double objective_value = 0.0;
  /// Row multipliers y with reduced costs c − Aᵀy, in the sense of the original objective.
  Vector duals;
  Vector reduced_costs;
  Vector row_activity;
  /// Direction of unboundedness in x when status is kUnbounded.
  Vector ray;
  Basis basis;
  int iterations = 0;
};

struct SimplexOptions {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  int max_iterations = -1;      // default: 50·(rows + vars) + 1000
  int refactor_interval = 100;
  int bland_after = -1;         // default: 3·(rows + vars) consecutive degenerate pivots
};

/// Revised primal simplex over bounded variables with a dense LU basis.
///
/// The solver keeps its basis between calls, so re-solving after changing
/// bounds or costs warm-starts from the previous optimum. Any basis is a
/// valid start: dual feasible starts run the dual method, other infeasible
/// starts a composite Phase I.
class SimplexSolver {
 public:
  explicit SimplexSolver(LinearProgram lp, SimplexOptions options = {});

  const LinearProgram& lp() const { return lp_; }

  void set_objective(const Vector& c);
  void set_objective_coefficient(Index j, double c);
  void set_var_bounds(Index j, double lower, double upper);
  void set_row_bounds(Index i, double lower, double upper);

  /// Replaces the current basis. An invalid or singular basis is ignored
  /// and the slack basis is used instead.
  void set_basis(const Basis& basis);
  Basis basis() const;

  LpSolution solve();

 private:
  enum class Phase { kOne, kTwo };
  enum class DualOutcome { kPrimalFeasible, kInfeasible, kGiveUp };
  DualOutcome dual_phase(int& iterations);
  void reduced_costs(Vector& d) const;

  Index num_total() const { return n_ + m_; }
  void reset_to_slack_basis();
  bool factorize();
  void compute_basic_values();
  void ftran(Vector& v) const;
  void btran(Vector& v) const;
  void column(Index j, Vector& out) const;
  double max_infeasibility() const;
  void snap_nonbasic(Index j);
  LpSolution extract(LpStatus status, int iterations, const Vector* ray) const;

  LinearProgram lp_;
  SimplexOptions options_;
  Index m_ = 0;
  Index n_ = 0;
  Vector lower_;
  Vector upper_;
  Vector cost_;
  Vector x_;
  std::vector<VarStatus> status_;
  std::vector<Index> basic_;      // variable at each basis position
  std::vector<Index> position_;   // basis position of each variable, -1 if nonbasic

  struct Eta {
    Index row;
    Vector column;
  };
  Eigen::PartialPivLU<Matrix> lu_;
  std::vector<Eta> etas_;
  bool factor_valid_ = false;
};

LpSolution solve_lp(const LinearProgram& lp, const Basis* warm_basis = nullptr, const SimplexOptions& options = {});

/// True iff some β with β_j = 0 for j ∈ fixed_zero satisfies ‖Aβ − b‖∞ ≤ δ.
bool phase1_feasible(const Matrix& a, const Vector& b, double delta, const Support& fixed_zero);

/// Plain-text tableau dump for debugging.
std::string dump(const LinearProgram& lp);

/// Weighted-ℓ1 minimization over the Dantzig polytope, optionally restricted
/// to a subset of coordinates, as an LP over the split β = β⁺ − β⁻.
///
/// Repeated solves with new weights reuse the previous optimal basis.
class DantzigLp {
 public:
  /// Polytope {β : ‖Qβ − d‖∞ ≤ δ, β_j = 0 for j ∉ allowed}.
  DantzigLp(const Matrix& q, const Vector& d, double delta, Support allowed);
  DantzigLp(const ProblemData& problem, Support allowed);
  explicit DantzigLp(const ProblemData& problem);

  struct Result {
    LpStatus status = LpStatus::kIterationLimit;
    Vector beta;              // full length p
    double objective = 0.0;   // Σ w_i|β_i| at the LP optimum
  };

  /// weights has length p; entries outside the allowed set are ignored.
  Result solve(const Vector& weights);
  bool feasible();

  const Support& allowed() const { return allowed_; }

 private:
  Index p_;
  Support allowed_;
  SimplexSolver solver_;
};

/// ℓ1-Dantzig selector: min ‖β‖₁ s.t. ‖Xᵀ(y − Xβ)‖∞ ≤ δ.
Solution solve_l1_dantzig(const ProblemData& problem);

/// min ½‖α − c̄‖² + (τ/2)‖α‖² + Σ w_i|α_i| s.t. ‖Aα − b‖∞ ≤ δ.
struct CompositeProblem {
  Vector cbar;
  Vector weights;
  Matrix a;
  Vector b;
  double delta = 0.0;
  double tau = 0.0;

  double objective(const Vector& alpha) const;
};

struct DualProxOptions {
  double tol = 1e-6;
  int max_iterations = 50000;
  int power_iterations = 50;
  /// Reuse a previously computed ‖A‖₂² instead of estimating it.
  std::optional<double> lipschitz;
  bool throw_on_max_iterations = true;
};

struct DualProxResult {
  Vector alpha;
  Vector mu;
  double kkt_residual = 0.0;
  double primal_infeasibility = 0.0;
  double dual_objective = 0.0;
  int iterations = 0;
  int restarts = 0;
  bool converged = false;
  /// Dual objective at each momentum restart, for monotonicity checks.
  std::vector<double> restart_dual_values;
};

/// Largest eigenvalue of AᵀA by power iteration from a deterministic start.
double estimate_lipschitz(const Matrix& a, int iterations);

/// Accelerated proximal gradient on the dual, α̂ recovered by soft thresholding.
DualProxResult dual_prox_solve(const CompositeProblem& prob, const Vector* mu0 = nullptr,
                               const DualProxOptions& options = {});

}  // namespace ddsel
