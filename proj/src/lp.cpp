#include "ddsel/lp.hpp"

#include <cmath>

namespace ddsel {

namespace {

Support all_coordinates(Index p) {
  Support s(static_cast<size_t>(p));
  for (Index j = 0; j < p; ++j) s[static_cast<size_t>(j)] = static_cast<int>(j);
  return s;
}

// Variables β⁺_I, β⁻_I ≥ 0; rows Q_{:,I}(β⁺ − β⁻) ∈ [d − δ, d + δ].
LinearProgram dantzig_program(const Matrix& q, const Vector& d, double delta, const Support& allowed) {
  const Index p = q.cols();
  if (d.size() != q.rows()) throw Error(ErrorCode::kDimensionMismatch, "row data length mismatch");
  if (!(delta >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "delta must be nonnegative");
  const Index k = static_cast<Index>(allowed.size());
  LinearProgram lp(q.rows(), 2 * k);
  for (Index t = 0; t < k; ++t) {
    const int j = allowed[static_cast<size_t>(t)];
    if (j < 0 || j >= p) throw Error(ErrorCode::kInvalidArgument, "coordinate index out of range");
    lp.constraint_matrix.col(t) = q.col(j);
    lp.constraint_matrix.col(k + t) = -q.col(j);
  }
  lp.objective.setOnes();
  lp.row_lower = d.array() - delta;
  lp.row_upper = d.array() + delta;
  return lp;
}

}  // namespace

DantzigLp::DantzigLp(const Matrix& q, const Vector& d, double delta, Support allowed)
    : p_(q.cols()), allowed_(std::move(allowed)), solver_(dantzig_program(q, d, delta, allowed_)) {}

DantzigLp::DantzigLp(const ProblemData& problem, Support allowed)
    : DantzigLp(problem.gram(), problem.correlations(), problem.delta(), std::move(allowed)) {}

DantzigLp::DantzigLp(const ProblemData& problem) : DantzigLp(problem, all_coordinates(problem.p())) {}

DantzigLp::Result DantzigLp::solve(const Vector& weights) {
  if (weights.size() != p_) throw Error(ErrorCode::kDimensionMismatch, "weights length mismatch");
  const Index k = static_cast<Index>(allowed_.size());
  Vector c(2 * k);
  for (Index t = 0; t < k; ++t) {
    const double w = weights[allowed_[static_cast<size_t>(t)]];
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::kInvalidArgument, "weights must be finite and nonnegative");
    c[t] = w;
    c[k + t] = w;
  }
  solver_.set_objective(c);
  const LpSolution sol = solver_.solve();
  Result r;
  r.status = sol.status;
  r.beta = Vector::Zero(p_);
  if (sol.status != LpStatus::kOptimal) return r;
  for (Index t = 0; t < k; ++t) {
    r.beta[allowed_[static_cast<size_t>(t)]] = sol.x[t] - sol.x[k + t];
  }
  for (Index t = 0; t < k; ++t) {
    const int j = allowed_[static_cast<size_t>(t)];
    r.objective += weights[j] * std::abs(r.beta[j]);
  }
  return r;
}

bool DantzigLp::feasible() {
  const LpSolution sol = [&] {
    Vector zero = Vector::Zero(2 * static_cast<Index>(allowed_.size()));
    solver_.set_objective(zero);
    return solver_.solve();
  }();
  return sol.status == LpStatus::kOptimal;
}

Solution solve_l1_dantzig(const ProblemData& problem) {
  DantzigLp lp(problem);
  const auto r = lp.solve(Vector::Ones(problem.p()));
  if (r.status == LpStatus::kInfeasible) throw Error(ErrorCode::kInfeasibleRegion, "Dantzig polytope is empty");
  if (r.status != LpStatus::kOptimal) throw Error(ErrorCode::kNumericalBreakdown, "l1 Dantzig LP did not solve");
  return Solution::from_beta(problem, r.beta);
}

}  // namespace ddsel
