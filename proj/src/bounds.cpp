#include "ddsel/bounds.hpp"

#include "ddsel/lp.hpp"
#include "ddsel/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace ddsel {

namespace {

// Free β with rows Qβ ∈ [d − δ, d + δ].
LinearProgram free_polytope(const ProblemData& problem) {
  const Index p = problem.p();
  LinearProgram lp(p, p);
  lp.constraint_matrix = problem.gram();
  lp.row_lower = problem.correlations().array() - problem.delta();
  lp.row_upper = problem.correlations().array() + problem.delta();
  lp.var_lower.setConstant(-kInf);
  lp.var_upper.setConstant(kInf);
  return lp;
}

// Split β = β⁺ − β⁻ with β± ∈ [0, M_U] and Σ(β⁺ + β⁻) ≤ M_U·α₀ as the last row.
LinearProgram augmented_polytope(const ProblemData& problem, double m_u, int alpha0) {
  const Index p = problem.p();
  LinearProgram lp(p + 1, 2 * p);
  lp.constraint_matrix.topLeftCorner(p, p) = problem.gram();
  lp.constraint_matrix.topRightCorner(p, p) = -problem.gram();
  lp.constraint_matrix.row(p).setOnes();
  lp.row_lower.head(p) = problem.correlations().array() - problem.delta();
  lp.row_upper.head(p) = problem.correlations().array() + problem.delta();
  lp.row_lower[p] = -kInf;
  lp.row_upper[p] = m_u * alpha0;
  lp.var_upper.setConstant(m_u);
  return lp;
}

struct Extremes {
  Vector lower;
  Vector upper;
  std::vector<LpStatus> status_lower;
  std::vector<LpStatus> status_upper;
};

// min and max of every objective row g_i·x over the LP's feasible set.
// Fixed-size blocks, each reusing one solver's basis. The blocks do not
// depend on the worker count, so neither do the results.
constexpr Index kBlock = 16;

Extremes extremes(const LinearProgram& lp, const Matrix& objectives, int workers) {
  const Index count = objectives.rows();
  Extremes out{Vector::Zero(count), Vector::Zero(count), std::vector<LpStatus>(static_cast<size_t>(count)),
                std::vector<LpStatus>(static_cast<size_t>(count))};
  const int blocks = static_cast<int>((count + kBlock - 1) / kBlock);
  parallel_for(blocks, workers, [&](int block) {
    const Index begin = block * kBlock, end = std::min(count, begin + kBlock);
    SimplexSolver solver(lp);
    for (Index i = begin; i < end; ++i) {
      for (int side = 0; side < 2; ++side) {
        const double sign = side == 0 ? 1.0 : -1.0;
        solver.set_objective(sign * objectives.row(i).transpose());
        const LpSolution sol = solver.solve();
        const double value = sign * sol.objective_value;
        if (side == 0) {
          out.lower[i] = value;
          out.status_lower[static_cast<size_t>(i)] = sol.status;
        } else {
          out.upper[i] = value;
          out.status_upper[static_cast<size_t>(i)] = sol.status;
        }
      }
    }
  });
  return out;
}

// Maps split-variable objectives: g·β = g·β⁺ − g·β⁻.
Matrix split_objectives(const Matrix& g) {
  Matrix out(g.rows(), 2 * g.cols());
  out << g, -g;
  return out;
}

void check_statuses(const Extremes& e, ErrorCode unbounded_code, ErrorCode infeasible_code, const char* what) {
  for (size_t i = 0; i < e.status_lower.size(); ++i) {
    for (LpStatus s : {e.status_lower[i], e.status_upper[i]}) {
      if (s == LpStatus::kInfeasible) throw Error(infeasible_code, std::string(what) + ": feasible set is empty");
      if (s == LpStatus::kUnbounded) {
        throw Error(unbounded_code, std::string(what) + ": unbounded in coordinate " + std::to_string(i), static_cast<int>(i));
      }
      if (s != LpStatus::kOptimal) throw Error(ErrorCode::kNumericalBreakdown, std::string(what) + ": LP did not solve");
    }
  }
}

}  // namespace

bool BoundSet::certified() const {
  return provenance == BoundProvenance::kLpDerived &&
         std::find(flags.begin(), flags.end(), "m_u_from_warm_start") == flags.end();
}

const char* to_string(BoundProvenance provenance) {
  return provenance == BoundProvenance::kLpDerived ? "LpDerived" : "WarmStartDerived";
}

void BoundSet::validate() const {
  auto bad = [](double v) { return !(v >= 0.0) || !std::isfinite(v); };
  for (Index j = 0; j < coef_upper.size(); ++j) {
    if (bad(coef_upper[j])) throw Error(ErrorCode::kInconsistentBounds, "coefficient bound is negative or not finite", static_cast<int>(j));
  }
  for (Index i = 0; i < pred_upper.size(); ++i) {
    if (bad(pred_upper[i])) throw Error(ErrorCode::kInconsistentBounds, "prediction bound is negative or not finite", static_cast<int>(i));
  }
  if (bad(l1_coef) || bad(l1_pred) || bad(global_coef)) throw Error(ErrorCode::kInconsistentBounds, "aggregate bound is negative or not finite");
  const double max_coef = coef_upper.size() > 0 ? coef_upper.maxCoeff() : 0.0;
  if (global_coef != max_coef) throw Error(ErrorCode::kInconsistentBounds, "global_coef differs from the largest coefficient bound");
}

bool BoundSet::admits(const Matrix& x, const Vector& beta, double tol) const {
  if ((beta.cwiseAbs() - coef_upper).maxCoeff() > tol) return false;
  if (beta.lpNorm<1>() > l1_coef + tol) return false;
  const Vector fit = x * beta;
  if (pred_upper.size() == fit.size() && fit.size() > 0 && (fit.cwiseAbs() - pred_upper).maxCoeff() > tol) return false;
  return true;
}

Vector CoefInterval::magnitude() const { return lower.cwiseAbs().cwiseMax(upper.cwiseAbs()); }

Vector PredictionBounds::magnitude() const { return v_plus.cwiseMax(-v_minus).cwiseMax(0.0); }

CoefInterval coef_bounds(const ProblemData& problem, int workers) {
  const Extremes e = extremes(free_polytope(problem), Matrix::Identity(problem.p(), problem.p()), workers);
  check_statuses(e, ErrorCode::kUnboundedCoordinate, ErrorCode::kInfeasibleRegion, "coefficient bounds");
  return {e.lower, e.upper};
}

RefinedBounds coef_bounds_refined(const ProblemData& problem, int alpha0, double m_u, int max_rounds, double rel_tol,
                                  int workers) {
  if (alpha0 < 0) throw Error(ErrorCode::kInvalidArgument, "alpha0 must be nonnegative");
  if (!(m_u >= 0.0) || !std::isfinite(m_u)) throw Error(ErrorCode::kInvalidArgument, "m_u must be finite and nonnegative");
  const Index p = problem.p();
  const Matrix objectives = split_objectives(Matrix::Identity(p, p));
  RefinedBounds out;
  out.m_u = m_u;
  out.history.push_back(m_u);
  for (int round = 0; round < std::max(1, max_rounds); ++round) {
    const Extremes e = extremes(augmented_polytope(problem, out.m_u, alpha0), objectives, workers);
    check_statuses(e, ErrorCode::kNumericalBreakdown, ErrorCode::kInfeasibleAugmentedPolytope, "refined bounds");
    out.interval = {e.lower, e.upper};
    const double previous = out.m_u;
    // Round-off can nudge the LP value above the box it was solved in.
    out.m_u = std::min(previous, p > 0 ? out.interval.magnitude().maxCoeff() : 0.0);
    out.history.push_back(out.m_u);
    if (previous - out.m_u <= rel_tol * std::max(previous, 1e-300)) break;
  }
  return out;
}

PredictionBounds prediction_bounds(const ProblemData& problem, double m_u, int alpha0, int workers) {
  PredictionBounds out;
  const Matrix& x = problem.X();
  if (std::isfinite(m_u)) {
    const Extremes e = extremes(augmented_polytope(problem, m_u, alpha0), split_objectives(x), workers);
    check_statuses(e, ErrorCode::kNumericalBreakdown, ErrorCode::kInfeasibleAugmentedPolytope, "prediction bounds");
    out.v_plus = e.upper;
    out.v_minus = e.lower;
    return out;
  }
  const Extremes e = extremes(free_polytope(problem), x, workers);
  check_statuses(e, ErrorCode::kUnboundedCoordinate, ErrorCode::kInfeasibleRegion, "prediction bounds");
  out.v_plus = e.upper;
  out.v_minus = e.lower;
  out.relaxed = true;
  return out;
}

std::pair<double, double> l1_bounds(const Vector& coef_upper, int alpha0) {
  if (alpha0 < 0 || alpha0 > coef_upper.size()) throw Error(ErrorCode::kInvalidArgument, "alpha0 must lie in [0, p]");
  std::vector<double> v(coef_upper.data(), coef_upper.data() + coef_upper.size());
  std::sort(v.begin(), v.end(), std::greater<>());
  const double max = v.empty() ? 0.0 : v.front();
  return {max, std::accumulate(v.begin(), v.begin() + alpha0, 0.0)};
}

BoundSet warm_start_bounds(const Solution& warm, const ProblemData& problem, const WarmBoundOptions& options) {
  if (warm.beta.size() != problem.p()) throw Error(ErrorCode::kDimensionMismatch, "warm start length mismatch");
  if (residual_inf(problem, warm.beta) > problem.delta() + kFeasTol) {
    throw Error(ErrorCode::kInfeasibleWarmStart, "warm start violates the correlation constraint");
  }
  const Index n = problem.n(), p = problem.p();
  const double tau = options.tau;
  BoundSet b;
  b.provenance = BoundProvenance::kWarmStartDerived;
  const double coef_inf = warm.beta.lpNorm<Eigen::Infinity>();
  if (coef_inf == 0.0) {
    const double row_l1 = n > 0 ? problem.X().cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
    b.coef_upper = Vector::Constant(p, options.big_m);
    b.pred_upper = Vector::Constant(n, options.big_m * row_l1);
    b.l1_coef = static_cast<double>(p) * options.big_m;
    b.l1_pred = static_cast<double>(n) * options.big_m * row_l1;
    b.global_coef = options.big_m;
    b.flags.push_back("zero_warm_start");
    return b;
  }
  const double nonzeros = static_cast<double>(support_of(warm.beta, 0.0).size());
  const double pred_inf = (problem.X() * warm.beta).lpNorm<Eigen::Infinity>();
  b.coef_upper = Vector::Constant(p, tau * coef_inf);
  b.pred_upper = Vector::Constant(n, tau * pred_inf);
  b.l1_coef = std::min(tau * nonzeros * coef_inf, tau * warm.beta.lpNorm<1>());
  b.l1_pred = tau * pred_inf;
  if (options.guarded_pred_l1) {
    b.l1_pred *= std::min(static_cast<double>(n), nonzeros);
    b.flags.push_back("guarded_pred_l1");
  }
  b.global_coef = tau * coef_inf;
  return b;
}

BoundSet lp_bounds(const ProblemData& problem, const Solution& warm, double tau, int workers) {
  if (residual_inf(problem, warm.beta) > problem.delta() + kFeasTol) {
    throw Error(ErrorCode::kInfeasibleWarmStart, "warm start violates the correlation constraint");
  }
  const int alpha0 = static_cast<int>(support_of(warm.beta, 0.0).size());
  BoundSet b;
  b.provenance = BoundProvenance::kLpDerived;
  double m_u = 0.0;
  try {
    m_u = coef_bounds(problem, workers).magnitude().maxCoeff();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUnboundedCoordinate) throw;
    m_u = tau * warm.beta.lpNorm<Eigen::Infinity>();
    b.flags.push_back("m_u_from_warm_start");
  }
  // Keep the warm start inside the box so the augmented polytope is nonempty.
  m_u = std::max(m_u, warm.beta.lpNorm<Eigen::Infinity>());
  const RefinedBounds refined = coef_bounds_refined(problem, alpha0, m_u, 5, 1e-3, workers);
  b.coef_upper = refined.interval.magnitude().cwiseMin(refined.m_u);
  const auto [global, l1] = l1_bounds(b.coef_upper, alpha0);
  b.global_coef = global;
  b.l1_coef = l1;
  PredictionBounds pred;
  try {
    pred = prediction_bounds(problem, refined.m_u, alpha0, workers);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInfeasibleAugmentedPolytope && e.code() != ErrorCode::kNumericalBreakdown) throw;
    pred = prediction_bounds(problem, kInf, alpha0, workers);
    b.flags.push_back("relaxed_prediction_bounds");
  }
  b.pred_upper = pred.magnitude();
  b.l1_pred = b.pred_upper.sum();
  return b;
}

}  // namespace ddsel
