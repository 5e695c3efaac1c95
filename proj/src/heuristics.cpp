#include "ddsel/heuristics.hpp"

#include "ddsel/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ddsel {

namespace {

Support all_coordinates(Index p) {
  Support s(static_cast<size_t>(p));
  std::iota(s.begin(), s.end(), 0);
  return s;
}

Vector restrict_to(const Vector& v, const Support& allowed) {
  Vector out = Vector::Zero(v.size());
  for (int j : allowed) out[j] = v[j];
  return out;
}

bool is_feasible(const ProblemData& problem, const Vector& beta) {
  return residual_inf(problem, beta) <= problem.delta() + kFeasTol;
}

}  // namespace

std::optional<Vector> feasibility_repair(const ProblemData& problem, const Vector& point, const Support* allowed) {
  const Support all = allowed != nullptr ? *allowed : all_coordinates(problem.p());
  const Vector base = restrict_to(point, all);
  if (is_feasible(problem, base)) return base;
  // Least ℓ1 move u with Q(base + u) inside the slab.
  const Vector shifted = problem.correlations() - problem.gram() * base;
  DantzigLp lp(problem.gram(), shifted, problem.delta(), all);
  const auto r = lp.solve(Vector::Ones(problem.p()));
  if (r.status != LpStatus::kOptimal) return std::nullopt;
  return Vector(base + r.beta);
}

AdmmResult admm_run(const ProblemData& problem, double lambda, const AdmmState* init, const AdmmOptions& options) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::kInvalidArgument, "lambda must be positive");
  const Index p = problem.p();
  AdmmResult result;
  AdmmState& st = result.state;
  if (init != nullptr) {
    st = *init;
    if (st.beta.size() != p || st.alpha.size() != p || st.nu.size() != p) {
      throw Error(ErrorCode::kDimensionMismatch, "ADMM state length mismatch");
    }
  } else {
    st.beta = Vector::Zero(p);
    st.alpha = Vector::Zero(p);
    st.nu = Vector::Zero(p);
  }
  st.lambda = lambda;

  CompositeProblem proj;
  proj.a = problem.gram();
  proj.b = problem.correlations();
  proj.delta = problem.delta();
  proj.weights = Vector::Zero(p);
  proj.tau = options.prox_tau;
  DualProxOptions prox = options.prox;
  prox.throw_on_max_iterations = false;
  if (!prox.lipschitz) prox.lipschitz = estimate_lipschitz(proj.a, prox.power_iterations);
  Vector mu = Vector::Zero(p);

  const double lambda_prime = 2.0 / lambda;
  for (int it = 0; it < options.max_iter; ++it) {
    const Vector beta_next = hard_threshold(st.alpha + st.nu / lambda, lambda_prime);
    proj.cbar = beta_next - st.nu / lambda;
    const DualProxResult r = dual_prox_solve(proj, &mu, prox);
    mu = r.mu;
    const double beta_change = (beta_next - st.beta).norm();
    const double beta_norm = st.beta.norm();
    st.nu += lambda * (r.alpha - beta_next);
    st.beta = beta_next;
    st.alpha = r.alpha;
    ++st.iteration;
    const double coupling = (st.beta - st.alpha).norm();
    if (beta_change <= options.tol1 * beta_norm &&
        coupling <= options.tol2 * std::max(st.beta.norm(), st.alpha.norm())) {
      result.converged = true;
      break;
    }
  }

  result.beta_sparse = st.beta;
  Vector alpha = st.alpha;
  if (!is_feasible(problem, alpha)) {
    result.repaired = true;
    proj.cbar = st.beta - st.nu / lambda;
    DualProxOptions tight = prox;
    tight.tol = 1e-10;
    alpha = dual_prox_solve(proj, &mu, tight).alpha;
    if (!is_feasible(problem, alpha)) {
      const auto fixed = feasibility_repair(problem, alpha);
      if (!fixed) throw Error(ErrorCode::kInfeasibleRegion, "Dantzig polytope is empty");
      alpha = *fixed;
    }
  }
  result.alpha_feasible = std::move(alpha);
  return result;
}

double PenaltyFamily::value(double t) const {
  t = std::abs(t);
  if (kind == PenaltyKind::kLog) return std::log1p(t / gamma) / std::log1p(1.0 / gamma);
  return t == 0.0 ? 0.0 : std::pow(t, gamma);
}

double PenaltyFamily::derivative(double t) const {
  t = std::abs(t);
  double d;
  if (kind == PenaltyKind::kLog) {
    d = 1.0 / ((t + gamma) * std::log1p(1.0 / gamma));
  } else if (t == 0.0) {
    d = gamma < 1.0 ? kMaxWeight : gamma == 1.0 ? 1.0 : 0.0;
  } else {
    d = gamma * std::pow(t, gamma - 1.0);
  }
  return std::min(d, kMaxWeight);
}

double PenaltyFamily::objective(const Vector& beta) const {
  double h = 0.0;
  for (Index i = 0; i < beta.size(); ++i) h += value(beta[i]);
  return h;
}

Vector PenaltyFamily::weights(const Vector& beta) const {
  Vector w(beta.size());
  for (Index i = 0; i < beta.size(); ++i) w[i] = derivative(beta[i]);
  return w;
}

GammaSchedule GammaSchedule::geometric(double first, double ratio, int count) {
  GammaSchedule s;
  double g = first;
  for (int i = 0; i < count; ++i, g *= ratio) s.values.push_back(g);
  s.validate();
  return s;
}

void GammaSchedule::validate() const {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "gamma schedule is empty");
  for (size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) throw Error(ErrorCode::kInvalidArgument, "gamma must be positive");
    if (i > 0 && !(values[i] < values[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "gamma schedule must be strictly decreasing");
    }
  }
}

double stationarity_gap(const ProblemData& problem, const Vector& theta, const PenaltyFamily& penalty,
                        const Support* allowed) {
  if (theta.size() != problem.p()) throw Error(ErrorCode::kDimensionMismatch, "theta length mismatch");
  const Support all = allowed != nullptr ? *allowed : all_coordinates(problem.p());
  if (!is_feasible(problem, theta) || restrict_to(theta, all) != theta) {
    throw Error(ErrorCode::kInfeasibleTheta, "theta is outside the polytope");
  }
  const Vector w = penalty.weights(theta);
  DantzigLp lp(problem, all);
  const auto r = lp.solve(w);
  if (r.status != LpStatus::kOptimal) throw Error(ErrorCode::kNumericalBreakdown, "stationarity LP did not solve");
  // θ is feasible, so a positive value is round-off.
  return std::min(0.0, r.objective - w.dot(theta.cwiseAbs()));
}

namespace {

// Weighted-ℓ1 subproblem solver: simplex with basis reuse, or the
// regularized dual method for wide problems.
class WeightedL1 {
 public:
  WeightedL1(const ProblemData& problem, const Support& allowed, const ReweightedOptions& options)
      : problem_(problem), allowed_(allowed), options_(options) {
    if (problem.p() <= options.simplex_max_p) {
      lp_.emplace(problem, allowed);
    } else {
      comp_.a.resize(problem.p(), static_cast<Index>(allowed.size()));
      for (size_t t = 0; t < allowed.size(); ++t) comp_.a.col(static_cast<Index>(t)) = problem.gram().col(allowed[t]);
      comp_.b = problem.correlations();
      comp_.delta = problem.delta();
      comp_.cbar = Vector::Zero(comp_.a.cols());
      prox_.lipschitz = estimate_lipschitz(comp_.a, prox_.power_iterations);
      prox_.throw_on_max_iterations = false;
    }
  }

  std::optional<Vector> solve(const Vector& w) {
    if (lp_) {
      const auto r = lp_->solve(w);
      if (r.status != LpStatus::kOptimal) return std::nullopt;
      return r.beta;
    }
    // min Σw|α| + (τ/2)‖α‖² = τ·[½‖α‖² + Σ(w/τ)|α|].
    const double tau = options_.regularization;
    comp_.weights.resize(comp_.a.cols());
    for (size_t t = 0; t < allowed_.size(); ++t) comp_.weights[static_cast<Index>(t)] = w[allowed_[t]] / tau;
    const auto r = dual_prox_solve(comp_, mu_.size() ? &mu_ : nullptr, prox_);
    mu_ = r.mu;
    Vector beta = Vector::Zero(problem_.p());
    for (size_t t = 0; t < allowed_.size(); ++t) beta[allowed_[t]] = r.alpha[static_cast<Index>(t)];
    if (!is_feasible(problem_, beta)) return feasibility_repair(problem_, beta, &allowed_);
    return beta;
  }

 private:
  const ProblemData& problem_;
  const Support& allowed_;
  ReweightedOptions options_;
  std::optional<DantzigLp> lp_;
  CompositeProblem comp_;
  DualProxOptions prox_;
  Vector mu_;
};

}  // namespace

ReweightedResult reweighted_run(const ProblemData& problem, PenaltyKind kind, const GammaSchedule& schedule,
                                const Vector* init, const ReweightedOptions& options, const Support* allowed) {
  schedule.validate();
  const Support all = allowed != nullptr ? *allowed : all_coordinates(problem.p());
  WeightedL1 solver(problem, all, options);
  ReweightedResult result;

  Vector beta;
  if (init != nullptr) {
    if (init->size() != problem.p()) throw Error(ErrorCode::kDimensionMismatch, "init length mismatch");
    if (!is_feasible(problem, *init) || restrict_to(*init, all) != *init) {
      throw Error(ErrorCode::kInfeasibleRegion, "initial point is infeasible");
    }
    beta = *init;
  } else {
    // Weights at β = 0 are uniform, so the first step is the ℓ1 solution.
    const auto first = solver.solve(Vector::Ones(problem.p()));
    if (!first) throw Error(ErrorCode::kInfeasibleRegion, "Dantzig polytope is empty");
    beta = *first;
  }

  Support previous_stage;
  for (size_t s = 0; s < schedule.values.size(); ++s) {
    const PenaltyFamily pen{kind, schedule.values[s]};
    for (int k = 1; k <= options.max_inner; ++k) {
      const Vector w = pen.weights(beta);
      const auto next = solver.solve(w);
      if (!next) throw Error(ErrorCode::kInfeasibleRegion, "Dantzig polytope is empty");
      ReweightedStep step;
      step.gamma = pen.gamma;
      step.k = k;
      step.h_before = pen.objective(beta);
      step.h_after = pen.objective(*next);
      step.stationarity = w.dot(next->cwiseAbs()) - w.dot(beta.cwiseAbs());
      step.support_size = static_cast<int>(support_of(*next).size());
      result.history.push_back(step);
      beta = *next;
      if (-step.stationarity < options.stat_tol) break;
    }
    ++result.stages;
    const Support current = support_of(beta);
    if (options.early_stop && s > 0 && current == previous_stage) break;
    previous_stage = current;
  }

  if (!is_feasible(problem, beta)) {
    const auto fixed = feasibility_repair(problem, beta, &all);
    if (!fixed) throw Error(ErrorCode::kInfeasibleRegion, "Dantzig polytope is empty");
    beta = *fixed;
  }
  result.beta = std::move(beta);
  return result;
}

Support expand_until_feasible(const ProblemData& problem, Support support, const Vector& score, int* added) {
  const Index p = problem.p();
  std::vector<char> in(static_cast<size_t>(p), 0);
  for (int j : support) in[static_cast<size_t>(j)] = 1;
  int count = 0;
  while (!phase1_feasible(problem.gram(), problem.correlations(), problem.delta(), complement(support, p))) {
    int best = -1;
    for (Index j = 0; j < p; ++j) {
      if (in[static_cast<size_t>(j)]) continue;
      if (best < 0 || std::abs(score[j]) > std::abs(score[best])) best = static_cast<int>(j);
    }
    if (best < 0) throw Error(ErrorCode::kInfeasibleRegion, "Dantzig polytope is empty");
    in[static_cast<size_t>(best)] = 1;
    support.insert(std::lower_bound(support.begin(), support.end(), best), best);
    ++count;
  }
  if (added != nullptr) *added = count;
  return support;
}

HybridResult hybrid_run_detailed(const ProblemData& problem, const HybridOptions& options) {
  const Index p = problem.p();
  const double dmax = p == 0 ? 0.0 : problem.correlations().cwiseAbs().maxCoeff();
  HybridResult out;
  if (problem.delta() >= dmax) {
    out.solution = Solution::from_beta(problem, Vector::Zero(p));
    out.admm_repaired = out.solution;
    return out;
  }
  if (options.lambda_multipliers.empty()) throw Error(ErrorCode::kInvalidArgument, "empty lambda grid");
  const double base = static_cast<double>(p) / dmax;

  struct Candidate {
    double lambda = 0.0;
    Support expanded;
    Vector point;
    int expansions = 0;
    int objective = 0;
  };
  std::vector<Candidate> cands(options.lambda_multipliers.size());
  parallel_for(static_cast<int>(cands.size()), options.workers, [&](int i) {
    Candidate& c = cands[static_cast<size_t>(i)];
    c.lambda = options.lambda_multipliers[static_cast<size_t>(i)] * base;
    const AdmmResult r = admm_run(problem, c.lambda, nullptr, options.admm);
    c.expanded = expand_until_feasible(problem, support_of(r.beta_sparse, 0.0), r.state.alpha, &c.expansions);
    const auto point = feasibility_repair(problem, r.beta_sparse, &c.expanded);
    if (!point) throw Error(ErrorCode::kNumericalBreakdown, "expanded support lost feasibility");
    c.point = *point;
    c.objective = static_cast<int>(support_of(c.point).size());
  });
  const auto best = std::min_element(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.expanded.size() != b.expanded.size()) return a.expanded.size() < b.expanded.size();
    return a.objective < b.objective;
  });
  out.best_lambda = best->lambda;
  out.expanded = best->expanded;
  out.expansions = best->expansions;
  out.admm_repaired = Solution::from_beta(problem, best->point);
  if (!out.admm_repaired.feasible()) out.admm_repaired = Solution::from_beta(problem, best->point, 0.0);

  const ReweightedResult rw =
      reweighted_run(problem, options.kind, options.schedule, &best->point, options.reweighted, &out.expanded);
  Solution sol = Solution::from_beta(problem, rw.beta);
  if (!sol.feasible()) sol = Solution::from_beta(problem, rw.beta, 0.0);
  out.solution = sol.objective <= out.admm_repaired.objective ? std::move(sol) : out.admm_repaired;
  return out;
}

Solution hybrid_run(const ProblemData& problem, const HybridOptions& options) {
  return hybrid_run_detailed(problem, options).solution;
}

}  // namespace ddsel
