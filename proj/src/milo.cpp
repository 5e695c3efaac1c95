#include "ddsel/milo.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <tuple>

namespace ddsel {

namespace {

// Coordinates whose big-M is this small are pinned to zero.
constexpr double kTinyM = 1e-12;

bool lifted(const MiloFormulation& form) { return form.bounds && form.use_prediction_vars; }

// Node LP over β⁺, β⁻ ∈ [0, M_j] (and ξ⁺, ξ⁻ ∈ [0, M^ξ_i] when lifted).
// Rows: the p correlation rows, then the structured rows.
LinearProgram node_program(const MiloFormulation& form, const Vector& m) {
  const ProblemData& pr = form.problem;
  const Index n = pr.n(), p = pr.p();
  const bool structured = form.bounds.has_value();
  const bool lift = lifted(form);
  const Index vars = 2 * p + (lift ? 2 * n : 0);
  const Index rows = p + (structured ? 1 + n + (lift ? 1 : 0) : 0);
  LinearProgram lp(rows, vars);
  lp.constraint_matrix.setZero();
  lp.constraint_matrix.block(0, 0, p, p) = pr.gram();
  lp.constraint_matrix.block(0, p, p, p) = -pr.gram();
  lp.row_lower.head(p) = pr.correlations().array() - pr.delta();
  lp.row_upper.head(p) = pr.correlations().array() + pr.delta();
  lp.objective.setZero();
  for (Index j = 0; j < p; ++j) {
    lp.var_upper[j] = lp.var_upper[p + j] = m[j];
  }
  if (structured) {
    const BoundSet& b = *form.bounds;
    Index r = p;
    lp.constraint_matrix.block(r, 0, 1, 2 * p).setOnes();
    lp.row_lower[r] = -kInf;
    lp.row_upper[r] = b.l1_coef;
    ++r;
    lp.constraint_matrix.block(r, 0, n, p) = pr.X();
    lp.constraint_matrix.block(r, p, n, p) = -pr.X();
    if (lift) {
      lp.constraint_matrix.block(r, 2 * p, n, n) = -Matrix::Identity(n, n);
      lp.constraint_matrix.block(r, 2 * p + n, n, n) = Matrix::Identity(n, n);
      lp.row_lower.segment(r, n).setZero();
      lp.row_upper.segment(r, n).setZero();
      for (Index i = 0; i < n; ++i) lp.var_upper[2 * p + i] = lp.var_upper[2 * p + n + i] = b.pred_upper[i];
      r += n;
      lp.constraint_matrix.block(r, 2 * p, 1, 2 * n).setOnes();
      lp.row_lower[r] = -kInf;
      lp.row_upper[r] = b.l1_pred;
    } else {
      lp.row_lower.segment(r, n) = -b.pred_upper;
      lp.row_upper.segment(r, n) = b.pred_upper;
    }
  }
  return lp;
}

enum class CoordState : std::uint8_t { kFree, kZero, kOne };

struct OpenNode {
  BnbNode node;
  long id = 0;
  long parent_id = -1;
  std::shared_ptr<const Basis> basis;
};

// Best bound first; deeper nodes, then older nodes, break ties.
using OpenKey = std::tuple<double, int, long>;
OpenKey key_of(const OpenNode& n) { return {n.node.relaxation_bound, -n.node.depth, n.id}; }

int ceil_bound(double lower) { return static_cast<int>(std::ceil(lower - kIntTol)); }

std::optional<Solution> candidate_from(const ProblemData& problem, const Vector& beta) {
  Solution s = Solution::from_beta(problem, beta);
  if (s.feasible()) return s;
  s = Solution::from_beta(problem, beta, 0.0);
  if (s.feasible()) return s;
  return std::nullopt;
}

}  // namespace

const char* to_string(MiloStatus status) {
  switch (status) {
    case MiloStatus::kOptimal: return "Optimal";
    case MiloStatus::kGapLimit: return "GapLimit";
    case MiloStatus::kTimeLimit: return "TimeLimit";
    case MiloStatus::kNodeLimit: return "NodeLimit";
    case MiloStatus::kInfeasible: return "Infeasible";
  }
  return "Unknown";
}

double optimality_gap(int upper, double lower) {
  if (upper <= 0) return 0.0;
  const int lb = std::min(std::max(ceil_bound(lower), 0), upper);
  return static_cast<double>(upper - lb) / static_cast<double>(upper);
}

Vector MiloFormulation::coordinate_m() const {
  Vector m = Vector::Constant(problem.p(), big_m);
  if (bounds) m = m.cwiseMin(bounds->coef_upper);
  return m;
}

LinearProgram MiloFormulation::relaxation() const {
  const Index n = problem.n(), p = problem.p();
  const bool structured = bounds.has_value();
  const bool lift = lifted(*this);
  const Vector m = coordinate_m();
  // Variables: β, z, then u ≥ |β| and, when lifted, ξ and v ≥ |ξ|.
  const Index vars = 2 * p + (structured ? p : 0) + (lift ? 2 * n : 0);
  const Index rows = 3 * p + (structured ? 2 * p + 1 + n : 0) + (lift ? 2 * n + 1 : 0);
  LinearProgram lp(rows, vars);
  lp.constraint_matrix.setZero();
  lp.objective.setZero();
  lp.objective.segment(p, p).setOnes();
  lp.var_lower.head(p).setConstant(-kInf);
  lp.var_upper.head(p).setConstant(kInf);
  lp.var_upper.segment(p, p).setOnes();
  Index r = 0;
  lp.constraint_matrix.block(0, 0, p, p) = problem.gram();
  lp.row_lower.head(p) = problem.correlations().array() - problem.delta();
  lp.row_upper.head(p) = problem.correlations().array() + problem.delta();
  r = p;
  for (Index j = 0; j < p; ++j, r += 2) {
    lp.constraint_matrix(r, j) = 1.0;
    lp.constraint_matrix(r, p + j) = -m[j];
    lp.constraint_matrix(r + 1, j) = -1.0;
    lp.constraint_matrix(r + 1, p + j) = -m[j];
    lp.row_lower[r] = lp.row_lower[r + 1] = -kInf;
    lp.row_upper[r] = lp.row_upper[r + 1] = 0.0;
  }
  if (!structured) return lp;
  const BoundSet& b = *bounds;
  const Index u0 = 2 * p;
  for (Index j = 0; j < p; ++j, r += 2) {
    lp.constraint_matrix(r, j) = 1.0;
    lp.constraint_matrix(r, u0 + j) = -1.0;
    lp.constraint_matrix(r + 1, j) = -1.0;
    lp.constraint_matrix(r + 1, u0 + j) = -1.0;
    lp.row_lower[r] = lp.row_lower[r + 1] = -kInf;
    lp.row_upper[r] = lp.row_upper[r + 1] = 0.0;
  }
  lp.constraint_matrix.block(r, u0, 1, p).setOnes();
  lp.row_lower[r] = -kInf;
  lp.row_upper[r] = b.l1_coef;
  ++r;
  lp.constraint_matrix.block(r, 0, n, p) = problem.X();
  if (!lift) {
    lp.row_lower.segment(r, n) = -b.pred_upper;
    lp.row_upper.segment(r, n) = b.pred_upper;
    return lp;
  }
  const Index xi0 = 3 * p, v0 = 3 * p + n;
  lp.constraint_matrix.block(r, xi0, n, n) = -Matrix::Identity(n, n);
  lp.row_lower.segment(r, n).setZero();
  lp.row_upper.segment(r, n).setZero();
  lp.var_lower.segment(xi0, n) = -b.pred_upper;
  lp.var_upper.segment(xi0, n) = b.pred_upper;
  r += n;
  for (Index i = 0; i < n; ++i, r += 2) {
    lp.constraint_matrix(r, xi0 + i) = 1.0;
    lp.constraint_matrix(r, v0 + i) = -1.0;
    lp.constraint_matrix(r + 1, xi0 + i) = -1.0;
    lp.constraint_matrix(r + 1, v0 + i) = -1.0;
    lp.row_lower[r] = lp.row_lower[r + 1] = -kInf;
    lp.row_upper[r] = lp.row_upper[r + 1] = 0.0;
  }
  lp.constraint_matrix.block(r, v0, 1, n).setOnes();
  lp.row_lower[r] = -kInf;
  lp.row_upper[r] = b.l1_pred;
  return lp;
}

MiloFormulation build_formulation(const ProblemData& problem, double big_m, const std::optional<BoundSet>& bounds) {
  if (!(big_m > 0.0) || !std::isfinite(big_m)) throw Error(ErrorCode::kInvalidArgument, "big_m must be positive and finite");
  MiloFormulation form;
  form.problem = problem;
  form.big_m = big_m;
  const int n = static_cast<int>(problem.n()), p = static_cast<int>(problem.p());
  form.num_constraints = 4 * p;
  form.num_variables = 2 * p;
  if (bounds) {
    bounds->validate();
    if (bounds->coef_upper.size() != p || bounds->pred_upper.size() != n) {
      throw Error(ErrorCode::kInconsistentBounds, "bound vector lengths do not match the data");
    }
    form.bounds = bounds;
    form.use_prediction_vars = n <= 2 * p;
    if (form.use_prediction_vars) {
      form.num_constraints += n + 2 * n + 2;
      form.num_variables += n;
    } else {
      form.num_constraints += 2 * n + 1;
    }
  }
  return form;
}

MiloResult branch_and_bound(const MiloFormulation& form, const std::optional<Solution>& warm_start,
                            const MiloOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  const ProblemData& problem = form.problem;
  const Index p = problem.p();
  const Vector m = form.coordinate_m();
  MiloResult result;

  std::optional<Solution> incumbent;
  auto upper = [&] { return incumbent ? incumbent->objective : INT_MAX; };

  if (warm_start) {
    std::optional<Solution> w;
    if (warm_start->beta.size() != p) throw Error(ErrorCode::kDimensionMismatch, "warm start length mismatch");
    Solution s = Solution::from_beta(problem, warm_start->beta);
    if (s.feasible()) {
      w = s;
    } else {
      Solution pol = polish(problem, s.support);
      if (pol.feasible()) {
        w = pol;
        result.events.push_back("warm start infeasible; replaced by its polished refit");
      } else {
        result.events.push_back("warm start infeasible; ignored");
      }
    }
    if (w && form.bounds && !form.bounds->admits(problem.X(), w->beta)) {
      const Vector clipped = w->beta.cwiseMax(-form.bounds->coef_upper).cwiseMin(form.bounds->coef_upper);
      Solution c = Solution::from_beta(problem, clipped);
      Solution pol = polish(problem, w->support);
      if (c.feasible() && form.bounds->admits(problem.X(), c.beta) && c.objective <= w->objective) {
        w = c;
        result.events.push_back("warm start clipped to structured bounds");
      } else if (pol.feasible() && form.bounds->admits(problem.X(), pol.beta)) {
        w = pol;
        result.events.push_back("warm start re-polished inside structured bounds");
      } else {
        result.events.push_back("warm start lies outside structured bounds; kept as incumbent");
      }
    }
    incumbent = w;
  }

  SimplexSolver solver(node_program(form, m));
  std::vector<CoordState> applied(static_cast<size_t>(p), CoordState::kZero);
  auto apply_state = [&](Index j, CoordState s) {
    if (applied[static_cast<size_t>(j)] == s) return;
    applied[static_cast<size_t>(j)] = s;
    const bool pinned = s == CoordState::kZero || m[j] <= kTinyM;
    const double ub = pinned ? 0.0 : m[j];
    solver.set_var_bounds(j, 0.0, ub);
    solver.set_var_bounds(p + j, 0.0, ub);
    // A coordinate pinned at zero keeps its cost so the dual values of the
    // parent basis stay valid.
    const double cost = (s == CoordState::kOne || m[j] <= kTinyM) ? 0.0 : 1.0 / m[j];
    solver.set_objective_coefficient(j, cost);
    solver.set_objective_coefficient(p + j, cost);
  };
  for (Index j = 0; j < p; ++j) apply_state(j, CoordState::kFree);
  std::vector<CoordState> wanted(static_cast<size_t>(p));
  auto apply_node = [&](const BnbNode& node) {
    std::fill(wanted.begin(), wanted.end(), CoordState::kFree);
    for (int j : node.fixed_zero) wanted[static_cast<size_t>(j)] = CoordState::kZero;
    for (int j : node.fixed_one) wanted[static_cast<size_t>(j)] = CoordState::kOne;
    for (Index j = 0; j < p; ++j) apply_state(j, wanted[static_cast<size_t>(j)]);
  };

  std::map<long, OpenNode> open;
  std::set<OpenKey> queue;
  long next_id = 0;
  auto push = [&](OpenNode n) {
    n.id = next_id++;
    queue.insert(key_of(n));
    open.emplace(n.id, std::move(n));
  };
  auto take = [&](long id) {
    auto it = open.find(id);
    OpenNode n = std::move(it->second);
    open.erase(it);
    queue.erase(key_of(n));
    return n;
  };

  // Global lower bound: the smallest open bound, never above the incumbent.
  double lower = 0.0;
  auto refresh_lower = [&] {
    double lb = queue.empty() ? (incumbent ? upper() : lower) : std::get<0>(*queue.begin());
    if (incumbent) lb = std::min(lb, static_cast<double>(upper()));
    lower = std::max(lower, lb);
  };
  int last_upper = -1;
  int last_lower = -1;
  auto report = [&] {
    const int ub = incumbent ? upper() : -1;
    const int lb = std::max(ceil_bound(lower), 0);
    if (ub == last_upper && lb == last_lower) return;
    last_upper = ub;
    last_lower = lb;
    ProgressEntry e{elapsed(), ub, static_cast<double>(lb), incumbent ? optimality_gap(ub, lower) : 1.0,
                    result.nodes_explored};
    result.progress.push_back(e);
    if (options.on_progress) options.on_progress(e);
  };

  push(OpenNode{BnbNode{}, 0, -1, nullptr});
  long last_solved = -1;
  bool plunging = false;
  long plunge_target = -1;
  std::optional<MiloStatus> stop;
  bool root_done = false;
  report();

  while (!queue.empty()) {
    if (incumbent && optimality_gap(upper(), lower) <= options.limits.gap) break;
    if (root_done && elapsed() >= options.limits.time_s) {
      stop = MiloStatus::kTimeLimit;
      break;
    }
    if (result.nodes_explored >= options.limits.nodes) {
      stop = MiloStatus::kNodeLimit;
      break;
    }
    const long id = (plunging && open.count(plunge_target)) ? plunge_target : std::get<2>(*queue.begin());
    plunging = false;
    OpenNode current = take(id);
    if (ceil_bound(current.node.relaxation_bound) >= upper()) {
      refresh_lower();
      continue;
    }
    apply_node(current.node);
    // A child of the node just solved starts from the solver's current basis.
    if (current.basis && current.parent_id != last_solved) solver.set_basis(*current.basis);
    LpSolution sol = solver.solve();
    if (sol.status == LpStatus::kIterationLimit) {
      solver.set_basis(Basis{});
      sol = solver.solve();
      if (sol.status == LpStatus::kIterationLimit) throw Error(ErrorCode::kNumericalBreakdown, "node LP hit the iteration limit");
    }
    last_solved = current.id;
    ++result.nodes_explored;
    result.lp_iterations += sol.iterations;

    double bound = current.node.relaxation_bound;
    if (sol.status == LpStatus::kOptimal) {
      bound = std::max(bound, sol.objective_value + static_cast<double>(current.node.fixed_one.size()));
      if (!root_done) result.root_bound = bound;
      const Vector beta = sol.x.head(p) - sol.x.segment(p, p);
      if (auto cand = candidate_from(problem, beta); cand && cand->objective < upper()) incumbent = cand;

      if (ceil_bound(bound) < upper()) {
        int pick = -1;
        double best_frac = kIntTol, best_mag = 0.0;
        std::vector<char> fixed(static_cast<size_t>(p), 0);
        for (int j : current.node.fixed_zero) fixed[static_cast<size_t>(j)] = 1;
        for (int j : current.node.fixed_one) fixed[static_cast<size_t>(j)] = 1;
        for (Index j = 0; j < p; ++j) {
          if (fixed[static_cast<size_t>(j)] || m[j] <= kTinyM) continue;
          const double z = (sol.x[j] + sol.x[p + j]) / m[j];
          const double frac = std::min(z, 1.0 - z);
          const double mag = std::abs(beta[j]);
          if (frac > best_frac + 1e-12 || (frac > kIntTol && std::abs(frac - best_frac) <= 1e-12 && mag > best_mag)) {
            pick = static_cast<int>(j);
            best_frac = frac;
            best_mag = mag;
          }
        }
        if (pick >= 0) {
          auto basis = std::make_shared<const Basis>(solver.basis());
          BnbNode zero = current.node, one = current.node;
          zero.fixed_zero.insert(std::upper_bound(zero.fixed_zero.begin(), zero.fixed_zero.end(), pick), pick);
          one.fixed_one.insert(std::upper_bound(one.fixed_one.begin(), one.fixed_one.end(), pick), pick);
          zero.relaxation_bound = one.relaxation_bound = bound;
          zero.depth = one.depth = current.node.depth + 1;
          const double z = (sol.x[pick] + sol.x[p + pick]) / m[pick];
          push(OpenNode{std::move(zero), 0, current.id, basis});
          const long zero_id = next_id - 1;
          push(OpenNode{std::move(one), 0, current.id, basis});
          const long one_id = next_id - 1;
          // Dive from this node periodically, and keep diving once started.
          const bool dive = options.plunge_every > 0 &&
                            (current.id == plunge_target || result.nodes_explored % options.plunge_every == 0);
          if (dive) {
            plunging = true;
            plunge_target = z >= 0.5 ? one_id : zero_id;
          }
        }
      }
    }
    root_done = true;
    refresh_lower();
    if (options.record_trace) {
      result.trace.push_back(NodeTrace{result.nodes_explored, current.node.depth, bound, current.node.relaxation_bound,
                                       lower, incumbent ? upper() : -1});
    }
    report();
  }

  refresh_lower();
  result.wall_time = elapsed();
  result.has_incumbent = incumbent.has_value();
  if (incumbent) result.incumbent = *incumbent;
  if (queue.empty() && incumbent) lower = std::max(lower, static_cast<double>(upper()));
  result.lower_bound = incumbent ? std::min(std::max(ceil_bound(lower), 0), upper()) : std::max(ceil_bound(lower), 0);
  result.gap = incumbent ? optimality_gap(upper(), result.lower_bound) : 1.0;
  if (!incumbent) {
    result.status = stop.value_or(MiloStatus::kInfeasible);
  } else if (result.gap == 0.0) {
    result.status = MiloStatus::kOptimal;
  } else if (stop) {
    result.status = *stop;
  } else {
    result.status = MiloStatus::kGapLimit;
  }
  report();
  return result;
}

namespace {

// Heuristic bounds can cut off every optimal solution, so the bound of the
// structured model says nothing about the original problem. Re-solve the plain
// model from the structured incumbent to get a valid lower bound.
MiloResult verify_on_plain_model(const ProblemData& at, const IntelligenceConfig& config, MiloResult structured) {
  // The two solves share the caller's budget; the root is always solved.
  MiloOptions options = config.milo;
  options.limits.nodes = std::max(1L, options.limits.nodes - structured.nodes_explored);
  options.limits.time_s = std::max(0.0, options.limits.time_s - structured.wall_time);
  MiloResult r = branch_and_bound(build_formulation(at, config.big_m), structured.incumbent, options);
  for (ProgressEntry& e : r.progress) {
    e.seconds += structured.wall_time;
    e.nodes += structured.nodes_explored;
  }
  std::vector<std::string> events = std::move(structured.events);
  events.push_back("heuristic bounds; lower bound taken from the plain big-M model");
  events.insert(events.end(), r.events.begin(), r.events.end());
  r.events = std::move(events);
  r.nodes_explored += structured.nodes_explored;
  r.lp_iterations += structured.lp_iterations;
  r.wall_time += structured.wall_time;
  return r;
}

}  // namespace

MiloResult solve_with_intelligence(const ProblemData& problem, double delta, const IntelligenceConfig& config) {
  const ProblemData at = problem.with_delta(delta);
  std::optional<Solution> warm;
  auto offer = [&](const Solution& s) {
    const Solution c = Solution::from_beta(at, s.beta);
    if (c.feasible() && (!warm || c.objective < warm->objective)) warm = c;
  };
  std::vector<std::string> events;
  if (config.warm_start) offer(*config.warm_start);
  if (config.run_heuristic) {
    try {
      HybridOptions h = config.hybrid;
      h.workers = std::max(h.workers, config.workers);
      offer(hybrid_run(at, h));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInfeasibleRegion) throw;
      MiloResult r;
      r.status = MiloStatus::kInfeasible;
      r.events.push_back("Dantzig polytope is empty");
      return r;
    }
  }

  std::optional<BoundSet> bounds;
  if (warm && config.bounds == BoundsSource::kWarmStart) {
    bounds = warm_start_bounds(*warm, at, WarmBoundOptions{config.tau, config.big_m, config.guarded_pred_l1});
  } else if (warm && config.bounds == BoundsSource::kLp) {
    bounds = lp_bounds(at, *warm, config.tau, config.workers);
  } else if (!warm && config.bounds != BoundsSource::kNone) {
    events.push_back("no warm start; structured bounds skipped");
  }
  if (bounds && bounds->global_coef > config.big_m) {
    bounds->coef_upper = bounds->coef_upper.cwiseMin(config.big_m);
    bounds->global_coef = bounds->coef_upper.size() > 0 ? bounds->coef_upper.maxCoeff() : 0.0;
    bounds->flags.push_back("coef_upper_clipped_to_big_m");
  }

  for (int round = 0;; ++round) {
    MiloResult r = branch_and_bound(build_formulation(at, config.big_m, bounds), warm, config.milo);
    r.events.insert(r.events.begin(), events.begin(), events.end());
    if (bounds) {
      for (const auto& f : bounds->flags) r.events.push_back("bounds: " + f);
    }
    const bool suspicious = !r.has_incumbent || (warm && r.incumbent.objective > warm->objective);
    if (bounds && !suspicious && !bounds->certified()) return verify_on_plain_model(at, config, std::move(r));
    if (!bounds || !suspicious) return r;
    // The structured model looks too tight: relax it and retry.
    events.push_back("structured model rejected every candidate; bounds doubled");
    if (round + 1 >= config.max_doublings) {
      events.push_back("falling back to the plain big-M model");
      bounds.reset();
      continue;
    }
    bounds->coef_upper = (2.0 * bounds->coef_upper).cwiseMin(config.big_m);
    bounds->pred_upper *= 2.0;
    bounds->l1_coef *= 2.0;
    bounds->l1_pred *= 2.0;
    bounds->global_coef = bounds->coef_upper.size() > 0 ? bounds->coef_upper.maxCoeff() : 0.0;
  }
}

}  // namespace ddsel
