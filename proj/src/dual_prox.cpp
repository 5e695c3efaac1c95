#include "ddsel/lp.hpp"

#include <algorithm>
#include <cmath>

namespace ddsel {

double CompositeProblem::objective(const Vector& alpha) const {
  return 0.5 * (alpha - cbar).squaredNorm() + 0.5 * tau * alpha.squaredNorm() + weights.dot(alpha.cwiseAbs());
}

double estimate_lipschitz(const Matrix& a, int iterations) {
  if (a.size() == 0) return 0.0;
  // Deterministic start with no special alignment to coordinate axes.
  Vector v(a.cols());
  for (Index j = 0; j < v.size(); ++j) v[j] = 1.0 + 0.1 * std::sin(static_cast<double>(j + 1));
  v.normalize();
  double lambda = 0.0;
  Vector av(a.rows());
  for (int it = 0; it < iterations; ++it) {
    av.noalias() = a * v;
    Vector w = a.transpose() * av;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    lambda = norm;
    v = w / norm;
  }
  // Power iteration underestimates; pad so the step stays safe.
  return lambda * 1.01;
}

namespace {

struct DualEval {
  Vector alpha;
  Vector grad;     // Aα̂ − b
  double smooth;   // −g₁(μ) − μᵀb
};

}  // namespace

DualProxResult dual_prox_solve(const CompositeProblem& prob, const Vector* mu0, const DualProxOptions& options) {
  const Index p = prob.cbar.size();
  const Index k = prob.a.rows();
  if (prob.weights.size() != p || prob.a.cols() != p || prob.b.size() != k) {
    throw Error(ErrorCode::kDimensionMismatch, "composite problem dimension mismatch");
  }
  if (!(prob.delta >= 0.0) || !(prob.tau >= 0.0) || (prob.weights.array() < 0.0).any()) {
    throw Error(ErrorCode::kInvalidArgument, "composite problem needs nonnegative delta, tau and weights");
  }
  const double scale = 1.0 / (1.0 + prob.tau);

  auto evaluate = [&](const Vector& mu) {
    DualEval e;
    const Vector z = prob.cbar + prob.a.transpose() * mu;
    e.alpha = scale * soft_threshold(z, prob.weights);
    const Vector aa = prob.a * e.alpha;
    e.grad = aa - prob.b;
    // g₁(μ) = f(α̂) − μᵀAα̂.
    const double g1 = prob.objective(e.alpha) - mu.dot(aa);
    e.smooth = -g1 - mu.dot(prob.b);
    return e;
  };
  auto full = [&](const DualEval& e, const Vector& mu) { return e.smooth + prob.delta * mu.lpNorm<1>(); };

  double lip = options.lipschitz ? *options.lipschitz : estimate_lipschitz(prob.a, options.power_iterations);
  lip *= scale;
  DualProxResult result;
  if (k == 0 || lip == 0.0) {
    result.mu = Vector::Zero(k);
    const DualEval e = evaluate(result.mu);
    result.alpha = e.alpha;
    result.primal_infeasibility = k == 0 ? 0.0 : std::max(0.0, e.grad.cwiseAbs().maxCoeff() - prob.delta);
    result.converged = result.primal_infeasibility == 0.0;
    if (!result.converged) throw Error(ErrorCode::kInfeasibleRegion, "composite constraint set is empty");
    result.dual_objective = -full(e, result.mu);
    return result;
  }
  const double step = 1.0 / lip;
  const double thresh = prob.delta * step;

  Vector mu = mu0 != nullptr && mu0->size() == k ? *mu0 : Vector::Zero(k);
  Vector nu = mu;
  DualEval at_mu = evaluate(mu);
  double f_mu = full(at_mu, mu);
  DualEval at_nu = at_mu;
  double t = 1.0;
  Vector next(k);

  for (int it = 1; it <= options.max_iterations; ++it) {
    // Prox-gradient step from the extrapolated point.
    next = nu - step * at_nu.grad;
    for (Index i = 0; i < k; ++i) next[i] = soft_threshold(next[i], thresh);
    // Residual combines the prox-gradient mapping, primal infeasibility of α̂
    // and the relative duality gap, so a small value certifies the objective.
    const double primal = prob.objective(at_nu.alpha);
    const double dual = -full(at_nu, nu);
    const double infeas = std::max(0.0, at_nu.grad.cwiseAbs().maxCoeff() - prob.delta);
    const double objective_slack = (std::abs(primal - dual) + nu.lpNorm<1>() * infeas) / std::max(1.0, std::abs(primal));
    const double kkt = std::max({lip * (nu - next).cwiseAbs().maxCoeff(), infeas, objective_slack});
    if (kkt <= options.tol) {
      result.mu = nu;
      result.alpha = at_nu.alpha;
      result.kkt_residual = kkt;
      result.primal_infeasibility = infeas;
      result.dual_objective = dual;
      result.iterations = it;
      result.converged = true;
      return result;
    }
    DualEval at_next = evaluate(next);
    const double f_next = full(at_next, next);
    if (f_next > f_mu) {
      // Function-value restart: drop momentum and resume from the last iterate.
      ++result.restarts;
      result.restart_dual_values.push_back(-f_mu);
      t = 1.0;
      nu = mu;
      at_nu = at_mu;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    nu = next + ((t - 1.0) / t_next) * (next - mu);
    t = t_next;
    mu = next;
    at_mu = std::move(at_next);
    f_mu = f_next;
    at_nu = (t - 1.0) == 0.0 ? at_mu : evaluate(nu);
  }
  if (options.throw_on_max_iterations) {
    throw Error(ErrorCode::kMaxIterations, "dual proximal method hit the iteration limit");
  }
  result.mu = mu;
  result.alpha = at_mu.alpha;
  result.primal_infeasibility = std::max(0.0, at_mu.grad.cwiseAbs().maxCoeff() - prob.delta);
  Vector check = mu - step * at_mu.grad;
  for (Index i = 0; i < k; ++i) check[i] = soft_threshold(check[i], thresh);
  result.kkt_residual = lip * (mu - check).cwiseAbs().maxCoeff();
  result.dual_objective = -f_mu;
  result.iterations = options.max_iterations;
  return result;
}

}  // namespace ddsel
