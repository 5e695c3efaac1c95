#include "ddsel/bench.hpp"

#include "ddsel/lp.hpp"
#include "ddsel/parallel.hpp"
#include "ddsel/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ddsel {

namespace {

double sample_variance(const Vector& v) {
  if (v.size() < 2) return 0.0;
  const double mean = v.mean();
  return (v.array() - mean).square().sum() / static_cast<double>(v.size() - 1);
}

double noise_sigma(const Vector& signal, double snr) {
  if (!(snr > 0.0)) throw Error(ErrorCode::kInvalidArgument, "snr must be positive");
  if (std::isinf(snr)) return 0.0;
  return std::sqrt(sample_variance(signal) / snr);
}

Instance finish(Matrix x, Vector beta_star, double snr, Philox& rng) {
  Vector signal = x * beta_star;
  const double sigma = noise_sigma(signal, snr);
  Vector y = signal;
  if (sigma > 0.0) {
    for (Index i = 0; i < y.size(); ++i) y[i] += sigma * rng.normal();
  }
  return Instance{ProblemData(std::move(x), std::move(y)), std::move(beta_star), sigma};
}

}  // namespace

Support equispaced_support(Index p, int k) {
  if (k < 0 || k > p) throw Error(ErrorCode::kInvalidArgument, "k_star must lie in [0, p]");
  Support s;
  if (k == 0) return s;
  if (k == 1) return {0};
  for (int t = 1; t <= k; ++t) {
    const double pos = 1.0 + static_cast<double>(t - 1) * static_cast<double>(p - 1) / static_cast<double>(k - 1);
    s.push_back(static_cast<int>(std::lround(pos)) - 1);
  }
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

Instance gen_type_synth(const SynthSpec& spec) {
  if (spec.n < 2 || spec.p < 1) throw Error(ErrorCode::kInvalidArgument, "need n ≥ 2 and p ≥ 1");
  if (!(spec.rho >= 0.0 && spec.rho < 1.0)) throw Error(ErrorCode::kInvalidArgument, "rho must lie in [0, 1)");
  Philox rng(spec.seed);
  Matrix x(spec.n, spec.p);
  const double innovation = std::sqrt(1.0 - spec.rho * spec.rho);
  // Row-major draws keep the stream layout independent of the column count.
  for (Index i = 0; i < spec.n; ++i) {
    x(i, 0) = rng.normal();
    for (Index j = 1; j < spec.p; ++j) x(i, j) = spec.rho * x(i, j - 1) + innovation * rng.normal();
  }
  x = standardize_columns(x);
  Vector beta_star = Vector::Zero(spec.p);
  for (int j : equispaced_support(spec.p, spec.k_star)) beta_star[j] = 1.0;
  return finish(std::move(x), std::move(beta_star), spec.snr, rng);
}

Example1 gen_example1(Index n, double tau, double snr, std::uint64_t seed) {
  if (!(tau > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tau must be positive");
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "need n ≥ 2");
  const Index p = n + 1;
  Matrix x = Matrix::Zero(n, p);
  x(0, 0) = 1.0;
  for (Index i = 1; i < n; ++i) x(i, 0) = tau;
  for (Index j = 1; j < p; ++j) x(j - 1, j) = 1.0;
  Vector beta_star = Vector::Zero(p);
  beta_star[0] = 1.0;
  beta_star[1] = -1.0;
  Example1 ex;
  ex.tau = tau;
  ex.recovery_threshold = tau / (1.0 + tau);
  ex.l1_failure_product = tau * static_cast<double>(n - 1);
  if (snr > 0.0 && std::isfinite(snr)) {
    Philox rng(seed);
    ex.instance = finish(std::move(x), std::move(beta_star), snr, rng);
  } else {
    Vector y = x.col(0) - x.col(1);
    ex.instance = Instance{ProblemData(std::move(x), std::move(y)), std::move(beta_star), 0.0};
  }
  return ex;
}

Instance gen_example_corr_pair(Index n, Index p, double corr, double snr, std::uint64_t seed) {
  if (p < 2) throw Error(ErrorCode::kInvalidArgument, "need p ≥ 2");
  if (!(std::abs(corr) < 1.0)) throw Error(ErrorCode::kInvalidArgument, "corr must lie in (−1, 1)");
  Philox rng(seed);
  Matrix x(n, p);
  const double innovation = std::sqrt(1.0 - corr * corr);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) x(i, j) = rng.normal();
    x(i, 1) = corr * x(i, 0) + innovation * x(i, 1);
  }
  x = standardize_columns(x);
  Vector beta_star = Vector::Zero(p);
  beta_star[0] = 1.0;
  beta_star[1] = -1.0;
  return finish(std::move(x), std::move(beta_star), snr, rng);
}

Metrics evaluate(const ProblemData& problem, const Vector& beta_star, const Vector& beta_hat) {
  if (beta_star.size() != problem.p() || beta_hat.size() != problem.p()) {
    throw Error(ErrorCode::kDimensionMismatch, "coefficient length mismatch");
  }
  const Vector signal = problem.X() * beta_star;
  const double signal_sq = signal.squaredNorm();
  if (signal_sq == 0.0) throw Error(ErrorCode::kZeroSignal, "Xβ* is zero");
  Metrics m;
  m.est_error = (beta_hat - beta_star).squaredNorm();
  m.pred_error = (problem.X() * beta_hat - signal).squaredNorm() / signal_sq;
  for (Index j = 0; j < problem.p(); ++j) {
    const bool hat = std::abs(beta_hat[j]) > kZeroTol;
    const bool star = beta_star[j] != 0.0;
    if (hat != star) ++m.selection_error;
    if (hat) ++m.nonzeros;
  }
  return m;
}

std::vector<double> default_grid(double delta_bar, int points, double lo, double hi) {
  if (points < 1 || !(lo > 0.0) || !(hi >= lo) || !(delta_bar > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid grid specification");
  }
  std::vector<double> grid;
  if (points == 1) return {std::sqrt(lo * hi) * delta_bar};
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < points; ++i) {
    grid.push_back(delta_bar * std::exp(b - (b - a) * i / (points - 1)));
  }
  return grid;
}

PathResult path_run(const ProblemData& problem, std::vector<double> grid, PathMethod method,
                    const PathOptions& options) {
  if (grid.empty()) throw Error(ErrorCode::kInvalidArgument, "grid is empty");
  std::sort(grid.begin(), grid.end(), std::greater<>());
  PathResult result;
  result.grid = grid;
  std::optional<Solution> previous;
  for (double delta : grid) {
    PathPoint point;
    point.delta = delta;
    const ProblemData at = problem.with_delta(delta);
    try {
      if (method == PathMethod::kL1) {
        point.solution = solve_l1_dantzig(at);
        point.optimal = true;
      } else {
        IntelligenceConfig config = options.milo;
        // The previous point solved a looser constraint; re-fit it on its own
        // support and offer it as a competing warm start.
        if (options.warm_chain && previous) {
          if (auto fixed = feasibility_repair(at, previous->beta, &previous->support)) {
            const Solution candidate = Solution::from_beta(at, *fixed);
            if (candidate.feasible()) config.warm_start = candidate;
          }
        }
        const MiloResult r = solve_with_intelligence(at, delta, config);
        if (r.has_incumbent) point.solution = r.incumbent;
        point.optimal = r.status == MiloStatus::kOptimal;
      }
    } catch (const Error& e) {
      point.error = e.what();
    }
    if (point.solution) previous = point.solution;
    result.points.push_back(std::move(point));
  }
  std::map<int, size_t> best;
  for (size_t i = 0; i < result.points.size(); ++i) {
    const auto& s = result.points[i].solution;
    if (!s) continue;
    auto it = best.find(s->objective);
    if (it == best.end() || s->residual_inf < result.points[it->second].solution->residual_inf) {
      best[s->objective] = i;
    }
  }
  for (const auto& [size, index] : best) result.representatives.emplace_back(size, index);
  return result;
}

std::vector<CompareRow> compare(const Instance& instance, const CompareOptions& options) {
  const ProblemData& base = instance.problem;
  const double delta_bar = reference_delta(base, instance.beta_star);
  std::vector<double> grid;
  if (options.grid_multipliers.empty()) {
    grid = default_grid(delta_bar, options.grid_points);
  } else {
    for (double m : options.grid_multipliers) grid.push_back(m * delta_bar);
  }

  const size_t g = grid.size();
  std::vector<std::optional<Vector>> l0(g), l1(g), warm(g);
  parallel_for(static_cast<int>(g), options.workers, [&](int i) {
    const ProblemData at = base.with_delta(grid[static_cast<size_t>(i)]);
    try {
      l1[static_cast<size_t>(i)] = solve_l1_dantzig(at).beta;
    } catch (const Error&) {
    }
    try {
      IntelligenceConfig config = options.milo;
      config.workers = 1;
      const Solution h = hybrid_run(at, config.hybrid);
      warm[static_cast<size_t>(i)] = h.beta;
      config.run_heuristic = false;
      config.warm_start = h;
      const MiloResult r = solve_with_intelligence(at, at.delta(), config);
      if (r.has_incumbent) l0[static_cast<size_t>(i)] = r.incumbent.beta;
    } catch (const Error&) {
    }
  });

  auto pick = [&](const std::string& name, const std::vector<std::optional<Vector>>& path, bool polished) {
    CompareRow best;
    best.estimator = name;
    bool found = false;
    for (size_t i = 0; i < g; ++i) {
      if (!path[i]) continue;
      Vector beta = *path[i];
      if (polished) beta = polish(base, support_of(beta)).beta;
      const Metrics m = evaluate(base, instance.beta_star, beta);
      if (!found || m.est_error < best.metrics.est_error) {
        best.delta = grid[i];
        best.metrics = m;
        found = true;
      }
    }
    return best;
  };

  return {pick("L0-DS", l0, false), pick("L0-DS-Pol", l0, true), pick("L1-DS", l1, false),
          pick("L1-DS-Pol", l1, true), pick("Warm", warm, false)};
}

}  // namespace ddsel
