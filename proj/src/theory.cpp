#include "ddsel/theory.hpp"

#include "ddsel/lp.hpp"
#include "ddsel/rng.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ddsel {

namespace {

constexpr double kSubsetLimit = 1e6;

double binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (Index i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

// Calls visit(subset) for every k-subset of `pool`, in lexicographic order.
template <class Visit>
void for_each_combination(const Support& pool, int k, Visit&& visit) {
  const int n = static_cast<int>(pool.size());
  if (k > n || k < 0) return;
  std::vector<int> idx(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
  Support subset(static_cast<size_t>(k));
  while (true) {
    for (int i = 0; i < k; ++i) subset[static_cast<size_t>(i)] = pool[static_cast<size_t>(idx[static_cast<size_t>(i)])];
    visit(subset);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
  }
}

Support range(Index p) {
  Support s(static_cast<size_t>(p));
  for (Index j = 0; j < p; ++j) s[static_cast<size_t>(j)] = static_cast<int>(j);
  return s;
}

double smallest_singular_value(const Matrix& x, const Support& cols) {
  const Index k = static_cast<Index>(cols.size());
  if (k == 0) return kInf;
  if (k > x.rows()) return 0.0;
  Matrix sub(x.rows(), k);
  for (Index t = 0; t < k; ++t) sub.col(t) = x.col(cols[static_cast<size_t>(t)]);
  Eigen::JacobiSVD<Matrix> svd(sub);
  return svd.singularValues()[k - 1];
}

// Euclidean projection of v onto {u : ‖u‖₁ ≤ radius}.
Vector project_l1_ball(const Vector& v, double radius) {
  if (v.lpNorm<1>() <= radius) return v;
  if (radius <= 0.0) return Vector::Zero(v.size());
  std::vector<double> a(static_cast<size_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) a[static_cast<size_t>(i)] = std::abs(v[i]);
  std::sort(a.begin(), a.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    cumulative += a[i];
    const double t = (cumulative - radius) / static_cast<double>(i + 1);
    if (a[i] > t) theta = t;
  }
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) out[i] = soft_threshold(v[i], theta);
  return out;
}

// Coordinates in the denominator: J₀ plus, with m, the m largest |θ| outside it.
std::vector<char> denominator_mask(const Vector& theta, const std::vector<char>& in_j0, const std::optional<int>& m) {
  std::vector<char> mask = in_j0;
  if (!m || *m <= 0) return mask;
  std::vector<int> outside;
  for (Index j = 0; j < theta.size(); ++j) {
    if (!in_j0[static_cast<size_t>(j)]) outside.push_back(static_cast<int>(j));
  }
  const size_t take = std::min(outside.size(), static_cast<size_t>(*m));
  std::partial_sort(outside.begin(), outside.begin() + static_cast<long>(take), outside.end(),
                    [&](int a, int b) { return std::abs(theta[a]) > std::abs(theta[b]) || (std::abs(theta[a]) == std::abs(theta[b]) && a < b); });
  for (size_t t = 0; t < take; ++t) mask[static_cast<size_t>(outside[t])] = 1;
  return mask;
}

struct ConeRatio {
  const Matrix& gram;
  const std::vector<char>& in_j0;
  double c0;
  std::optional<int> m;

  bool in_cone(const Vector& theta) const {
    double inside = 0.0, outside = 0.0;
    for (Index j = 0; j < theta.size(); ++j) {
      (in_j0[static_cast<size_t>(j)] ? inside : outside) += std::abs(theta[j]);
    }
    return outside <= c0 * inside * (1.0 + 1e-12);
  }

  // Squared ratio ‖Xθ‖²/‖θ_D‖² and its gradient on the current D.
  double value(const Vector& theta, Vector* grad) const {
    const auto mask = denominator_mask(theta, in_j0, m);
    Vector masked = theta;
    for (Index j = 0; j < theta.size(); ++j) {
      if (!mask[static_cast<size_t>(j)]) masked[j] = 0.0;
    }
    const double den = masked.squaredNorm();
    if (den <= 0.0) return kInf;
    const Vector qt = gram * theta;
    const double f = theta.dot(qt) / den;
    if (grad) *grad = 2.0 * (qt - f * masked) / den;
    return std::max(f, 0.0);
  }

  Vector project(const Vector& theta) const {
    Vector out = theta;
    double inside = 0.0;
    std::vector<Index> outside;
    for (Index j = 0; j < theta.size(); ++j) {
      if (in_j0[static_cast<size_t>(j)]) {
        inside += std::abs(theta[j]);
      } else {
        outside.push_back(j);
      }
    }
    Vector v(static_cast<Index>(outside.size()));
    for (size_t t = 0; t < outside.size(); ++t) v[static_cast<Index>(t)] = theta[outside[t]];
    const Vector pv = project_l1_ball(v, c0 * inside);
    for (size_t t = 0; t < outside.size(); ++t) out[outside[t]] = pv[static_cast<Index>(t)];
    const double norm = out.norm();
    return norm > 0.0 ? Vector(out / norm) : out;
  }
};

}  // namespace

bool OrthoSolutionSet::contains(const Vector& beta, double tol) const {
  std::vector<char> in_support(static_cast<size_t>(beta.size()), 0);
  for (size_t t = 0; t < support.size(); ++t) {
    const int j = support[t];
    if (j >= beta.size()) return false;
    in_support[static_cast<size_t>(j)] = 1;
    if (std::abs(beta[j] - base[static_cast<Index>(t)]) > slack + tol) return false;
  }
  for (Index j = 0; j < beta.size(); ++j) {
    if (!in_support[static_cast<size_t>(j)] && std::abs(beta[j]) > tol) return false;
  }
  return true;
}

OrthoSolutionSet orthonormal_solution(const Vector& c, double delta) {
  if (!(delta >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "delta must be nonnegative");
  OrthoSolutionSet set;
  set.slack = delta;
  std::vector<double> base;
  for (Index j = 0; j < c.size(); ++j) {
    const double a = std::abs(c[j]);
    if (std::abs(a - delta) <= 1e-12) throw Error(ErrorCode::kTieAtThreshold, "|c_j| equals delta", static_cast<int>(j));
    if (a > delta) {
      set.support.push_back(static_cast<int>(j));
      base.push_back(c[j]);
    }
  }
  set.k = static_cast<int>(set.support.size());
  set.base = Eigen::Map<const Vector>(base.data(), static_cast<Index>(base.size()));
  return set;
}

BruteForceResult brute_force_dds(const ProblemData& problem, int max_p) {
  const Index p = problem.p();
  if (p > max_p) throw Error(ErrorCode::kTooLarge, "too many coordinates for enumeration");
  const Support all = range(p);
  for (int k = 0; k <= p; ++k) {
    std::optional<Support> found;
    for_each_combination(all, k, [&](const Support& s) {
      if (found) return;
      if (phase1_feasible(problem.gram(), problem.correlations(), problem.delta(), complement(s, p))) found = s;
    });
    if (found) return {k, *found};
  }
  throw Error(ErrorCode::kInfeasibleRegion, "Dantzig polytope is empty");
}

double gamma_constant(const Matrix& x, int k, const Support* contains) {
  const Index p = x.cols();
  if (k < 1 || k > p) throw Error(ErrorCode::kInvalidArgument, "k must lie in [1, p]");
  Support fixed = contains ? *contains : Support{};
  std::sort(fixed.begin(), fixed.end());
  if (static_cast<int>(fixed.size()) > k) throw Error(ErrorCode::kInvalidArgument, "contained set larger than k");
  const Support pool = complement(fixed, p);
  const int extra = k - static_cast<int>(fixed.size());
  if (binomial(static_cast<Index>(pool.size()), extra) > kSubsetLimit) {
    throw Error(ErrorCode::kTooLarge, "too many subsets for enumeration");
  }
  double best = kInf;
  for_each_combination(pool, extra, [&](const Support& s) {
    Support cols = fixed;
    cols.insert(cols.end(), s.begin(), s.end());
    best = std::min(best, smallest_singular_value(x, cols));
  });
  return best;
}

double kappa_estimate(const Matrix& x, int k, double c0, const KappaOptions& options) {
  const Index p = x.cols();
  if (k < 1 || k > p) throw Error(ErrorCode::kInvalidArgument, "k must lie in [1, p]");
  if (!(c0 >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "c0 must be nonnegative");
  if (binomial(p, k) * options.samples > kSubsetLimit) throw Error(ErrorCode::kTooLarge, "too many cone searches");
  const Matrix gram = x.transpose() * x;
  const double step0 = 1.0 / std::max(gram.operatorNorm(), 1e-300);
  Philox rng(options.seed);
  double best = kInf;
  for_each_combination(range(p), k, [&](const Support& j0) {
    std::vector<char> in_j0(static_cast<size_t>(p), 0);
    for (int j : j0) in_j0[static_cast<size_t>(j)] = 1;
    const ConeRatio cone{gram, in_j0, c0, options.m};
    for (int s = 0; s < options.samples; ++s) {
      Vector theta(p);
      for (Index j = 0; j < p; ++j) theta[j] = rng.normal();
      if (s == 0) {
        for (Index j = 0; j < p; ++j) {
          if (!in_j0[static_cast<size_t>(j)]) theta[j] = 0.0;
        }
      }
      theta = cone.project(theta);
      Vector grad;
      double f = cone.value(theta, &grad);
      double step = step0;
      for (int it = 0; it < options.iterations && std::isfinite(f); ++it) {
        bool moved = false;
        for (int tries = 0; tries < 40; ++tries) {
          const Vector cand = cone.project(theta - step * grad);
          Vector cand_grad;
          const double fc = cone.value(cand, &cand_grad);
          if (fc < f) {
            theta = cand;
            f = fc;
            grad = cand_grad;
            step *= 2.0;
            moved = true;
            break;
          }
          step *= 0.5;
        }
        if (!moved) break;
      }
      best = std::min(best, std::sqrt(f));
    }
  });
  return best;
}

double kappa_grid(const Matrix& x, int k, double c0, double resolution, std::optional<int> m) {
  const Index p = x.cols();
  if (p > 4) throw Error(ErrorCode::kTooLarge, "grid evaluation is limited to p ≤ 4");
  if (k < 1 || k > p) throw Error(ErrorCode::kInvalidArgument, "k must lie in [1, p]");
  if (!(resolution > 0.0)) throw Error(ErrorCode::kInvalidArgument, "resolution must be positive");
  const Matrix gram = x.transpose() * x;
  std::vector<ConeRatio> cones;
  std::vector<std::vector<char>> masks;
  for_each_combination(range(p), k, [&](const Support& j0) {
    std::vector<char> mask(static_cast<size_t>(p), 0);
    for (int j : j0) mask[static_cast<size_t>(j)] = 1;
    masks.push_back(std::move(mask));
  });
  for (const auto& mask : masks) cones.push_back(ConeRatio{gram, mask, c0, m});

  double best = kInf;
  auto visit = [&](const Vector& theta) {
    for (const auto& cone : cones) {
      if (cone.in_cone(theta)) best = std::min(best, std::sqrt(cone.value(theta, nullptr)));
    }
  };
  // θ and −θ give the same ratio, so the last angle covers a half turn.
  const double pi = std::numbers::pi;
  const int steps = static_cast<int>(std::ceil(pi / resolution));
  std::vector<double> angles(static_cast<size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) angles[static_cast<size_t>(i)] = pi * i / steps;
  Vector theta(p);
  if (p == 1) {
    theta[0] = 1.0;
    visit(theta);
  } else if (p == 2) {
    for (double a : angles) {
      theta << std::cos(a), std::sin(a);
      visit(theta);
    }
  } else if (p == 3) {
    for (double a : angles) {
      for (double b : angles) {
        theta << std::cos(a), std::sin(a) * std::cos(b), std::sin(a) * std::sin(b);
        visit(theta);
      }
    }
  } else {
    for (double a : angles) {
      for (double b : angles) {
        for (double c : angles) {
          const double sa = std::sin(a), sb = std::sin(b);
          theta << std::cos(a), sa * std::cos(b), sa * sb * std::cos(c), sa * sb * std::sin(c);
          visit(theta);
        }
      }
    }
  }
  return best;
}

ErrorBoundReport error_bound_check(const ProblemData& problem, const Vector& beta_star, const Vector& beta_hat,
                                   double a, double sigma, std::optional<double> gamma) {
  const Index p = problem.p();
  if (beta_star.size() != p || beta_hat.size() != p) throw Error(ErrorCode::kDimensionMismatch, "coefficient length mismatch");
  if (p < 2) throw Error(ErrorCode::kInvalidArgument, "need p ≥ 2");
  ErrorBoundReport r;
  r.s_star = static_cast<int>(support_of(beta_star, 0.0).size());
  r.delta = sigma * std::sqrt(2.0 * (1.0 + a) * std::log(static_cast<double>(p)));
  if (gamma) {
    r.gamma = *gamma;
  } else {
    const int k = std::min<int>(2 * r.s_star, static_cast<int>(p));
    if (k == 0) {
      r.gamma = kInf;
    } else {
      try {
        r.gamma = gamma_constant(problem.X(), k);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kTooLarge) throw;
        throw Error(ErrorCode::kGammaUnavailable, "γ(2s*) is too expensive to enumerate; supply it");
      }
    }
  }
  const double s = r.s_star, d = r.delta, g2 = r.gamma * r.gamma;
  const Vector diff = beta_hat - beta_star;
  r.sparsity_lhs = static_cast<double>(support_of(beta_hat).size());
  r.sparsity_bound = s;
  r.l1_lhs = diff.lpNorm<1>();
  r.l1_bound = g2 > 0.0 ? 4.0 * s * d / g2 : kInf;
  r.l2sq_lhs = diff.squaredNorm();
  r.l2sq_bound = g2 > 0.0 ? 8.0 * s * d * d / (g2 * g2) : kInf;
  r.pred_lhs = (problem.X() * diff).squaredNorm() / static_cast<double>(problem.n());
  r.pred_bound = g2 > 0.0 ? 8.0 * s * d * d / g2 : kInf;
  r.sparsity_ok = r.sparsity_lhs <= r.sparsity_bound;
  r.l1_ok = r.l1_lhs <= r.l1_bound;
  r.l2sq_ok = r.l2sq_lhs <= r.l2sq_bound;
  r.pred_ok = r.pred_lhs <= r.pred_bound;
  return r;
}

}  // namespace ddsel
