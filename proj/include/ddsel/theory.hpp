#pragma once

#include "ddsel/core.hpp"

#include <cstdint>
#include <optional>

namespace ddsel {

/// Solutions under an orthonormal design: every vector equal to c_j + u_j
/// (|u_j| ≤ δ) on the k coordinates with |c_j| > δ and zero elsewhere.
struct OrthoSolutionSet {
  int k = 0;
  Support support;
  Vector base;   // c restricted to `support`, in support order
  double slack = 0.0;

  bool contains(const Vector& beta, double tol = 1e-12) const;
};

/// Throws TieAtThreshold if some |c_j| is within 1e-12 of δ.
OrthoSolutionSet orthonormal_solution(const Vector& c, double delta);

struct BruteForceResult {
  int objective = 0;
  Support support;
};

/// Smallest feasible support by enumeration in increasing size.
/// Throws TooLarge for p > max_p.
BruteForceResult brute_force_dds(const ProblemData& problem, int max_p = 14);

/// min over |J| = k of σ_min(X_J). With `contains`, only J ⊇ contains are
/// considered (the support-dependent constant). Throws TooLarge beyond 10⁶ subsets.
double gamma_constant(const Matrix& x, int k, const Support* contains = nullptr);

struct KappaOptions {
  int samples = 16;
  int iterations = 300;
  std::uint64_t seed = 0;
  /// Denominator uses J₀ plus the m largest outside coordinates when set.
  std::optional<int> m;
};

/// Upper estimate of min over |J₀| ≤ k and θ in the cone
/// ‖θ_{J₀ᶜ}‖₁ ≤ c₀‖θ_{J₀}‖₁ of ‖Xθ‖₂/‖θ_{J₀}‖₂, by multi-start projected
/// gradient. Every evaluated point lies in the cone, so the value is never
/// below the true minimum.
double kappa_estimate(const Matrix& x, int k, double c0, const KappaOptions& options = {});

/// The same minimum over a unit-sphere grid with the given angular step.
/// Only for p ≤ 4.
double kappa_grid(const Matrix& x, int k, double c0, double resolution = 0.02, std::optional<int> m = std::nullopt);

struct ErrorBoundReport {
  double delta = 0.0;   // σ√(2(1+a) log p)
  double gamma = 0.0;   // γ(2s*)
  int s_star = 0;
  double sparsity_lhs = 0.0, sparsity_bound = 0.0;
  double l1_lhs = 0.0, l1_bound = 0.0;
  double l2sq_lhs = 0.0, l2sq_bound = 0.0;
  double pred_lhs = 0.0, pred_bound = 0.0;
  bool sparsity_ok = false, l1_ok = false, l2sq_ok = false, pred_ok = false;
};

/// Evaluates the ℓ0, ℓ1, squared ℓ2 and prediction error bounds that hold
/// with high probability at δ = σ√(2(1+a) log p). γ(2s*) is computed by
/// enumeration unless supplied; throws GammaUnavailable if that is too large.
ErrorBoundReport error_bound_check(const ProblemData& problem, const Vector& beta_star, const Vector& beta_hat,
                                   double a, double sigma, std::optional<double> gamma = std::nullopt);

}  // namespace ddsel
