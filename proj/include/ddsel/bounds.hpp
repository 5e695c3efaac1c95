#pragma once

#include "ddsel/core.hpp"

#include <string>
#include <utility>
#include <vector>

namespace ddsel {

enum class BoundProvenance { kLpDerived, kWarmStartDerived };
const char* to_string(BoundProvenance provenance);

/// Box and ℓ1 bounds that hold for some optimal solution, used to tighten
/// the mixed-integer model.
struct BoundSet {
  Vector coef_upper;      // |β_j| ≤ coef_upper_j
  Vector pred_upper;      // |⟨x_i, β⟩| ≤ pred_upper_i
  double l1_coef = 0.0;   // ‖β‖₁ ≤ l1_coef
  double l1_pred = 0.0;   // ‖Xβ‖₁ ≤ l1_pred
  double global_coef = 0.0;
  BoundProvenance provenance = BoundProvenance::kLpDerived;
  std::vector<std::string> flags;

  /// Throws InconsistentBounds on negative or non-finite entries, or a
  /// global_coef that is not the max of coef_upper.
  void validate() const;
  /// True when `beta` satisfies every bound within `tol`.
  bool admits(const Matrix& x, const Vector& beta, double tol = 1e-9) const;
  /// True when every bound was derived from the Dantzig polytope, so it holds
  /// for every optimal solution. Warm-start scalings are heuristic.
  bool certified() const;
};

struct CoefInterval {
  Vector lower;
  Vector upper;
  /// max(|lower_j|, |upper_j|).
  Vector magnitude() const;
};

/// Range of each coordinate over the Dantzig polytope, two LPs per
/// coordinate. Throws UnboundedCoordinate(j) when β_j is unbounded.
CoefInterval coef_bounds(const ProblemData& problem, int workers = 1);

struct RefinedBounds {
  CoefInterval interval;
  double m_u = 0.0;
  /// M_U after each round, starting with the input value.
  std::vector<double> history;
};

/// Coordinate ranges over the polytope intersected with ‖β‖∞ ≤ M_U and
/// ‖β‖₁ ≤ M_U·α₀, iterating M_U ← max_j range until it moves by less than
/// rel_tol or max_rounds is reached.
RefinedBounds coef_bounds_refined(const ProblemData& problem, int alpha0, double m_u, int max_rounds = 5,
                                  double rel_tol = 1e-3, int workers = 1);

struct PredictionBounds {
  Vector v_plus;
  Vector v_minus;
  /// True when the ℓ∞/ℓ1 rows were dropped to keep the LPs bounded.
  bool relaxed = false;
  /// max(v_plus_i, −v_minus_i).
  Vector magnitude() const;
};

/// Range of ⟨x_i, β⟩ over the polytope with ‖β‖∞ ≤ M_U, ‖β‖₁ ≤ M_U·α₀.
/// Pass an infinite m_u for the relaxed variant; it is also used as a
/// fallback when the bounded variant cannot be formed.
PredictionBounds prediction_bounds(const ProblemData& problem, double m_u, int alpha0, int workers = 1);

/// (max_j coef_upper_j, sum of the α₀ largest coef_upper entries).
std::pair<double, double> l1_bounds(const Vector& coef_upper, int alpha0);

struct WarmBoundOptions {
  double tau = 1.5;
  /// Used for coef_upper when the warm start is exactly zero.
  double big_m = 1e3;
  /// Scale the ‖Xβ⁰‖₁ budget by min(n, ‖β⁰‖₀) instead of the literal τ‖Xβ⁰‖∞.
  bool guarded_pred_l1 = false;
};

/// Bounds scaled from a feasible heuristic solution β⁰:
/// coef_upper = τ‖β⁰‖∞, pred_upper = τ‖Xβ⁰‖∞,
/// l1_coef = min(τ‖β⁰‖₀‖β⁰‖∞, τ‖β⁰‖₁), l1_pred = τ‖Xβ⁰‖∞.
BoundSet warm_start_bounds(const Solution& warm, const ProblemData& problem, const WarmBoundOptions& options = {});

/// LP-derived bounds using the warm start only as the ℓ0 certificate α₀ and,
/// when coordinates are unbounded, as the initial M_U.
BoundSet lp_bounds(const ProblemData& problem, const Solution& warm, double tau = 1.5, int workers = 1);

}  // namespace ddsel
