#pragma once

#include <Eigen/Dense>

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ddsel {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Sorted, 0-based coordinate indices.
using Support = std::vector<int>;

/// Coefficients with magnitude at or below this are treated as zero.
inline constexpr double kZeroTol = 1e-7;
/// Absolute slack on the correlation constraint when classifying feasibility.
inline constexpr double kFeasTol = 1e-7;
/// Relative threshold on the triangular factor diagonal below which a
/// least-squares system is declared rank deficient.
inline constexpr double kCondTol = 1e-10;

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kConstantColumn,
  kRankDeficient,
  kMalformedProblem,
  kNumericalBreakdown,
  kInfeasibleRegion,
  kMaxIterations,
  kInfeasibleTheta,
  kInconsistentBounds,
  kInfeasible,
  kUnboundedCoordinate,
  kInfeasibleAugmentedPolytope,
  kInfeasibleWarmStart,
  kTieAtThreshold,
  kTooLarge,
  kGammaUnavailable,
  kZeroSignal,
  kIo,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, int index = -1)
      : std::runtime_error(what), code_(code), index_(index) {}

  ErrorCode code() const { return code_; }
  // Offending coordinate for per-index errors (ConstantColumn, UnboundedCoordinate), else -1.
  int index() const { return index_; }

 private:
  ErrorCode code_;
  int index_;
};

class DesignMatrix {
 public:
  DesignMatrix() = default;
  explicit DesignMatrix(Matrix entries);

  const Matrix& entries() const { return entries_; }
  const Vector& column_norms() const { return column_norms_; }
  Index rows() const { return entries_.rows(); }
  Index cols() const { return entries_.cols(); }

 private:
  Matrix entries_;
  Vector column_norms_;
};

/// Regression data plus the Gram products every solver works from.
///
/// Copies are cheap: the design, response and Gram products are shared
/// immutably, only the tuning parameter is stored per instance.
class ProblemData {
 public:
  /// Empty 0×0 problem.
  ProblemData() : ProblemData(Matrix(0, 0), Vector(0)) {}
  ProblemData(DesignMatrix design, Vector response, double delta = 0.0);
  ProblemData(Matrix design, Vector response, double delta = 0.0)
      : ProblemData(DesignMatrix(std::move(design)), std::move(response), delta) {}

  const DesignMatrix& design() const { return shared_->design; }
  const Matrix& X() const { return shared_->design.entries(); }
  const Vector& y() const { return shared_->response; }
  /// Q = XᵀX.
  const Matrix& gram() const { return shared_->gram; }
  /// d = Xᵀy.
  const Vector& correlations() const { return shared_->correlations; }
  double delta() const { return delta_; }

  Index n() const { return shared_->design.rows(); }
  Index p() const { return shared_->design.cols(); }

  ProblemData with_delta(double delta) const;

 private:
  struct Shared {
    DesignMatrix design;
    Vector response;
    Matrix gram;
    Vector correlations;
  };
  ProblemData(std::shared_ptr<const Shared> shared, double delta);

  std::shared_ptr<const Shared> shared_;
  double delta_ = 0.0;
};

struct Solution {
  Vector beta;
  Support support;
  int objective = 0;
  double residual_inf = 0.0;
  double delta = 0.0;

  bool feasible(double feas_tol = kFeasTol) const { return residual_inf <= delta + feas_tol; }

  /// Builds a solution from raw coefficients. Entries at or below zero_tol are
  /// set to exactly zero before the residual is measured.
  static Solution from_beta(const ProblemData& problem, Vector beta, double zero_tol = kZeroTol);
};

Support support_of(const Vector& beta, double zero_tol = kZeroTol);
Support complement(const Support& s, Index p);

/// Centers every column and scales it to unit ℓ2 norm; centers the response.
std::pair<DesignMatrix, Vector> standardize(const DesignMatrix& design, const Vector& response);
Matrix standardize_columns(const Matrix& x);

/// d − Qβ, the feature-residual correlations.
Vector residual_correlations(const ProblemData& problem, const Vector& beta);
/// ‖Xᵀ(y − Xβ)‖∞ evaluated through the Gram products.
double residual_inf(const ProblemData& problem, const Vector& beta);
double reference_delta(const ProblemData& problem, const Vector& beta_star);

/// argmin ‖β − c‖² + λ′‖β‖₀, keeping c_j iff |c_j| > √λ′.
Vector hard_threshold(const Vector& c, double lambda_prime);

inline double soft_threshold(double c, double w) {
  if (c > w) return c - w;
  if (c < -w) return c + w;
  return 0.0;
}
/// argmin ½‖α − c‖² + Σ w_i|α_i|.
Vector soft_threshold(const Vector& c, const Vector& w);

/// Least-squares refit on `support`, zero elsewhere.
Solution polish(const ProblemData& problem, const Support& support);

}  // namespace ddsel
