#include "ddsel/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ddsel {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kConstantColumn: return "ConstantColumn";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kMalformedProblem: return "MalformedProblem";
    case ErrorCode::kNumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::kInfeasibleRegion: return "InfeasibleRegion";
    case ErrorCode::kMaxIterations: return "MaxIterations";
    case ErrorCode::kInfeasibleTheta: return "InfeasibleTheta";
    case ErrorCode::kInconsistentBounds: return "InconsistentBounds";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kUnboundedCoordinate: return "UnboundedCoordinate";
    case ErrorCode::kInfeasibleAugmentedPolytope: return "InfeasibleAugmentedPolytope";
    case ErrorCode::kInfeasibleWarmStart: return "InfeasibleWarmStart";
    case ErrorCode::kTieAtThreshold: return "TieAtThreshold";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kGammaUnavailable: return "GammaUnavailable";
    case ErrorCode::kZeroSignal: return "ZeroSignal";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

DesignMatrix::DesignMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (!entries_.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "design matrix has non-finite entries");
  }
  column_norms_ = entries_.colwise().norm().transpose();
}

ProblemData::ProblemData(DesignMatrix design, Vector response, double delta) : delta_(delta) {
  if (response.size() != design.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "response length " + std::to_string(response.size()) +
                                                   " != design rows " + std::to_string(design.rows()));
  }
  if (!response.allFinite()) throw Error(ErrorCode::kInvalidArgument, "response has non-finite entries");
  if (!(delta >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "delta must be nonnegative");
  auto shared = std::make_shared<Shared>();
  shared->gram.noalias() = design.entries().transpose() * design.entries();
  // Symmetrize so downstream code can rely on exact symmetry.
  shared->gram = 0.5 * (shared->gram + shared->gram.transpose()).eval();
  shared->correlations.noalias() = design.entries().transpose() * response;
  shared->design = std::move(design);
  shared->response = std::move(response);
  shared_ = std::move(shared);
}

ProblemData::ProblemData(std::shared_ptr<const Shared> shared, double delta)
    : shared_(std::move(shared)), delta_(delta) {}

ProblemData ProblemData::with_delta(double delta) const {
  if (!(delta >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "delta must be nonnegative");
  return ProblemData(shared_, delta);
}

Solution Solution::from_beta(const ProblemData& problem, Vector beta, double zero_tol) {
  if (beta.size() != problem.p()) throw Error(ErrorCode::kDimensionMismatch, "beta length mismatch");
  for (Index j = 0; j < beta.size(); ++j) {
    if (std::abs(beta[j]) <= zero_tol) beta[j] = 0.0;
  }
  Solution s;
  s.support = support_of(beta, 0.0);
  s.objective = static_cast<int>(s.support.size());
  s.residual_inf = ddsel::residual_inf(problem, beta);
  s.delta = problem.delta();
  s.beta = std::move(beta);
  return s;
}

Support support_of(const Vector& beta, double zero_tol) {
  Support s;
  for (Index j = 0; j < beta.size(); ++j) {
    if (std::abs(beta[j]) > zero_tol) s.push_back(static_cast<int>(j));
  }
  return s;
}

Support complement(const Support& s, Index p) {
  std::vector<char> in(static_cast<size_t>(p), 0);
  for (int j : s) in[static_cast<size_t>(j)] = 1;
  Support out;
  for (Index j = 0; j < p; ++j) {
    if (!in[static_cast<size_t>(j)]) out.push_back(static_cast<int>(j));
  }
  return out;
}

Matrix standardize_columns(const Matrix& x) {
  if (x.rows() < 2) throw Error(ErrorCode::kInvalidArgument, "standardize needs at least two rows");
  Matrix out = x;
  for (Index j = 0; j < out.cols(); ++j) {
    const double mean = out.col(j).mean();
    out.col(j).array() -= mean;
    const double norm = out.col(j).norm();
    const double scale = std::max(x.col(j).cwiseAbs().maxCoeff(), 1.0);
    if (norm <= 1e-12 * scale * std::sqrt(static_cast<double>(x.rows()))) {
      throw Error(ErrorCode::kConstantColumn, "column " + std::to_string(j) + " is constant",
                  static_cast<int>(j));
    }
    out.col(j) /= norm;
  }
  return out;
}

std::pair<DesignMatrix, Vector> standardize(const DesignMatrix& design, const Vector& response) {
  if (response.size() != design.rows()) throw Error(ErrorCode::kDimensionMismatch, "response length mismatch");
  Matrix x = standardize_columns(design.entries());
  Vector y = response.array() - response.mean();
  return {DesignMatrix(std::move(x)), std::move(y)};
}

Vector residual_correlations(const ProblemData& problem, const Vector& beta) {
  if (beta.size() != problem.p()) throw Error(ErrorCode::kDimensionMismatch, "beta length mismatch");
  return problem.correlations() - problem.gram() * beta;
}

double residual_inf(const ProblemData& problem, const Vector& beta) {
  const Vector r = residual_correlations(problem, beta);
  return r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
}

double reference_delta(const ProblemData& problem, const Vector& beta_star) {
  return residual_inf(problem, beta_star);
}

Vector hard_threshold(const Vector& c, double lambda_prime) {
  if (!(lambda_prime > 0.0)) throw Error(ErrorCode::kInvalidArgument, "lambda_prime must be positive");
  const double level = std::sqrt(lambda_prime);
  Vector out = c;
  for (Index j = 0; j < out.size(); ++j) {
    if (!(std::abs(out[j]) > level)) out[j] = 0.0;
  }
  return out;
}

Vector soft_threshold(const Vector& c, const Vector& w) {
  if (c.size() != w.size()) throw Error(ErrorCode::kDimensionMismatch, "weights length mismatch");
  Vector out(c.size());
  for (Index j = 0; j < c.size(); ++j) out[j] = soft_threshold(c[j], w[j]);
  return out;
}

Solution polish(const ProblemData& problem, const Support& support) {
  const Index p = problem.p();
  Vector beta = Vector::Zero(p);
  if (!support.empty()) {
    if (static_cast<Index>(support.size()) > problem.n()) {
      throw Error(ErrorCode::kRankDeficient, "support larger than sample size");
    }
    Matrix xs(problem.n(), static_cast<Index>(support.size()));
    for (size_t k = 0; k < support.size(); ++k) {
      if (support[k] < 0 || support[k] >= p) throw Error(ErrorCode::kInvalidArgument, "support index out of range");
      xs.col(static_cast<Index>(k)) = problem.X().col(support[k]);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(xs);
    const auto diag = qr.matrixR().diagonal().cwiseAbs();
    if (diag.minCoeff() < kCondTol * diag.maxCoeff() || diag.maxCoeff() == 0.0) {
      throw Error(ErrorCode::kRankDeficient, "restricted design is rank deficient");
    }
    const Vector coef = qr.solve(problem.y());
    for (size_t k = 0; k < support.size(); ++k) beta[support[k]] = coef[static_cast<Index>(k)];
  }
  // Exact zeros off the support; fitted values on it are kept as computed.
  Solution s;
  s.support = support_of(beta, 0.0);
  s.objective = static_cast<int>(s.support.size());
  s.residual_inf = ddsel::residual_inf(problem, beta);
  s.delta = problem.delta();
  s.beta = std::move(beta);
  return s;
}

}  // namespace ddsel
