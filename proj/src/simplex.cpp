#include "ddsel/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ddsel {

LinearProgram::LinearProgram(Index num_rows, Index num_vars)
    : objective(Vector::Zero(num_vars)),
      constraint_matrix(Matrix::Zero(num_rows, num_vars)),
      row_lower(Vector::Constant(num_rows, -kInf)),
      row_upper(Vector::Constant(num_rows, kInf)),
      var_lower(Vector::Zero(num_vars)),
      var_upper(Vector::Constant(num_vars, kInf)) {}

void LinearProgram::set_row_sense(Index i, RowSense sense, double rhs) {
  switch (sense) {
    case RowSense::kLessEqual: row_lower[i] = -kInf; row_upper[i] = rhs; break;
    case RowSense::kEqual: row_lower[i] = rhs; row_upper[i] = rhs; break;
    case RowSense::kGreaterEqual: row_lower[i] = rhs; row_upper[i] = kInf; break;
  }
}

RowSense LinearProgram::row_sense(Index i) const {
  if (row_lower[i] == row_upper[i]) return RowSense::kEqual;
  if (std::isinf(row_lower[i])) return RowSense::kLessEqual;
  return RowSense::kGreaterEqual;
}

void LinearProgram::validate() const {
  const Index k = num_rows();
  const Index m = num_vars();
  if (objective.size() != m || row_lower.size() != k || row_upper.size() != k || var_lower.size() != m ||
      var_upper.size() != m) {
    throw Error(ErrorCode::kMalformedProblem, "LP dimension mismatch");
  }
  if (!objective.allFinite() || !constraint_matrix.allFinite()) {
    throw Error(ErrorCode::kMalformedProblem, "LP has non-finite coefficients");
  }
  auto check = [](const Vector& lo, const Vector& hi, const char* what) {
    for (Index i = 0; i < lo.size(); ++i) {
      if (std::isnan(lo[i]) || std::isnan(hi[i]) || lo[i] > hi[i] || lo[i] == kInf || hi[i] == -kInf) {
        throw Error(ErrorCode::kMalformedProblem, std::string("LP has invalid ") + what + " bounds at " +
                                                      std::to_string(i));
      }
    }
  };
  check(row_lower, row_upper, "row");
  check(var_lower, var_upper, "variable");
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "Optimal";
    case LpStatus::kInfeasible: return "Infeasible";
    case LpStatus::kUnbounded: return "Unbounded";
    case LpStatus::kIterationLimit: return "IterationLimit";
  }
  return "Unknown";
}

SimplexSolver::SimplexSolver(LinearProgram lp, SimplexOptions options)
    : lp_(std::move(lp)), options_(options) {
  lp_.validate();
  m_ = lp_.num_rows();
  n_ = lp_.num_vars();
  const Index total = num_total();
  lower_.resize(total);
  upper_.resize(total);
  cost_ = Vector::Zero(total);
  lower_.head(n_) = lp_.var_lower;
  upper_.head(n_) = lp_.var_upper;
  lower_.tail(m_) = lp_.row_lower;
  upper_.tail(m_) = lp_.row_upper;
  const double sign = lp_.sense == ObjectiveSense::kMaximize ? -1.0 : 1.0;
  cost_.head(n_) = sign * lp_.objective;
  if (options_.max_iterations < 0) options_.max_iterations = static_cast<int>(50 * total + 1000);
  if (options_.bland_after < 0) options_.bland_after = static_cast<int>(3 * total);
  x_ = Vector::Zero(total);
  reset_to_slack_basis();
}

void SimplexSolver::set_objective(const Vector& c) {
  if (c.size() != n_) throw Error(ErrorCode::kDimensionMismatch, "objective length mismatch");
  lp_.objective = c;
  const double sign = lp_.sense == ObjectiveSense::kMaximize ? -1.0 : 1.0;
  cost_.head(n_) = sign * c;
}

void SimplexSolver::set_objective_coefficient(Index j, double c) {
  lp_.objective[j] = c;
  cost_[j] = lp_.sense == ObjectiveSense::kMaximize ? -c : c;
}

void SimplexSolver::set_var_bounds(Index j, double lower, double upper) {
  if (!(lower <= upper)) throw Error(ErrorCode::kMalformedProblem, "crossed variable bounds");
  lp_.var_lower[j] = lower;
  lp_.var_upper[j] = upper;
  lower_[j] = lower;
  upper_[j] = upper;
  if (position_[static_cast<size_t>(j)] < 0) snap_nonbasic(j);
}

void SimplexSolver::set_row_bounds(Index i, double lower, double upper) {
  if (!(lower <= upper)) throw Error(ErrorCode::kMalformedProblem, "crossed row bounds");
  lp_.row_lower[i] = lower;
  lp_.row_upper[i] = upper;
  lower_[n_ + i] = lower;
  upper_[n_ + i] = upper;
  if (position_[static_cast<size_t>(n_ + i)] < 0) snap_nonbasic(n_ + i);
}

// Puts a nonbasic variable on a finite bound consistent with its status.
void SimplexSolver::snap_nonbasic(Index j) {
  const double lo = lower_[j];
  const double hi = upper_[j];
  auto& st = status_[static_cast<size_t>(j)];
  if (st == VarStatus::kAtUpper && std::isfinite(hi)) {
    x_[j] = hi;
  } else if (std::isfinite(lo)) {
    st = VarStatus::kAtLower;
    x_[j] = lo;
  } else if (std::isfinite(hi)) {
    st = VarStatus::kAtUpper;
    x_[j] = hi;
  } else {
    st = VarStatus::kFreeZero;
    x_[j] = 0.0;
  }
}

void SimplexSolver::reset_to_slack_basis() {
  const Index total = num_total();
  status_.assign(static_cast<size_t>(total), VarStatus::kAtLower);
  position_.assign(static_cast<size_t>(total), -1);
  basic_.resize(static_cast<size_t>(m_));
  for (Index j = 0; j < n_; ++j) snap_nonbasic(j);
  for (Index i = 0; i < m_; ++i) {
    basic_[static_cast<size_t>(i)] = n_ + i;
    position_[static_cast<size_t>(n_ + i)] = i;
    status_[static_cast<size_t>(n_ + i)] = VarStatus::kBasic;
  }
  factor_valid_ = false;
}

void SimplexSolver::set_basis(const Basis& basis) {
  const Index total = num_total();
  if (static_cast<Index>(basis.status.size()) != total) {
    reset_to_slack_basis();
    return;
  }
  const auto count = std::count(basis.status.begin(), basis.status.end(), VarStatus::kBasic);
  if (count != m_) {
    reset_to_slack_basis();
    return;
  }
  status_ = basis.status;
  position_.assign(static_cast<size_t>(total), -1);
  Index pos = 0;
  for (Index j = 0; j < total; ++j) {
    if (status_[static_cast<size_t>(j)] == VarStatus::kBasic) {
      basic_[static_cast<size_t>(pos)] = j;
      position_[static_cast<size_t>(j)] = pos;
      ++pos;
    } else {
      snap_nonbasic(j);
    }
  }
  if (!factorize()) reset_to_slack_basis();
}

Basis SimplexSolver::basis() const { return Basis{status_}; }

void SimplexSolver::column(Index j, Vector& out) const {
  if (j < n_) {
    out = lp_.constraint_matrix.col(j);
  } else {
    out.setZero(m_);
    out[j - n_] = -1.0;
  }
}

bool SimplexSolver::factorize() {
  etas_.clear();
  factor_valid_ = false;
  if (m_ == 0) {
    factor_valid_ = true;
    return true;
  }
  Matrix b(m_, m_);
  Vector col;
  for (Index i = 0; i < m_; ++i) {
    column(basic_[static_cast<size_t>(i)], col);
    b.col(i) = col;
  }
  lu_.compute(b);
  const auto diag = lu_.matrixLU().diagonal().cwiseAbs();
  const double biggest = std::max(diag.maxCoeff(), 1.0);
  if (!(diag.minCoeff() > 1e-11 * biggest)) return false;
  factor_valid_ = true;
  return true;
}

void SimplexSolver::ftran(Vector& v) const {
  if (m_ == 0) return;
  v = lu_.solve(v);
  for (const Eta& e : etas_) {
    const double t = v[e.row] / e.column[e.row];
    if (t != 0.0) {
      v.noalias() -= t * e.column;
    }
    v[e.row] = t;
  }
}

void SimplexSolver::btran(Vector& v) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    const double pivot = it->column[it->row];
    const double dot = it->column.dot(v) - pivot * v[it->row];
    v[it->row] = (v[it->row] - dot) / pivot;
  }
  // P·B = L·U, so Bᵀ = Uᵀ·Lᵀ·P.
  const Matrix& lu = lu_.matrixLU();
  lu.triangularView<Eigen::Upper>().transpose().solveInPlace(v);
  lu.triangularView<Eigen::UnitLower>().transpose().solveInPlace(v);
  v = lu_.permutationP().transpose() * v;
}

void SimplexSolver::compute_basic_values() {
  if (m_ == 0) return;
  // B x_B = −Σ_nonbasic col_j x_j, where logical columns are −e_i.
  Vector rhs = Vector::Zero(m_);
  for (Index j = 0; j < n_; ++j) {
    if (position_[static_cast<size_t>(j)] < 0 && x_[j] != 0.0) rhs.noalias() -= x_[j] * lp_.constraint_matrix.col(j);
  }
  for (Index i = 0; i < m_; ++i) {
    const Index j = n_ + i;
    if (position_[static_cast<size_t>(j)] < 0) rhs[i] += x_[j];
  }
  ftran(rhs);
  for (Index i = 0; i < m_; ++i) x_[basic_[static_cast<size_t>(i)]] = rhs[i];
}

double SimplexSolver::max_infeasibility() const {
  double worst = 0.0;
  for (Index i = 0; i < m_; ++i) {
    const Index j = basic_[static_cast<size_t>(i)];
    worst = std::max({worst, lower_[j] - x_[j], x_[j] - upper_[j]});
  }
  return worst;
}

// Reduced costs of all variables for the phase-two costs; basic entries are zero.
void SimplexSolver::reduced_costs(Vector& d) const {
  Vector y(m_);
  for (Index i = 0; i < m_; ++i) y[i] = cost_[basic_[static_cast<size_t>(i)]];
  btran(y);
  d.resize(num_total());
  d.head(n_) = cost_.head(n_);
  d.head(n_).noalias() -= lp_.constraint_matrix.transpose() * y;
  d.tail(m_) = y;
  for (Index i = 0; i < m_; ++i) d[basic_[static_cast<size_t>(i)]] = 0.0;
}

// Bounded dual simplex from a dual feasible basis, used after bound changes
// leave the previous optimum primal infeasible. Boxed nonbasics are first
// moved to the bound their reduced cost prefers.
SimplexSolver::DualOutcome SimplexSolver::dual_phase(int& iterations) {
  const double ptol = options_.primal_tol;
  const double dtol = options_.dual_tol;
  const Index total = num_total();
  Vector d;
  reduced_costs(d);
  bool flipped = false;
  for (Index j = 0; j < total; ++j) {
    if (position_[static_cast<size_t>(j)] >= 0 || lower_[j] == upper_[j]) continue;
    auto& st = status_[static_cast<size_t>(j)];
    const bool boxed = std::isfinite(lower_[j]) && std::isfinite(upper_[j]);
    if (st == VarStatus::kAtLower && d[j] < -dtol) {
      if (!boxed) return DualOutcome::kGiveUp;
      st = VarStatus::kAtUpper;
      x_[j] = upper_[j];
      flipped = true;
    } else if (st == VarStatus::kAtUpper && d[j] > dtol) {
      if (!boxed) return DualOutcome::kGiveUp;
      st = VarStatus::kAtLower;
      x_[j] = lower_[j];
      flipped = true;
    } else if (st == VarStatus::kFreeZero && std::abs(d[j]) > dtol) {
      return DualOutcome::kGiveUp;
    }
  }
  if (flipped) compute_basic_values();

  const int limit = static_cast<int>(std::min<Index>(options_.max_iterations, 3 * total + 100));
  Vector rho(m_), row(total), alpha(m_), col(m_);
  int since_refactor = static_cast<int>(etas_.size());
  for (int local = 0; local < limit; ++local) {
    // Leaving row: largest bound violation.
    Index r = -1;
    double worst = 0.0;
    for (Index i = 0; i < m_; ++i) {
      const Index j = basic_[static_cast<size_t>(i)];
      const double tol = ptol * std::max(1.0, std::abs(x_[j]));
      const double v = std::max(lower_[j] - x_[j], x_[j] - upper_[j]);
      if (v > tol && v > worst) {
        worst = v;
        r = i;
      }
    }
    if (r < 0) return DualOutcome::kPrimalFeasible;
    const Index leaving = basic_[static_cast<size_t>(r)];
    const bool to_upper = x_[leaving] > upper_[leaving];
    const double s = to_upper ? 1.0 : -1.0;

    rho.setZero();
    rho[r] = 1.0;
    btran(rho);
    row.head(n_).noalias() = lp_.constraint_matrix.transpose() * rho;
    row.tail(m_) = -rho;

    // Harris ratio test on the reduced costs.
    auto eligible = [&](Index j) {
      if (position_[static_cast<size_t>(j)] >= 0 || lower_[j] == upper_[j]) return false;
      const double a = row[j];
      if (std::abs(a) <= options_.pivot_tol) return false;
      switch (status_[static_cast<size_t>(j)]) {
        case VarStatus::kAtLower: return s * a > 0.0;
        case VarStatus::kAtUpper: return s * a < 0.0;
        case VarStatus::kFreeZero: return true;
        default: return false;
      }
    };
    double bound = kInf;
    for (Index j = 0; j < total; ++j) {
      if (eligible(j)) bound = std::min(bound, (std::abs(d[j]) + dtol) / std::abs(row[j]));
    }
    if (!std::isfinite(bound)) {
      // No entering candidate: the row proves infeasibility, unless stale
      // factors produced it.
      if (etas_.empty()) {
        // Entries below the pivot tolerance can still move the row over a
        // wide box; leave those cases to the primal method.
        double reach = 0.0;
        for (Index j = 0; j < total; ++j) {
          if (position_[static_cast<size_t>(j)] >= 0 || lower_[j] == upper_[j] || row[j] == 0.0) continue;
          reach += std::abs(row[j]) * (upper_[j] - lower_[j]);
        }
        return reach < worst ? DualOutcome::kInfeasible : DualOutcome::kGiveUp;
      }
      if (!factorize()) throw Error(ErrorCode::kNumericalBreakdown, "basis became singular");
      since_refactor = 0;
      compute_basic_values();
      reduced_costs(d);
      continue;
    }
    Index q = -1;
    double best_pivot = 0.0;
    for (Index j = 0; j < total; ++j) {
      if (!eligible(j)) continue;
      if (std::abs(d[j]) / std::abs(row[j]) > bound) continue;
      if (std::abs(row[j]) > best_pivot) {
        best_pivot = std::abs(row[j]);
        q = j;
      }
    }
    const double theta = d[q] / row[q];

    column(q, col);
    alpha = col;
    ftran(alpha);
    if (std::abs(alpha[r]) <= options_.pivot_tol) return DualOutcome::kGiveUp;
    const double target = to_upper ? upper_[leaving] : lower_[leaving];
    const double step = (x_[leaving] - target) / alpha[r];
    x_[q] += step;
    for (Index i = 0; i < m_; ++i) x_[basic_[static_cast<size_t>(i)]] -= step * alpha[i];

    for (Index j = 0; j < total; ++j) {
      if (position_[static_cast<size_t>(j)] < 0) d[j] -= theta * row[j];
    }
    d[q] = 0.0;
    d[leaving] = -theta;

    status_[static_cast<size_t>(leaving)] = to_upper ? VarStatus::kAtUpper : VarStatus::kAtLower;
    position_[static_cast<size_t>(leaving)] = -1;
    x_[leaving] = target;
    basic_[static_cast<size_t>(r)] = q;
    position_[static_cast<size_t>(q)] = r;
    status_[static_cast<size_t>(q)] = VarStatus::kBasic;
    ++iterations;

    etas_.push_back(Eta{r, alpha});
    if (++since_refactor >= options_.refactor_interval) {
      if (!factorize()) throw Error(ErrorCode::kNumericalBreakdown, "basis became singular");
      since_refactor = 0;
      compute_basic_values();
      reduced_costs(d);
    }
  }
  return DualOutcome::kGiveUp;
}

LpSolution SimplexSolver::solve() {
  const double ptol = options_.primal_tol;
  const double dtol = options_.dual_tol;
  const Index total = num_total();

  // Nonbasic values may be stale after bound edits.
  for (Index j = 0; j < total; ++j) {
    if (position_[static_cast<size_t>(j)] < 0) snap_nonbasic(j);
  }
  if (!factor_valid_ && !factorize()) {
    reset_to_slack_basis();
    factorize();
  }
  compute_basic_values();

  int iterations = 0;
  if (max_infeasibility() > ptol) {
    const DualOutcome outcome = dual_phase(iterations);
    if (outcome == DualOutcome::kInfeasible) return extract(LpStatus::kInfeasible, iterations, nullptr);
  }

  Vector cb(m_), y(m_), alpha(m_), col(m_), d(n_);
  int degenerate_run = 0;
  bool bland = false;
  int since_refactor = static_cast<int>(etas_.size());

  while (true) {
    if (iterations >= options_.max_iterations) return extract(LpStatus::kIterationLimit, iterations, nullptr);

    // Phase I costs whenever a basic variable is out of bounds.
    bool phase_one = false;
    for (Index i = 0; i < m_; ++i) {
      const Index j = basic_[static_cast<size_t>(i)];
      const double scale = ptol * std::max(1.0, std::abs(x_[j]));
      if (x_[j] < lower_[j] - scale) {
        cb[i] = -1.0;
        phase_one = true;
      } else if (x_[j] > upper_[j] + scale) {
        cb[i] = 1.0;
        phase_one = true;
      } else {
        cb[i] = 0.0;
      }
    }
    if (!phase_one) {
      for (Index i = 0; i < m_; ++i) cb[i] = cost_[basic_[static_cast<size_t>(i)]];
    }
    y = cb;
    btran(y);

    // Pricing. Structural reduced cost c_j − yᵀa_j, logical reduced cost y_i.
    if (phase_one) {
      d.noalias() = -lp_.constraint_matrix.transpose() * y;
    } else {
      d = cost_.head(n_);
      d.noalias() -= lp_.constraint_matrix.transpose() * y;
    }
    Index entering = -1;
    double entering_dir = 0.0;
    double best = 0.0;
    for (Index j = 0; j < total; ++j) {
      const auto st = status_[static_cast<size_t>(j)];
      if (st == VarStatus::kBasic) continue;
      if (lower_[j] == upper_[j]) continue;
      const double dj = j < n_ ? d[j] : y[j - n_];
      double dir = 0.0;
      if (st == VarStatus::kAtLower && dj < -dtol) dir = 1.0;
      else if (st == VarStatus::kAtUpper && dj > dtol) dir = -1.0;
      else if (st == VarStatus::kFreeZero && std::abs(dj) > dtol) dir = dj < 0.0 ? 1.0 : -1.0;
      if (dir == 0.0) continue;
      if (bland) {
        entering = j;
        entering_dir = dir;
        break;
      }
      if (std::abs(dj) > best) {
        best = std::abs(dj);
        entering = j;
        entering_dir = dir;
      }
    }

    if (entering < 0) {
      // Confirm with fresh values before declaring a verdict.
      if (!etas_.empty()) {
        if (!factorize()) throw Error(ErrorCode::kNumericalBreakdown, "basis became singular");
        since_refactor = 0;
        compute_basic_values();
        const double infeas = max_infeasibility();
        const bool still = infeas > ptol * std::max(1.0, x_.cwiseAbs().maxCoeff());
        if (still != phase_one) continue;
      }
      if (phase_one) return extract(LpStatus::kInfeasible, iterations, nullptr);
      return extract(LpStatus::kOptimal, iterations, nullptr);
    }

    column(entering, col);
    alpha = col;
    ftran(alpha);

    // Ratio test. Basic i moves at rate −dir·α_i per unit step of the entering variable.
    double bound_flip = kInf;
    if (std::isfinite(lower_[entering]) && std::isfinite(upper_[entering])) {
      bound_flip = upper_[entering] - lower_[entering];
    }
    const double ptol_abs = ptol;
    // Harris pass 1: largest step with bounds relaxed by the tolerance.
    double relaxed_max = kInf;
    auto limit_for = [&](Index i, double rate, bool relaxed, double& step) -> bool {
      const Index j = basic_[static_cast<size_t>(i)];
      const double xj = x_[j];
      const double tol = relaxed ? ptol_abs : 0.0;
      const double slack_tol = ptol * std::max(1.0, std::abs(xj));
      if (rate < 0.0) {
        double target;
        if (xj > upper_[j] + slack_tol) target = upper_[j];
        else if (xj >= lower_[j] - slack_tol) target = lower_[j];
        else return false;
        if (!std::isfinite(target)) return false;
        step = (xj - (target - tol)) / (-rate);
      } else {
        double target;
        if (xj < lower_[j] - slack_tol) target = lower_[j];
        else if (xj <= upper_[j] + slack_tol) target = upper_[j];
        else return false;
        if (!std::isfinite(target)) return false;
        step = ((target + tol) - xj) / rate;
      }
      step = std::max(step, 0.0);
      return true;
    };
    for (Index i = 0; i < m_; ++i) {
      if (std::abs(alpha[i]) <= options_.pivot_tol) continue;
      double step;
      if (limit_for(i, -entering_dir * alpha[i], true, step)) relaxed_max = std::min(relaxed_max, step);
    }
    Index leave_pos = -1;
    double step_len = kInf;
    double best_pivot = 0.0;
    for (Index i = 0; i < m_; ++i) {
      if (std::abs(alpha[i]) <= options_.pivot_tol) continue;
      double step;
      if (!limit_for(i, -entering_dir * alpha[i], false, step)) continue;
      if (step > relaxed_max) continue;
      bool take;
      if (bland) {
        take = leave_pos < 0 || step < step_len - 1e-12 ||
               (step <= step_len + 1e-12 && basic_[static_cast<size_t>(i)] < basic_[static_cast<size_t>(leave_pos)]);
      } else {
        take = std::abs(alpha[i]) > best_pivot;
      }
      if (take) {
        leave_pos = i;
        step_len = step;
        best_pivot = std::abs(alpha[i]);
      }
    }

    if (leave_pos < 0 && !std::isfinite(bound_flip)) {
      if (phase_one) throw Error(ErrorCode::kNumericalBreakdown, "unbounded Phase I direction");
      Vector ray = Vector::Zero(n_);
      if (entering < n_) ray[entering] = entering_dir;
      for (Index i = 0; i < m_; ++i) {
        const Index j = basic_[static_cast<size_t>(i)];
        if (j < n_) ray[j] = -entering_dir * alpha[i];
      }
      return extract(LpStatus::kUnbounded, iterations, &ray);
    }

    ++iterations;
    const bool flip = bound_flip <= step_len;
    const double t = flip ? bound_flip : step_len;
    if (t <= 1e-12) {
      if (++degenerate_run > options_.bland_after) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }

    // Move along the edge.
    if (t != 0.0) {
      x_[entering] += entering_dir * t;
      for (Index i = 0; i < m_; ++i) x_[basic_[static_cast<size_t>(i)]] -= entering_dir * t * alpha[i];
    }

    if (flip) {
      auto& st = status_[static_cast<size_t>(entering)];
      st = entering_dir > 0.0 ? VarStatus::kAtUpper : VarStatus::kAtLower;
      x_[entering] = entering_dir > 0.0 ? upper_[entering] : lower_[entering];
      continue;
    }

    // Basis change.
    const Index leaving = basic_[static_cast<size_t>(leave_pos)];
    const double rate = -entering_dir * alpha[leave_pos];
    const double xl = x_[leaving];
    VarStatus leave_status;
    if (rate < 0.0) {
      leave_status = (std::isfinite(lower_[leaving]) && std::abs(xl - lower_[leaving]) <= std::abs(xl - upper_[leaving]))
                         ? VarStatus::kAtLower
                         : VarStatus::kAtUpper;
    } else {
      leave_status = (std::isfinite(upper_[leaving]) && std::abs(xl - upper_[leaving]) <= std::abs(xl - lower_[leaving]))
                         ? VarStatus::kAtUpper
                         : VarStatus::kAtLower;
    }
    status_[static_cast<size_t>(leaving)] = leave_status;
    position_[static_cast<size_t>(leaving)] = -1;
    snap_nonbasic(leaving);
    basic_[static_cast<size_t>(leave_pos)] = entering;
    position_[static_cast<size_t>(entering)] = leave_pos;
    status_[static_cast<size_t>(entering)] = VarStatus::kBasic;

    etas_.push_back(Eta{leave_pos, alpha});
    if (++since_refactor >= options_.refactor_interval) {
      if (!factorize()) throw Error(ErrorCode::kNumericalBreakdown, "basis became singular");
      since_refactor = 0;
      compute_basic_values();
    }
  }
}

LpSolution SimplexSolver::extract(LpStatus status, int iterations, const Vector* ray) const {
  LpSolution sol;
  sol.status = status;
  sol.iterations = iterations;
  sol.basis = basis();
  sol.x = x_.head(n_);
  sol.row_activity = lp_.constraint_matrix * sol.x;
  sol.objective_value = lp_.objective.dot(sol.x);
  if (ray != nullptr) sol.ray = *ray;
  if (status == LpStatus::kOptimal) {
    Vector cb(m_);
    for (Index i = 0; i < m_; ++i) cb[i] = cost_[basic_[static_cast<size_t>(i)]];
    btran(cb);
    const double sign = lp_.sense == ObjectiveSense::kMaximize ? -1.0 : 1.0;
    sol.duals = sign * cb;
    sol.reduced_costs = lp_.objective - lp_.constraint_matrix.transpose() * sol.duals;
  }
  return sol;
}

LpSolution solve_lp(const LinearProgram& lp, const Basis* warm_basis, const SimplexOptions& options) {
  SimplexSolver solver(lp, options);
  if (warm_basis != nullptr && !warm_basis->empty()) solver.set_basis(*warm_basis);
  return solver.solve();
}

bool phase1_feasible(const Matrix& a, const Vector& b, double delta, const Support& fixed_zero) {
  if (a.rows() != b.size()) throw Error(ErrorCode::kDimensionMismatch, "row count mismatch");
  const Support free = complement(fixed_zero, a.cols());
  LinearProgram lp(a.rows(), static_cast<Index>(free.size()));
  for (size_t k = 0; k < free.size(); ++k) lp.constraint_matrix.col(static_cast<Index>(k)) = a.col(free[k]);
  lp.var_lower.setConstant(-kInf);
  lp.row_lower = b.array() - delta;
  lp.row_upper = b.array() + delta;
  return solve_lp(lp).status == LpStatus::kOptimal;
}

std::string dump(const LinearProgram& lp) {
  std::ostringstream out;
  out << (lp.sense == ObjectiveSense::kMinimize ? "minimize" : "maximize") << "\n  ";
  for (Index j = 0; j < lp.num_vars(); ++j) out << (j ? " + " : "") << lp.objective[j] << " x" << j;
  out << "\nsubject to\n";
  for (Index i = 0; i < lp.num_rows(); ++i) {
    out << "  " << lp.row_lower[i] << " <= ";
    for (Index j = 0; j < lp.num_vars(); ++j) {
      if (lp.constraint_matrix(i, j) != 0.0) out << lp.constraint_matrix(i, j) << " x" << j << " ";
    }
    out << "<= " << lp.row_upper[i] << "\n";
  }
  out << "bounds\n";
  for (Index j = 0; j < lp.num_vars(); ++j) {
    out << "  " << lp.var_lower[j] << " <= x" << j << " <= " << lp.var_upper[j] << "\n";
  }
  return out.str();
}

}  // namespace ddsel
