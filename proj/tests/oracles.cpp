#include "oracles.hpp"

#include <cmath>

namespace ddsel::testing {

Matrix gaussian_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = g(rng);
  return m;
}

Vector gaussian_vector(std::mt19937_64& rng, Index size) { return gaussian_matrix(rng, size, 1).col(0); }

Matrix orthonormal_design(std::mt19937_64& rng, Index n, Index p) {
  const Matrix g = gaussian_matrix(rng, n, p);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(n, p);
}

void for_each_subset(int p, int k, const std::function<bool(const Support&)>& visit) {
  if (k > p || k < 0) return;
  Support s(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) s[static_cast<size_t>(i)] = i;
  while (true) {
    if (!visit(s)) return;
    int i = k - 1;
    while (i >= 0 && s[static_cast<size_t>(i)] == p - k + i) --i;
    if (i < 0) return;
    ++s[static_cast<size_t>(i)];
    for (int j = i + 1; j < k; ++j) s[static_cast<size_t>(j)] = s[static_cast<size_t>(j - 1)] + 1;
  }
}

namespace {

struct Plane {
  Vector normal;
  double offset;
};

// Visits every point where `dim` linearly independent planes meet.
void for_each_vertex(const std::vector<Plane>& planes, Index dim, const std::function<void(const Vector&)>& visit) {
  const int count = static_cast<int>(planes.size());
  if (dim == 0) {
    visit(Vector());
    return;
  }
  for_each_subset(count, static_cast<int>(dim), [&](const Support& s) {
    Matrix m(dim, dim);
    Vector r(dim);
    for (Index i = 0; i < dim; ++i) {
      m.row(i) = planes[static_cast<size_t>(s[static_cast<size_t>(i)])].normal.transpose();
      r[i] = planes[static_cast<size_t>(s[static_cast<size_t>(i)])].offset;
    }
    Eigen::FullPivLU<Matrix> lu(m);
    if (lu.rank() < dim) return true;
    visit(lu.solve(r));
    return true;
  });
}

}  // namespace

bool lp_by_vertices(const LinearProgram& lp, double& best, Vector* argbest) {
  const Index m = lp.num_vars();
  std::vector<Plane> planes;
  for (Index i = 0; i < lp.num_rows(); ++i) {
    const Vector a = lp.constraint_matrix.row(i).transpose();
    if (std::isfinite(lp.row_lower[i])) planes.push_back({a, lp.row_lower[i]});
    if (std::isfinite(lp.row_upper[i]) && lp.row_upper[i] != lp.row_lower[i]) planes.push_back({a, lp.row_upper[i]});
  }
  for (Index j = 0; j < m; ++j) {
    const Vector e = Vector::Unit(m, j);
    if (std::isfinite(lp.var_lower[j])) planes.push_back({e, lp.var_lower[j]});
    if (std::isfinite(lp.var_upper[j]) && lp.var_upper[j] != lp.var_lower[j]) planes.push_back({e, lp.var_upper[j]});
  }
  const double sign = lp.sense == ObjectiveSense::kMaximize ? -1.0 : 1.0;
  bool found = false;
  best = 0.0;
  for_each_vertex(planes, m, [&](const Vector& x) {
    const double tol = 1e-9 * (1.0 + x.cwiseAbs().maxCoeff());
    const Vector ax = lp.constraint_matrix * x;
    for (Index i = 0; i < lp.num_rows(); ++i) {
      if (ax[i] < lp.row_lower[i] - tol || ax[i] > lp.row_upper[i] + tol) return;
    }
    for (Index j = 0; j < m; ++j) {
      if (x[j] < lp.var_lower[j] - tol || x[j] > lp.var_upper[j] + tol) return;
    }
    const double v = lp.objective.dot(x);
    if (!found || sign * v < sign * best) {
      best = v;
      if (argbest != nullptr) *argbest = x;
      found = true;
    }
  });
  return found;
}

std::vector<Vector> dantzig_vertices(const Matrix& q, const Vector& d, double delta) {
  std::vector<Plane> planes;
  for (Index i = 0; i < q.rows(); ++i) {
    planes.push_back({q.row(i).transpose(), d[i] - delta});
    planes.push_back({q.row(i).transpose(), d[i] + delta});
  }
  std::vector<Vector> out;
  for_each_vertex(planes, q.cols(), [&](const Vector& x) {
    const double tol = 1e-9 * (1.0 + x.cwiseAbs().maxCoeff());
    if ((q * x - d).cwiseAbs().maxCoeff() <= delta + tol) out.push_back(x);
  });
  return out;
}

CompositeProblem random_composite(std::mt19937_64& rng, Index p, Index k, bool weighted, double tau) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CompositeProblem prob;
  prob.a = gaussian_matrix(rng, k, p);
  const Vector inside = gaussian_vector(rng, p);
  prob.delta = 0.1 + u(rng);
  prob.b = prob.a * inside + 0.5 * prob.delta * (2.0 * Vector::NullaryExpr(k, [&]() { return u(rng); }).array() - 1.0).matrix();
  prob.cbar = 3.0 * gaussian_vector(rng, p);
  prob.weights = weighted ? Vector(Vector::NullaryExpr(p, [&]() { return u(rng); })) : Vector(Vector::Zero(p));
  prob.tau = tau;
  return prob;
}

bool weighted_l1_by_vertices(const Matrix& a, const Vector& b, double delta, const Vector& w, double& best,
                             Vector* argbest) {
  const Index p = a.cols();
  std::vector<Plane> planes;
  for (Index i = 0; i < a.rows(); ++i) {
    const Vector r = a.row(i).transpose();
    planes.push_back({r, b[i] - delta});
    if (delta > 0.0) planes.push_back({r, b[i] + delta});
  }
  for (Index j = 0; j < p; ++j) planes.push_back({Vector::Unit(p, j), 0.0});
  bool found = false;
  best = 0.0;
  for_each_vertex(planes, p, [&](const Vector& x) {
    const double tol = 1e-9 * (1.0 + x.cwiseAbs().maxCoeff());
    if (((a * x - b).cwiseAbs().array() > delta + tol).any()) return;
    const double v = w.dot(x.cwiseAbs());
    if (!found || v < best) {
      best = v;
      if (argbest != nullptr) *argbest = x;
      found = true;
    }
  });
  return found;
}

bool composite_by_active_sets(const CompositeProblem& prob, double& best, Vector* argbest) {
  const Index p = prob.cbar.size();
  const Index k = prob.a.rows();
  long coord_patterns = 1;
  for (Index j = 0; j < p; ++j) coord_patterns *= 3;
  long row_patterns = 1;
  for (Index i = 0; i < k; ++i) row_patterns *= 3;
  bool found = false;
  best = 0.0;
  std::vector<int> cs(static_cast<size_t>(p)), rs(static_cast<size_t>(k));
  for (long cp = 0; cp < coord_patterns; ++cp) {
    long t = cp;
    std::vector<Index> free;
    for (Index j = 0; j < p; ++j) {
      cs[static_cast<size_t>(j)] = static_cast<int>(t % 3) - 1;  // -1 negative, 0 zero, 1 positive
      t /= 3;
      if (cs[static_cast<size_t>(j)] != 0) free.push_back(j);
    }
    const Index f = static_cast<Index>(free.size());
    for (long rp = 0; rp < row_patterns; ++rp) {
      long u = rp;
      std::vector<Index> act;
      for (Index i = 0; i < k; ++i) {
        rs[static_cast<size_t>(i)] = static_cast<int>(u % 3) - 1;  // -1 lower active, 0 inactive, 1 upper active
        u /= 3;
        if (rs[static_cast<size_t>(i)] != 0) act.push_back(i);
      }
      const Index r = static_cast<Index>(act.size());
      if (r > f) continue;
      // KKT: (1+τ)α_F + A_RFᵀλ = c̄_F − s∘w_F ; A_RF α_F = b_R + s_R δ.
      Matrix kkt = Matrix::Zero(f + r, f + r);
      Vector rhs(f + r);
      for (Index a = 0; a < f; ++a) {
        const Index j = free[static_cast<size_t>(a)];
        kkt(a, a) = 1.0 + prob.tau;
        rhs[a] = prob.cbar[j] - cs[static_cast<size_t>(j)] * prob.weights[j];
        for (Index c = 0; c < r; ++c) {
          const double v = prob.a(act[static_cast<size_t>(c)], j);
          kkt(a, f + c) = v;
          kkt(f + c, a) = v;
        }
      }
      for (Index c = 0; c < r; ++c) {
        const Index i = act[static_cast<size_t>(c)];
        rhs[f + c] = prob.b[i] + rs[static_cast<size_t>(i)] * prob.delta;
      }
      Eigen::FullPivLU<Matrix> lu(kkt);
      if (lu.rank() < f + r) continue;
      const Vector sol = lu.solve(rhs);
      Vector alpha = Vector::Zero(p);
      bool ok = true;
      for (Index a = 0; a < f; ++a) {
        const Index j = free[static_cast<size_t>(a)];
        alpha[j] = sol[a];
        if (cs[static_cast<size_t>(j)] * alpha[j] < -1e-12) ok = false;
      }
      if (!ok) continue;
      const double tol = 1e-10 * (1.0 + alpha.cwiseAbs().maxCoeff());
      if (((prob.a * alpha - prob.b).cwiseAbs().array() > prob.delta + tol).any()) continue;
      const double v = prob.objective(alpha);
      if (!found || v < best) {
        best = v;
        if (argbest != nullptr) *argbest = alpha;
        found = true;
      }
    }
  }
  return found;
}

double golden_section(const std::function<double(double)>& f, double a, double b, double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

Vector normal_equations(const Matrix& x, const Vector& y) {
  const Matrix g = x.transpose() * x;
  return g.llt().solve(x.transpose() * y);
}

bool gap_contract_holds(const MiloResult& r) {
  if (!r.has_incumbent || r.gap >= 1.0) return true;
  const double factor = 1.0 + r.gap / (1.0 - r.gap);
  return r.incumbent.objective <= std::ceil(factor * r.lower_bound);
}

}  // namespace ddsel::testing
