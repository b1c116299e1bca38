#pragma once

// Independent reference implementations for cross-checking library results.
// Everything here is deliberately naive: exhaustive enumeration over basic
// solutions, multiscale grid search, closed forms. Correct only at the tiny
// sizes the tests use, which is the point: slow and obviously right.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "fsl/matrix.hpp"
#include "fsl/numerics.hpp"

namespace oracles {

// Gaussian elimination with partial pivoting on a square system.
// Returns false when a pivot collapses (singular within tol).
inline bool solve_square(std::vector<double> m, std::size_t n, std::vector<double> b,
                         std::vector<double>& x, double tol = 1e-11) {
  double scale = 0.0;
  for (double v : m) scale = std::max(scale, std::abs(v));
  const double cutoff = tol * std::max(1.0, scale);
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(m[perm[r] * n + col]) > std::abs(m[perm[pivot] * n + col])) pivot = r;
    }
    std::swap(perm[col], perm[pivot]);
    const double pv = m[perm[col] * n + col];
    if (std::abs(pv) <= cutoff) return false;
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = m[perm[r] * n + col] / pv;
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) m[perm[r] * n + c] -= f * m[perm[col] * n + c];
      b[perm[r]] -= f * b[perm[col]];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[perm[i]];
    for (std::size_t c = i + 1; c < n; ++c) acc -= m[perm[i] * n + c] * x[c];
    x[i] = acc / m[perm[i] * n + i];
  }
  return true;
}

// All k-subsets of {0..n-1}, self-contained so the oracle does not lean on
// the enumeration helper it is used to test.
template <typename Fn>
inline void plain_subsets(std::size_t n, std::size_t k, const Fn& fn) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

struct VertexLpResult {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> x;
};

// min c^T x s.t. Mx = y, x >= 0 by scanning every basic solution. Exhaustive
// for feasible bounded problems with full-row-rank M.
inline VertexLpResult vertex_lp_min(const fsl::DenseMatrix& m_mat, const fsl::Vector& y,
                                    const fsl::Vector& c) {
  const std::size_t m = m_mat.rows(), n = m_mat.cols();
  VertexLpResult best;
  plain_subsets(n, m, [&](const std::vector<std::size_t>& cols) {
    std::vector<double> basis(m * m);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t j = 0; j < m; ++j) basis[r * m + j] = m_mat.at(r, cols[j]);
    std::vector<double> xb;
    if (!solve_square(basis, m, y, xb)) return;
    double obj = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (xb[j] < -1e-9) return;
      obj += c[cols[j]] * std::max(xb[j], 0.0);
    }
    if (obj < best.objective) {
      best.feasible = true;
      best.objective = obj;
      best.x.assign(n, 0.0);
      for (std::size_t j = 0; j < m; ++j) best.x[cols[j]] = std::max(xb[j], 0.0);
    }
  });
  return best;
}

struct L1MinResult {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> z;
};

// min |z|_1 s.t. Az = y, solved by enumerating every basic solution of the
// standard form [A -A][u;v] = y, u,v >= 0. The optimum of a feasible bounded
// LP sits at a basic feasible solution, so scanning all column m-subsets is
// exhaustive. Requires full row rank A.
inline L1MinResult vertex_l1_min(const fsl::DenseMatrix& a, const fsl::Vector& y) {
  const std::size_t m = a.rows(), n = a.cols();
  L1MinResult best;
  double ynorm = 0.0;
  for (double v : y) ynorm = std::max(ynorm, std::abs(v));
  if (ynorm == 0.0) {
    best.feasible = true;
    best.objective = 0.0;
    best.z.assign(n, 0.0);
    return best;
  }
  plain_subsets(2 * n, m, [&](const std::vector<std::size_t>& cols) {
    std::vector<double> basis(m * m);
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t c = cols[j];
        basis[r * m + j] = c < n ? a.at(r, c) : -a.at(r, c - n);
      }
    }
    std::vector<double> xb;
    if (!solve_square(basis, m, y, xb)) return;
    double obj = 0.0;
    for (double v : xb) {
      if (v < -1e-9) return;  // not a feasible basic solution
      obj += std::max(v, 0.0);
    }
    if (obj < best.objective) {
      best.feasible = true;
      best.objective = obj;
      best.z.assign(n, 0.0);
      for (std::size_t j = 0; j < m; ++j) {
        const double v = std::max(xb[j], 0.0);
        if (cols[j] < n) {
          best.z[cols[j]] += v;
        } else {
          best.z[cols[j] - n] -= v;
        }
      }
    }
  });
  return best;
}

// Closed form for min |z|_1 s.t. |z - y|_2 <= eta: soft-threshold y at the
// level where the residual sphere is hit, found by bisection.
inline fsl::Vector denoise_l1_oracle(const fsl::Vector& y, double eta) {
  const std::size_t n = y.size();
  double ynorm = 0.0;
  for (double v : y) ynorm += v * v;
  ynorm = std::sqrt(ynorm);
  if (ynorm <= eta) return fsl::Vector(n, 0.0);
  auto resid = [&](double lam) {
    double acc = 0.0;
    for (double v : y) {
      const double zi = std::copysign(std::max(std::abs(v) - lam, 0.0), v);
      acc += (zi - v) * (zi - v);
    }
    return std::sqrt(acc);
  };
  double lo = 0.0, hi = 0.0;
  for (double v : y) hi = std::max(hi, std::abs(v));
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (resid(mid) < eta ? lo : hi) = mid;
  }
  const double lam = 0.5 * (lo + hi);
  fsl::Vector z(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = std::copysign(std::max(std::abs(y[i]) - lam, 0.0), y[i]);
  }
  return z;
}

// Multiscale grid minimization of |z|_1 over {|Az - y|_2 <= eta} for n <= 3.
// The box always contains a minimizer: any optimum has |z*|_inf <= |z_f|_1
// for every feasible z_f, and the least-squares point is feasible whenever
// the problem is. Shrinks around the incumbent; resolution after `rounds`
// rounds is spacing * shrink^rounds.
inline double qcbp_grid_oracle(const fsl::DenseMatrix& a, const fsl::Vector& y, double eta,
                               fsl::Vector* argmin = nullptr) {
  const std::size_t m = a.rows(), n = a.cols();
  // Least-squares feasible point via normal equations (full column rank).
  std::vector<double> gram(n * n, 0.0), rhs(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < m; ++r) s += a.at(r, i) * a.at(r, j);
      gram[i * n + j] = s;
    }
    double s = 0.0;
    for (std::size_t r = 0; r < m; ++r) s += a.at(r, i) * y[r];
    rhs[i] = s;
  }
  std::vector<double> zls;
  if (!solve_square(gram, n, rhs, zls)) {
    // Rank-deficient normal equations (wide a): ridge-regularize to get a
    // near-least-squares starting point; the grid refinement does the rest.
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += gram[i * n + i];
    std::vector<double> ridge = gram;
    for (std::size_t i = 0; i < n; ++i) ridge[i * n + i] += 1e-10 * std::max(1.0, trace / n);
    if (!solve_square(ridge, n, rhs, zls)) return std::numeric_limits<double>::quiet_NaN();
  }
  auto residual = [&](const std::vector<double>& z) {
    double acc = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      double s = -y[r];
      for (std::size_t c = 0; c < n; ++c) s += a.at(r, c) * z[c];
      acc += s * s;
    }
    return std::sqrt(acc);
  };
  if (residual(zls) > eta) return std::numeric_limits<double>::quiet_NaN();
  double radius = 1e-9;
  for (double v : zls) radius += std::abs(v);
  std::vector<double> center(n, 0.0), best = zls, point(n);
  double best_obj = 0.0;
  for (double v : zls) best_obj += std::abs(v);
  const int pts = 21, rounds = 30;
  std::vector<int> digit(n);
  for (int round = 0; round < rounds; ++round) {
    std::fill(digit.begin(), digit.end(), 0);
    while (true) {
      double obj = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        point[i] = center[i] + radius * (2.0 * digit[i] / (pts - 1) - 1.0);
        obj += std::abs(point[i]);
      }
      if (obj < best_obj && residual(point) <= eta) {
        best_obj = obj;
        best = point;
      }
      std::size_t carry = 0;
      while (carry < n && ++digit[carry] == pts) digit[carry++] = 0;
      if (carry == n) break;
    }
    center = best;
    radius *= 0.55;
  }
  if (argmin) *argmin = best;
  return best_obj;
}

// min |F^T z|_1 s.t. Az = y, as an explicit equality-form LP solved by the
// library simplex (itself vetted against vertex_l1_min). Variables are
// [z (free, d) | t (n) | s (n) | r (n)] with t - F^T z - s = 0,
// t + F^T z - r = 0, A z = y, minimizing sum(t).
inline double analysis_lp_oracle(const fsl::DenseMatrix& f, const fsl::DenseMatrix& a,
                                 const fsl::Vector& y) {
  const std::size_t d = f.rows(), n = f.cols(), m = a.rows();
  const std::size_t vars = d + 3 * n, rows = 2 * n + m;
  fsl::LpProblem lp;
  lp.objective.assign(vars, 0.0);
  for (std::size_t i = 0; i < n; ++i) lp.objective[d + i] = 1.0;
  lp.eq_matrix = fsl::DenseMatrix(rows, vars);
  lp.eq_rhs.assign(rows, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      lp.eq_matrix.at(i, j) = -f.at(j, i);
      lp.eq_matrix.at(n + i, j) = f.at(j, i);
    }
    lp.eq_matrix.at(i, d + i) = 1.0;
    lp.eq_matrix.at(i, d + n + i) = -1.0;
    lp.eq_matrix.at(n + i, d + i) = 1.0;
    lp.eq_matrix.at(n + i, d + 2 * n + i) = -1.0;
  }
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < d; ++j) lp.eq_matrix.at(2 * n + r, j) = a.at(r, j);
    lp.eq_rhs[2 * n + r] = y[r];
  }
  lp.lower.assign(vars, 0.0);
  for (std::size_t j = 0; j < d; ++j) lp.lower[j] = -std::numeric_limits<double>::infinity();
  const fsl::LpSolution sol = fsl::solve_lp(lp);
  if (sol.status != fsl::LpStatus::Optimal) return std::numeric_limits<double>::quiet_NaN();
  return sol.objective;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// k!! with (-1)!! = 0!! = 1; E|g|^p = (p-1)!! for even p, g standard normal.
inline double double_factorial(int k) {
  double acc = 1.0;
  for (int v = k; v > 1; v -= 2) acc *= v;
  return acc;
}

}  // namespace oracles
