#include <cmath>
#include <limits>

#include "fsl/numerics.hpp"

namespace fsl {

namespace {

constexpr double kReducedCostEps = 1e-9;
constexpr double kPivotEps = 1e-11;
constexpr int kMaxIterations = 200000;

// Dense tableau simplex over min c^T x, Tx = rhs, x >= 0. Bland's rule
// throughout (lowest-index entering and leaving), so termination is
// guaranteed and pivoting is deterministic across platforms.
struct Tableau {
  std::size_t m, n;               // constraint rows, structural+artificial cols
  std::vector<Vector> rows;       // m rows of length n
  Vector rhs;                     // length m, kept >= 0
  std::vector<std::size_t> basis;  // basis[i] = column basic in row i
  int iterations = 0;

  void pivot(std::size_t pr, std::size_t pc) {
    const double p = rows[pr][pc];
    for (std::size_t j = 0; j < n; ++j) rows[pr][j] /= p;
    rhs[pr] /= p;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == pr) continue;
      const double f = rows[i][pc];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) rows[i][j] -= f * rows[pr][j];
      rhs[i] -= f * rhs[pr];
      if (rhs[i] < 0.0 && rhs[i] > -1e-12) rhs[i] = 0.0;
    }
    basis[pr] = pc;
  }

  // Runs simplex for costs c over the allowed column range [0, limit).
  // Returns Optimal, Unbounded, or IterationCap.
  LpStatus run(const Vector& c, std::size_t limit) {
    while (true) {
      if (++iterations > kMaxIterations) return LpStatus::IterationCap;
      // reduced costs r_j = c_j - c_B^T T_j; Bland: first negative index enters
      Vector cb(m);
      for (std::size_t i = 0; i < m; ++i) cb[i] = c[basis[i]];
      std::size_t enter = limit;
      for (std::size_t j = 0; j < limit; ++j) {
        double r = c[j];
        for (std::size_t i = 0; i < m; ++i) r -= cb[i] * rows[i][j];
        if (r < -kReducedCostEps) {
          enter = j;
          break;
        }
      }
      if (enter == limit) return LpStatus::Optimal;
      // ratio test; ties broken by lowest basic variable index
      std::size_t leave = m;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        if (rows[i][enter] > kPivotEps) {
          const double ratio = rhs[i] / rows[i][enter];
          if (ratio < best - 1e-12 ||
              (ratio < best + 1e-12 && (leave == m || basis[i] < basis[leave]))) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave == m) return LpStatus::Unbounded;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpSolution solve_lp(const LpProblem& p) {
  const std::size_t nv = p.objective.size();
  const std::size_t m = p.eq_matrix.rows();
  if (p.eq_matrix.cols() != nv && m > 0) fail(Status::BadArgs, "lp matrix shape mismatch");
  if (p.eq_rhs.size() != m) fail(Status::BadArgs, "lp rhs shape mismatch");
  if (p.lower.size() != nv) fail(Status::BadArgs, "lp lower-bound shape mismatch");
  for (double lb : p.lower)
    if (std::isnan(lb)) fail(Status::BadArgs, "lp lower bound is NaN");

  // Transform to standard form: free variables split, finite bounds shifted.
  // col_of_pos[j] / col_of_neg[j] map original j to standard columns.
  std::vector<std::size_t> pos(nv), neg(nv, SIZE_MAX);
  std::size_t ns = 0;
  for (std::size_t j = 0; j < nv; ++j) {
    pos[j] = ns++;
    if (std::isinf(p.lower[j])) neg[j] = ns++;
  }
  Vector rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    double shift = 0.0;
    for (std::size_t j = 0; j < nv; ++j)
      if (!std::isinf(p.lower[j])) shift += p.eq_matrix.at(i, j) * p.lower[j];
    rhs[i] = p.eq_rhs[i] - shift;
  }
  Tableau t;
  t.m = m;
  t.n = ns + m;  // structural + artificial
  t.rows.assign(m, Vector(t.n, 0.0));
  t.rhs = rhs;
  t.basis.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double sgn = t.rhs[i] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < nv; ++j) {
      const double a = sgn * p.eq_matrix.at(i, j);
      t.rows[i][pos[j]] = a;
      if (neg[j] != SIZE_MAX) t.rows[i][neg[j]] = -a;
    }
    t.rhs[i] *= sgn;
    t.rows[i][ns + i] = 1.0;
    t.basis[i] = ns + i;
  }

  LpSolution sol;
  if (m > 0) {
    Vector c1(t.n, 0.0);
    for (std::size_t i = 0; i < m; ++i) c1[ns + i] = 1.0;
    const LpStatus s1 = t.run(c1, t.n);
    if (s1 == LpStatus::IterationCap) {
      sol.status = LpStatus::IterationCap;
      return sol;
    }
    double phase1 = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (t.basis[i] >= ns) phase1 += t.rhs[i];
    double scale = 1.0;
    for (double b : rhs) scale = std::max(scale, std::fabs(b));
    if (phase1 > 1e-7 * scale) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    // drive artificials out of the basis; redundant rows get ignored by
    // zeroing them (their rhs is ~0 and no pivot is available)
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis[i] < ns) continue;
      std::size_t pc = ns;
      for (std::size_t j = 0; j < ns; ++j)
        if (std::fabs(t.rows[i][j]) > 1e-9) {
          pc = j;
          break;
        }
      if (pc < ns) t.pivot(i, pc);
    }
  }

  Vector c2(t.n, 0.0);
  for (std::size_t j = 0; j < nv; ++j) {
    c2[pos[j]] = p.objective[j];
    if (neg[j] != SIZE_MAX) c2[neg[j]] = -p.objective[j];
  }
  // artificial columns stay priced out with a cost no pivot can admit
  const LpStatus s2 = t.run(c2, ns);
  sol.status = s2;
  if (s2 != LpStatus::Optimal) return sol;

  Vector xs(t.n, 0.0);
  for (std::size_t i = 0; i < m; ++i) xs[t.basis[i]] = t.rhs[i];
  sol.x.assign(nv, 0.0);
  for (std::size_t j = 0; j < nv; ++j) {
    double v = xs[pos[j]];
    if (neg[j] != SIZE_MAX) v -= xs[neg[j]];
    if (!std::isinf(p.lower[j])) v += p.lower[j];
    sol.x[j] = v;
  }
  sol.objective = 0.0;
  for (std::size_t j = 0; j < nv; ++j) sol.objective += p.objective[j] * sol.x[j];

  // Optimal never returns silently infeasible points.
  for (std::size_t i = 0; i < m; ++i) {
    double r = -p.eq_rhs[i];
    for (std::size_t j = 0; j < nv; ++j) r += p.eq_matrix.at(i, j) * sol.x[j];
    if (std::fabs(r) > kTol.lp_feas)
      fail(Status::Internal, "lp produced an infeasible optimal point");
  }
  return sol;
}

Vector prox_l1(const Vector& v, double t) {
  if (t < 0.0) fail(Status::BadArgs, "prox_l1 needs t >= 0");
  Vector r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::fabs(v[i]) - t;
    r[i] = a > 0.0 ? (v[i] > 0.0 ? a : -a) : 0.0;
  }
  return r;
}

Vector project_l2_ball(const Vector& v, const Vector& center, double radius) {
  if (radius < 0.0) fail(Status::BadArgs, "project_l2_ball needs radius >= 0");
  Vector d = sub(v, center);
  const double n = norm2(d);
  if (n <= radius) return v;
  const double f = radius / n;
  Vector r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = center[i] + f * d[i];
  return r;
}

}  // namespace fsl
