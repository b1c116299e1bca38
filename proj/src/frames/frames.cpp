#include "fsl/frames.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fsl/io.hpp"
#include "fsl/numerics.hpp"
#include "fsl/rng.hpp"

namespace fsl {

namespace {

constexpr double kPi = 3.14159265358979323846;

void attach_diagnostics(Frame& f) {
  const DenseMatrix& m = f.matrix;
  if (m.cols() < m.rows()) fail(Status::BadArgs, "frame must have n >= d");
  SvdResult svd_m = svd(m);
  if (svd_m.rank < m.rows()) fail(Status::BadArgs, "matrix does not span R^d, not a frame");
  f.spectral_norm = svd_m.singular_values[0];
  double smin = svd_m.singular_values[m.rows() - 1];
  f.lower_bound = smin * smin;
  f.upper_bound = f.spectral_norm * f.spectral_norm;
  f.parseval = true;
  for (std::size_t i = 0; i < m.rows() && f.parseval; ++i) {
    for (std::size_t j = 0; j < m.rows(); ++j) {
      double g = 0.0;
      for (std::size_t c = 0; c < m.cols(); ++c) g += m.at(i, c) * m.at(j, c);
      double want = (i == j) ? 1.0 : 0.0;
      if (std::fabs(g - want) > kTol.parseval) {
        f.parseval = false;
        break;
      }
    }
  }
}

}  // namespace

Frame make_frame(const DenseMatrix& m) {
  Frame f;
  f.matrix = m;
  attach_diagnostics(f);
  return f;
}

Frame make_frame_identity(std::size_t d) {
  Frame f = make_frame(DenseMatrix::identity(d));
  f.full_spark = true;
  return f;
}

Frame make_frame_gaussian(std::size_t d, std::size_t n, std::uint64_t seed) {
  if (n < d) fail(Status::BadArgs, "frame must have n >= d");
  DenseMatrix m(d, n);
  Rng rng(seed);
  // Column-major fill so column j is fully determined by (seed, j-prefix); columns
  // are then normalized to unit length.
  for (std::size_t j = 0; j < n; ++j) {
    double nrm2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double v = rng.normal();
      m.at(i, j) = v;
      nrm2 += v * v;
    }
    if (nrm2 <= 0.0) fail(Status::Internal, "degenerate gaussian column");
    double inv = 1.0 / std::sqrt(nrm2);
    for (std::size_t i = 0; i < d; ++i) m.at(i, j) *= inv;
  }
  return make_frame(m);
}

Frame make_frame_dct_overcomplete(std::size_t d) {
  if (d == 0) fail(Status::BadArgs, "frame dimension must be positive");
  DenseMatrix m(d, 2 * d);
  for (std::size_t i = 0; i < d; ++i) m.at(i, i) = 1.0;
  // Second block: orthonormal DCT-II basis vectors as columns.
  for (std::size_t j = 0; j < d; ++j) {
    double scale = (j == 0) ? std::sqrt(1.0 / double(d)) : std::sqrt(2.0 / double(d));
    for (std::size_t i = 0; i < d; ++i) {
      m.at(i, d + j) = scale * std::cos(kPi * (2.0 * double(i) + 1.0) * double(j) / (2.0 * double(d)));
    }
  }
  Frame f = make_frame(m);
  return f;
}

Frame make_frame_from_file(const std::string& path) { return make_frame(read_matrix(path)); }

Frame scale_columns(const Frame& f, const Vector& diag) {
  if (diag.size() != f.n()) fail(Status::BadArgs, "diagonal length must equal frame size");
  for (double v : diag) {
    if (v == 0.0 || !std::isfinite(v)) fail(Status::BadArgs, "diagonal entries must be nonzero and finite");
  }
  DenseMatrix m = f.matrix;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    for (std::size_t i = 0; i < m.rows(); ++i) m.at(i, j) *= diag[j];
  }
  return make_frame(m);
}

SparkReport is_full_spark(const Frame& f, long long cap) {
  const std::size_t d = f.d();
  const std::size_t n = f.n();
  SparkReport report;
  report.verdict = SparkReport::Verdict::FullSpark;
  double threshold = kTol.spark * f.spectral_norm;
  bool completed = for_each_subset(n, d, cap, [&](const std::vector<std::size_t>& cols) {
    DenseMatrix sub = select_columns(f.matrix, cols);
    if (svd(sub).singular_values[d - 1] <= threshold) {
      report.verdict = SparkReport::Verdict::NotFullSpark;
      report.witness = cols;
      return false;
    }
    return true;
  });
  if (!completed && report.verdict == SparkReport::Verdict::FullSpark) {
    report.verdict = SparkReport::Verdict::NotChecked;
    report.reason = "subset count exceeds enumeration cap";
  }
  return report;
}

FNormResult f_norm(const Frame& f, const Vector& z) {
  if (z.size() != f.d()) fail(Status::BadArgs, "vector length must equal frame dimension");
  const std::size_t n = f.n();
  // min 1^T (p + q) s.t. F(p - q) = z, p, q >= 0.
  LpProblem lp;
  lp.objective.assign(2 * n, 1.0);
  lp.eq_matrix = DenseMatrix(f.d(), 2 * n);
  for (std::size_t i = 0; i < f.d(); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      lp.eq_matrix.at(i, j) = f.matrix.at(i, j);
      lp.eq_matrix.at(i, n + j) = -f.matrix.at(i, j);
    }
  }
  lp.eq_rhs = z;
  lp.lower.assign(2 * n, 0.0);
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) fail(Status::Internal, "frame norm LP did not reach an optimum");
  FNormResult out;
  out.value = sol.objective;
  out.coefficients.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) out.coefficients[j] = sol.x[j] - sol.x[n + j];
  return out;
}

FkApprox sigma_f_k(const Frame& f, const Vector& z, std::size_t k, long long cap) {
  if (z.size() != f.d()) fail(Status::BadArgs, "vector length must equal frame dimension");
  const std::size_t n = f.n();
  if (k > n) fail(Status::BadArgs, "sparsity level exceeds frame size");

  FkApprox best;
  best.best_approx.assign(f.d(), 0.0);
  best.coefficients.assign(n, 0.0);
  best.tail = f_norm(f, z).value;  // empty support
  if (k == 0) return best;

  // For each support T: min |u|_1 over (u, x_T) with Fu + F_T x_T = z; the value
  // is |z - F_T x_T|_F at the best x_T. Supports enumerated lexicographically and
  // improved only strictly, so ties resolve to the smallest support.
  bool completed = for_each_subset(n, k, cap, [&](const std::vector<std::size_t>& support) {
    LpProblem lp;
    std::size_t vars = 2 * n + 2 * k;  // u split, then x_T split
    lp.objective.assign(vars, 0.0);
    for (std::size_t j = 0; j < 2 * n; ++j) lp.objective[j] = 1.0;
    lp.eq_matrix = DenseMatrix(f.d(), vars);
    for (std::size_t i = 0; i < f.d(); ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        lp.eq_matrix.at(i, j) = f.matrix.at(i, j);
        lp.eq_matrix.at(i, n + j) = -f.matrix.at(i, j);
      }
      for (std::size_t t = 0; t < k; ++t) {
        double v = f.matrix.at(i, support[t]);
        lp.eq_matrix.at(i, 2 * n + 2 * t) = v;
        lp.eq_matrix.at(i, 2 * n + 2 * t + 1) = -v;
      }
    }
    lp.eq_rhs = z;
    lp.lower.assign(vars, 0.0);
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) fail(Status::Internal, "support LP did not reach an optimum");
    if (sol.objective < best.tail - 1e-12) {
      best.tail = sol.objective;
      best.support = support;
      std::fill(best.coefficients.begin(), best.coefficients.end(), 0.0);
      for (std::size_t t = 0; t < k; ++t) {
        best.coefficients[support[t]] = sol.x[2 * n + 2 * t] - sol.x[2 * n + 2 * t + 1];
      }
      best.best_approx = matvec(f.matrix, best.coefficients);
    }
    return true;
  });
  if (!completed) fail(Status::NotChecked, "support count exceeds enumeration cap");
  return best;
}

SplittabilityEstimate splittability_search(const Frame& f, std::size_t s, std::size_t trials,
                                           std::uint64_t seed) {
  if (s == 0 || s > f.n()) fail(Status::BadArgs, "splitting level must be in [1, n]");
  SplittabilityEstimate est;
  est.s = s;
  est.beta_upper = std::numeric_limits<double>::infinity();
  est.has_witness = false;
  est.trials = trials;

  Rng rng(seed);
  const std::size_t d = f.d();
  const std::size_t n = f.n();

  auto random_dense = [&]() {
    Vector v(d);
    for (double& e : v) e = rng.normal();
    return v;
  };
  auto random_frame_sparse = [&](std::size_t nnz) {
    Vector coeff(n, 0.0);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < nnz; ++i) {
      std::size_t j = i + rng.below(n - i);
      std::swap(idx[i], idx[j]);
      coeff[idx[i]] = rng.normal();
    }
    return matvec(f.matrix, coeff);
  };

  for (std::size_t t = 0; t < trials; ++t) {
    Vector x, y;
    switch (t % 4) {
      case 0:
        x = random_dense();
        y = random_dense();
        break;
      case 1:  // x exactly frame-sparse, y dense
        x = random_frame_sparse(s);
        y = random_dense();
        break;
      case 2: {  // near-cancelling pair around a sparse center
        x = random_frame_sparse(s);
        Vector bump = random_frame_sparse(std::min<std::size_t>(s + 1, n));
        y = sub(bump, x);
        break;
      }
      default:
        x = random_frame_sparse(std::min<std::size_t>(2 * s, n));
        y = random_frame_sparse(s);
        break;
    }

    FkApprox ax = sigma_f_k(f, x, s);
    FkApprox ay = sigma_f_k(f, y, s);
    double lhs = f_norm(f, add(x, y)).value;
    double head = f_norm(f, ax.best_approx).value - f_norm(f, ay.best_approx).value;
    double gap = ay.tail - ax.tail;
    if (gap <= 1e-12) continue;  // inequality weakens as beta grows only when gap > 0
    double bound = (lhs - head) / gap;
    if (bound < 0.0) bound = 0.0;
    if (bound < est.beta_upper) {
      est.beta_upper = bound;
      est.witness_x = x;
      est.witness_y = y;
      est.has_witness = true;
    }
  }
  return est;
}

}  // namespace fsl
