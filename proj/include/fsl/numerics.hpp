#pragma once

#include <optional>

#include "fsl/matrix.hpp"

namespace fsl {

struct SvdResult {
  DenseMatrix u;           // left singular vectors, columns orthonormal
  Vector singular_values;  // nonincreasing, nonnegative
  DenseMatrix v;           // right singular vectors, columns orthonormal
  std::size_t rank;        // values above rank_tol = 1e-10 * max(rows,cols) * s_max
};

SvdResult svd(const DenseMatrix& m);
DenseMatrix kernel_basis(const DenseMatrix& m);  // orthonormal columns spanning ker(m)
double smallest_nonzero_singular_value(const DenseMatrix& m);
double spectral_norm(const DenseMatrix& m);

struct EigResult {
  Vector eigenvalues;  // ascending
  DenseMatrix eigenvectors;
};

EigResult symmetric_eig(const DenseMatrix& m);

// min/max of x^T A x / x^T B x over range(B)\{0}; both inputs symmetric PSD.
struct GeneralizedEigExtremes {
  double min_value;
  double max_value;
};

GeneralizedEigExtremes generalized_eig_psd(const DenseMatrix& a, const DenseMatrix& b);

// LP in the form min c^T x s.t. Ax = b, x_i >= lower_i (lower may be -inf for
// free variables; NaN is rejected).
struct LpProblem {
  Vector objective;
  DenseMatrix eq_matrix;
  Vector eq_rhs;
  Vector lower;  // same length as objective
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationCap };

struct LpSolution {
  LpStatus status;
  Vector x;
  double objective = 0.0;
};

LpSolution solve_lp(const LpProblem& p);

Vector prox_l1(const Vector& v, double t);
Vector project_l2_ball(const Vector& v, const Vector& center, double radius);
// Euclidean projection onto {x : Ax = y}; A must have full row rank.
Vector project_affine(const DenseMatrix& a, const Vector& y, const Vector& v);

}  // namespace fsl
