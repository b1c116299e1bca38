#include <cmath>

#include "fsl/numerics.hpp"

namespace fsl {

Vector project_affine(const DenseMatrix& a, const Vector& y, const Vector& v) {
  if (a.rows() != y.size() || a.cols() != v.size())
    fail(Status::BadArgs, "project_affine shape mismatch");
  SvdResult dec = svd(a);
  if (dec.rank < a.rows()) fail(Status::BadArgs, "project_affine needs full row rank");
  // v + A^+ (y - A v) with A^+ = V S^{-1} U^T
  Vector r = sub(y, matvec(a, v));
  Vector ut = matvec_t(dec.u, r);
  for (std::size_t i = 0; i < a.rows(); ++i) ut[i] /= dec.singular_values[i];
  Vector corr(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t k = 0; k < a.rows(); ++k) corr[i] += dec.v.at(i, k) * ut[k];
  Vector out = add(v, corr);
  Vector check = sub(matvec(a, out), y);
  if (norm2(check) > 1e-9 * std::max(1.0, norm2(y)))
    fail(Status::Internal, "project_affine residual too large");
  return out;
}

}  // namespace fsl
