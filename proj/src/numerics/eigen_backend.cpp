#include <Eigen/Dense>

#include "fsl/numerics.hpp"

namespace fsl {

namespace {

Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m.at(i, j);
  return e;
}

DenseMatrix from_eigen(const Eigen::MatrixXd& e) {
  DenseMatrix m(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m.at(i, j) = e(i, j);
  return m;
}

double rank_tol(const DenseMatrix& m, double smax) {
  return kTol.rank_rel * static_cast<double>(std::max(m.rows(), m.cols())) * smax;
}

}  // namespace

SvdResult svd(const DenseMatrix& m) {
  m.check_finite("svd input");
  Eigen::JacobiSVD<Eigen::MatrixXd> dec(to_eigen(m),
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (dec.info() != Eigen::Success) fail(Status::Internal, "svd did not converge");
  SvdResult r;
  r.u = from_eigen(dec.matrixU());
  r.v = from_eigen(dec.matrixV());
  const auto& s = dec.singularValues();
  r.singular_values.assign(s.data(), s.data() + s.size());
  const double smax = r.singular_values.empty() ? 0.0 : r.singular_values.front();
  const double tol = rank_tol(m, smax);
  r.rank = 0;
  for (double v : r.singular_values)
    if (v > tol) ++r.rank;
  return r;
}

DenseMatrix kernel_basis(const DenseMatrix& m) {
  SvdResult r = svd(m);
  const std::size_t dim = m.cols() - r.rank;
  DenseMatrix basis(m.cols(), dim);
  // last `dim` right singular vectors span the null space
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t i = 0; i < m.cols(); ++i) basis.at(i, j) = r.v.at(i, r.rank + j);
  return basis;
}

double smallest_nonzero_singular_value(const DenseMatrix& m) {
  SvdResult r = svd(m);
  if (r.rank == 0) fail(Status::BadArgs, "all-zero matrix has no nonzero singular value");
  return r.singular_values[r.rank - 1];
}

double spectral_norm(const DenseMatrix& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> dec(to_eigen(m));
  return dec.singularValues().size() ? dec.singularValues()(0) : 0.0;
}

EigResult symmetric_eig(const DenseMatrix& m) {
  if (m.rows() != m.cols()) fail(Status::BadArgs, "symmetric_eig needs a square matrix");
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (std::abs(m.at(i, j) - m.at(j, i)) > 1e-12)
        fail(Status::BadArgs, "symmetric_eig input is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dec(to_eigen(m));
  if (dec.info() != Eigen::Success) fail(Status::Internal, "symmetric_eig did not converge");
  EigResult r;
  const auto& w = dec.eigenvalues();
  r.eigenvalues.assign(w.data(), w.data() + w.size());
  r.eigenvectors = from_eigen(dec.eigenvectors());
  return r;
}

GeneralizedEigExtremes generalized_eig_psd(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    fail(Status::BadArgs, "generalized_eig_psd needs square matrices of equal size");
  Eigen::MatrixXd eb = to_eigen(b);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> decb(eb);
  if (decb.info() != Eigen::Success) fail(Status::Internal, "eig of B failed");
  const auto& w = decb.eigenvalues();
  const double wmax = w.size() ? w(w.size() - 1) : 0.0;
  if (wmax <= 0.0) fail(Status::BadArgs, "generalized_eig_psd: B is zero");
  const double tol = kTol.rank_rel * static_cast<double>(b.rows()) * wmax;
  // whiten on range(B): columns with eigenvalue above tolerance
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w(i) > tol) keep.push_back(i);
  Eigen::MatrixXd wh(b.rows(), keep.size());
  for (std::size_t j = 0; j < keep.size(); ++j)
    wh.col(j) = decb.eigenvectors().col(keep[j]) / std::sqrt(w(keep[j]));
  Eigen::MatrixXd reduced = wh.transpose() * to_eigen(a) * wh;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> deca((reduced + reduced.transpose()) / 2.0);
  if (deca.info() != Eigen::Success) fail(Status::Internal, "reduced eig failed");
  GeneralizedEigExtremes r;
  r.min_value = deca.eigenvalues()(0);
  r.max_value = deca.eigenvalues()(deca.eigenvalues().size() - 1);
  return r;
}

}  // namespace fsl
