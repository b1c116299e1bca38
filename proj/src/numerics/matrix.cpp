#include "fsl/matrix.hpp"

#include <cmath>
#include <numeric>

namespace fsl {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, Vector data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    fail(Status::BadArgs, "matrix data length does not match rows*cols");
  check_finite("matrix");
}

DenseMatrix DenseMatrix::identity(std::size_t d) {
  DenseMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) m.at(i, i) = 1.0;
  return m;
}

void DenseMatrix::check_finite(const char* what) const {
  for (double v : data_)
    if (!std::isfinite(v)) fail(Status::BadArgs, std::string(what) + " has non-finite entries");
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) fail(Status::BadArgs, "matmul shape mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c.at(i, j) += aik * b.at(k, j);
    }
  return c;
}

Vector matvec(const DenseMatrix& a, const Vector& x) {
  if (a.cols() != x.size()) fail(Status::BadArgs, "matvec shape mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a.at(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Vector matvec_t(const DenseMatrix& a, const Vector& x) {
  if (a.rows() != x.size()) fail(Status::BadArgs, "matvec_t shape mismatch");
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += a.at(i, j) * xi;
  }
  return y;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t.at(j, i) = a.at(i, j);
  return t;
}

DenseMatrix select_columns(const DenseMatrix& a, const std::vector<std::size_t>& idx) {
  DenseMatrix s(a.rows(), idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (idx[j] >= a.cols()) fail(Status::BadArgs, "column index out of range");
    for (std::size_t i = 0; i < a.rows(); ++i) s.at(i, j) = a.at(i, idx[j]);
  }
  return s;
}

double norm2(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double norm1(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += std::fabs(x);
  return s;
}

double norm_inf(const Vector& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::fabs(x));
  return s;
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) fail(Status::BadArgs, "dot shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vector sub(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) fail(Status::BadArgs, "sub shape mismatch");
  Vector c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
  return c;
}

Vector add(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) fail(Status::BadArgs, "add shape mismatch");
  Vector c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

Vector scale(const Vector& a, double c) {
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

long long binomial_capped(std::size_t n, std::size_t k, long long cap) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;  // C(n,j) increases up to n/2, keeping intermediates <= result
  long long r = 1;
  for (std::size_t i = 0; i < k; ++i) {
    r = r * static_cast<long long>(n - i) / static_cast<long long>(i + 1);
    if (r > cap) return cap + 1;
  }
  return r;
}

bool for_each_subset(std::size_t n, std::size_t k, long long cap,
                     const std::function<bool(const std::vector<std::size_t>&)>& fn) {
  if (binomial_capped(n, k, cap) > cap) return false;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  if (k == 0) {
    fn(idx);
    return true;
  }
  if (k > n) return true;
  while (true) {
    if (!fn(idx)) return true;
    // next lexicographic k-subset
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return true;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace fsl
