#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "fsl/common.hpp"

namespace fsl {

using Vector = std::vector<double>;

// Row-major dense matrix of doubles. Entries are validated finite on
// construction from external data; internal computations keep them finite.
class DenseMatrix {
 public:
  DenseMatrix() : rows_(0), cols_(0) {}
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  DenseMatrix(std::size_t rows, std::size_t cols, Vector data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const Vector& storage() const { return data_; }

  static DenseMatrix identity(std::size_t d);
  void check_finite(const char* what) const;

 private:
  std::size_t rows_, cols_;
  Vector data_;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
Vector matvec(const DenseMatrix& a, const Vector& x);
Vector matvec_t(const DenseMatrix& a, const Vector& x);  // A^T x
DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix select_columns(const DenseMatrix& a, const std::vector<std::size_t>& idx);

double norm2(const Vector& v);
double norm1(const Vector& v);
double norm_inf(const Vector& v);
double dot(const Vector& a, const Vector& b);
Vector sub(const Vector& a, const Vector& b);
Vector add(const Vector& a, const Vector& b);
Vector scale(const Vector& a, double c);

// Lexicographically ordered k-subsets of {0..n-1}; calls fn(subset) until it
// returns false. Returns false iff the cap was exceeded (fn never called then).
bool for_each_subset(std::size_t n, std::size_t k, long long cap,
                     const std::function<bool(const std::vector<std::size_t>&)>& fn);

long long binomial_capped(std::size_t n, std::size_t k, long long cap);

}  // namespace fsl
