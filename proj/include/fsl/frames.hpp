#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fsl/matrix.hpp"

namespace fsl {

// A frame is a full-rank d x n matrix, n >= d, columns spanning R^d.
struct Frame {
  DenseMatrix matrix;
  double spectral_norm = 0.0;
  double lower_bound = 0.0;     // smallest eigenvalue of FF^T
  double upper_bound = 0.0;     // largest eigenvalue of FF^T
  bool parseval = false;        // FF^T = I within 1e-9 entrywise
  std::optional<bool> full_spark;  // set when certified, empty otherwise

  std::size_t d() const { return matrix.rows(); }
  std::size_t n() const { return matrix.cols(); }
};

Frame make_frame_identity(std::size_t d);
Frame make_frame_gaussian(std::size_t d, std::size_t n, std::uint64_t seed);  // unit-norm columns
Frame make_frame_dct_overcomplete(std::size_t d);  // [I | orthonormal DCT-II], n = 2d
Frame make_frame_from_file(const std::string& path);
Frame make_frame(const DenseMatrix& m);  // validates and caches diagnostics

Frame scale_columns(const Frame& f, const Vector& diag);

struct SparkReport {
  enum class Verdict { FullSpark, NotFullSpark, NotChecked };
  Verdict verdict;
  std::vector<std::size_t> witness;  // a dependent d-subset when NotFullSpark
  std::string reason;                // set when NotChecked
};

SparkReport is_full_spark(const Frame& f, long long cap = kTol.enumeration_cap);

struct FNormResult {
  double value;
  Vector coefficients;  // a minimizer x with Fx = z, |x|_1 = value
};

// |z|_F = min |x|_1 s.t. Fx = z (synthesis sparsity norm induced by the frame).
FNormResult f_norm(const Frame& f, const Vector& z);

struct FkApprox {
  Vector best_approx;                // z_k = F_T x_T
  std::vector<std::size_t> support;  // size <= k, lexicographically smallest optimum
  Vector coefficients;               // length n, zero off the support
  double tail;                       // sigma_{F,k}(z) = |z - z_k|_F
};

FkApprox sigma_f_k(const Frame& f, const Vector& z, std::size_t k,
                   long long cap = kTol.enumeration_cap);

struct SplittabilityEstimate {
  std::size_t s;
  double beta_upper;  // smallest (lhs-const)/gap over sampled pairs; +inf if no pair binds
  bool has_witness;
  Vector witness_x, witness_y;
  std::size_t trials;
};

// Randomized falsification of the splitting inequality; never certifies.
SplittabilityEstimate splittability_search(const Frame& f, std::size_t s, std::size_t trials,
                                           std::uint64_t seed);

}  // namespace fsl
