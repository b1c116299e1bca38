#pragma once

#include <optional>
#include <string>

#include "fsl/frames.hpp"
#include "fsl/matrix.hpp"

namespace fsl {

enum class DecodeStatus { Optimal, MaxIter, Infeasible };

std::string decode_status_name(DecodeStatus status);

struct DecodeResult {
  Vector z_hat;
  std::optional<Vector> x_hat;  // coefficient estimate, synthesis decoder only
  double objective = 0.0;
  double feasibility_residual = 0.0;  // max(0, |A z_hat - y|_2 - eta)
  std::size_t iterations = 0;         // 0 for the LP-backed decoder
  DecodeStatus status = DecodeStatus::Optimal;
};

std::string decode_result_to_json(const DecodeResult& result);

// min |z|_1 subject to Az = y, solved exactly as a split-variable LP.
DecodeResult basis_pursuit_eq(const DenseMatrix& a, const Vector& y);

// min |z|_1 subject to |Az - y|_2 <= eta, primal-dual splitting iteration.
DecodeResult qcbp(const DenseMatrix& a, const Vector& y, double eta);

// min |x|_1 subject to |AFx - y|_2 <= eta; returns z_hat = F x_hat.
DecodeResult l1_synthesis(const Frame& f, const DenseMatrix& a, const Vector& y, double eta);

// min |F^T z|_1 subject to |Az - y|_2 <= eta, stacked-operator splitting.
DecodeResult l1_analysis(const Frame& f, const DenseMatrix& a, const Vector& y, double eta);

enum class BoundVariant { RnspL1, RnspLp, Rwp, FRnsp, FSnsp, QpChain };

struct BoundParams {
  BoundVariant variant = BoundVariant::RnspL1;
  double rho = 0.0;
  double tau = 0.0;
  double q = 1.0;
  double p = 1.0;
  std::size_t k = 0;
  double c0 = 0.0;  // RWP
  double c1 = 0.0;
  double beta = 0.0;  // F-RNSP splitting constant
  double c = 0.0;     // F-SNSP constant
  double nu_a = 0.0;  // smallest nonzero singular value of A
  std::size_t n = 0;  // frame size for F-SNSP
  double big_c = 0.0;  // QP-chain constants, supplied not derived
  double big_d = 0.0;
  std::size_t m = 0;  // QP-chain k* = m / log(e d / m)
  std::size_t d = 0;
};

// Closed-form right-hand side of the selected recovery guarantee.
double error_bound(const BoundParams& params, double sigma, double eta);

}  // namespace fsl
