#include "fsl/decoders.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include <json.hpp>

#include "fsl/numerics.hpp"

namespace fsl {

namespace {

// Step sizes satisfy tau * sigma * |K|_2^2 < 1 for the splitting iteration.
constexpr double kStepSafety = 0.99;

double feas_residual(const DenseMatrix& a, const Vector& z, const Vector& y, double eta) {
  return std::max(0.0, norm2(sub(matvec(a, z), y)) - eta);
}

// Distance from y to range(A); infeasibility detector for the ball constraint.
double range_distance(const DenseMatrix& a, const Vector& y) {
  SvdResult s = svd(a);
  Vector res = y;
  for (std::size_t c = 0; c < std::size_t(s.rank); ++c) {
    double coeff = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) coeff += s.u.at(i, c) * y[i];
    for (std::size_t i = 0; i < a.rows(); ++i) res[i] -= coeff * s.u.at(i, c);
  }
  return norm2(res);
}

void shrink_l2(Vector& w, double amount) {
  if (amount <= 0.0) return;
  double nrm = norm2(w);
  double factor = nrm <= amount ? 0.0 : 1.0 - amount / nrm;
  for (double& e : w) e *= factor;
}

}  // namespace

std::string decode_status_name(DecodeStatus status) {
  switch (status) {
    case DecodeStatus::Optimal: return "optimal";
    case DecodeStatus::MaxIter: return "max-iter";
    case DecodeStatus::Infeasible: return "infeasible";
  }
  fail(Status::Internal, "unknown decode status");
}

std::string decode_result_to_json(const DecodeResult& result) {
  nlohmann::json j;
  j["schema"] = 1;
  j["status"] = decode_status_name(result.status);
  j["objective"] = result.objective;
  j["feasibility_residual"] = result.feasibility_residual;
  j["iterations"] = result.iterations;
  j["z_hat"] = result.z_hat;
  if (result.x_hat.has_value()) j["x_hat"] = *result.x_hat;
  return j.dump();
}

DecodeResult basis_pursuit_eq(const DenseMatrix& a, const Vector& y) {
  if (y.size() != a.rows()) fail(Status::BadArgs, "measurement length must equal rows");
  const std::size_t d = a.cols();
  LpProblem lp;
  lp.objective.assign(2 * d, 1.0);
  lp.eq_matrix = DenseMatrix(a.rows(), 2 * d);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      lp.eq_matrix.at(i, j) = a.at(i, j);
      lp.eq_matrix.at(i, d + j) = -a.at(i, j);
    }
  }
  lp.eq_rhs = y;
  lp.lower.assign(2 * d, 0.0);

  DecodeResult result;
  LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::Infeasible) {
    result.status = DecodeStatus::Infeasible;
    result.z_hat.assign(d, 0.0);
    result.feasibility_residual = norm2(y);
    return result;
  }
  if (sol.status != LpStatus::Optimal) fail(Status::Internal, "basis pursuit LP did not converge");
  result.status = DecodeStatus::Optimal;
  result.z_hat.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) result.z_hat[j] = sol.x[j] - sol.x[d + j];
  result.objective = sol.objective;
  result.feasibility_residual = feas_residual(a, result.z_hat, y, 0.0);
  return result;
}

DecodeResult qcbp(const DenseMatrix& a, const Vector& y, double eta) {
  if (y.size() != a.rows()) fail(Status::BadArgs, "measurement length must equal rows");
  if (eta < 0.0) fail(Status::BadArgs, "noise level must be nonnegative");
  const std::size_t d = a.cols();

  DecodeResult result;
  result.z_hat.assign(d, 0.0);
  if (norm2(y) <= eta) {  // zero is feasible and has minimal objective
    result.status = DecodeStatus::Optimal;
    return result;
  }
  double gap = range_distance(a, y) - eta;
  if (gap > 1e-9 * std::max(1.0, norm2(y))) {
    result.status = DecodeStatus::Infeasible;
    result.feasibility_residual = gap;
    return result;
  }

  double opnorm = spectral_norm(a);
  if (opnorm <= 0.0) fail(Status::Internal, "zero operator escaped the feasibility screen");
  double step = kStepSafety / opnorm;  // tau = sigma = step

  Vector z(d, 0.0), z_bar(d, 0.0), u(a.rows(), 0.0);
  double y_scale = std::max(1.0, norm2(y));
  std::size_t iter = 0;
  for (; iter < std::size_t(kTol.qcbp_max_iter); ++iter) {
    // Dual ascent on the ball constraint: shift by sigma*y, then l2-shrink.
    Vector az = matvec(a, z_bar);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += step * (az[i] - y[i]);
    shrink_l2(u, step * eta);
    // Primal descent with the l1 prox.
    Vector grad = matvec_t(a, u);
    Vector z_new(d);
    for (std::size_t j = 0; j < d; ++j) z_new[j] = z[j] - step * grad[j];
    z_new = prox_l1(z_new, step);
    double change = norm2(sub(z_new, z));
    for (std::size_t j = 0; j < d; ++j) z_bar[j] = 2.0 * z_new[j] - z[j];
    z = z_new;
    if (change <= kTol.qcbp_primal_change * std::max(1.0, norm2(z))) {
      if (feas_residual(a, z, y, eta) <= kTol.decode_feas_rel * y_scale) break;
    }
  }
  result.z_hat = z;
  result.objective = norm1(z);
  result.feasibility_residual = feas_residual(a, z, y, eta);
  result.iterations = iter;
  result.status = iter < std::size_t(kTol.qcbp_max_iter) ? DecodeStatus::Optimal
                                                         : DecodeStatus::MaxIter;
  return result;
}

DecodeResult l1_synthesis(const Frame& f, const DenseMatrix& a, const Vector& y, double eta) {
  if (a.cols() != f.d()) fail(Status::BadArgs, "sensing and frame dimensions disagree");
  DecodeResult inner = qcbp(matmul(a, f.matrix), y, eta);
  DecodeResult result;
  result.status = inner.status;
  result.iterations = inner.iterations;
  result.objective = inner.objective;
  result.feasibility_residual = inner.feasibility_residual;
  result.x_hat = inner.z_hat;
  result.z_hat = matvec(f.matrix, inner.z_hat);
  if (result.status == DecodeStatus::Optimal) {
    // At the optimum the coefficient l1 norm equals the synthesis norm of z_hat.
    double fn = f_norm(f, result.z_hat).value;
    if (std::fabs(result.objective - fn) > 1e-5 * std::max(1.0, fn))
      fail(Status::Internal, "synthesis objective disagrees with the frame norm of z_hat");
  }
  return result;
}

DecodeResult l1_analysis(const Frame& f, const DenseMatrix& a, const Vector& y, double eta) {
  if (a.cols() != f.d()) fail(Status::BadArgs, "sensing and frame dimensions disagree");
  if (y.size() != a.rows()) fail(Status::BadArgs, "measurement length must equal rows");
  if (eta < 0.0) fail(Status::BadArgs, "noise level must be nonnegative");
  if (!f.parseval)
    std::cerr << "warning: analysis decoding with a non-Parseval frame; the recovery "
                 "guarantee assumes Parseval\n";
  const std::size_t d = f.d();
  const std::size_t n = f.n();
  const std::size_t m = a.rows();

  DecodeResult result;
  result.z_hat.assign(d, 0.0);
  if (norm2(y) <= eta) {
    result.status = DecodeStatus::Optimal;
    return result;
  }
  double gap = range_distance(a, y) - eta;
  if (gap > 1e-9 * std::max(1.0, norm2(y))) {
    result.status = DecodeStatus::Infeasible;
    result.feasibility_residual = gap;
    return result;
  }

  // Stacked operator K = [F^T; A]; |K|_2^2 = lambda_max(F F^T + A^T A).
  DenseMatrix stacked(n + m, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) stacked.at(i, j) = f.matrix.at(j, i);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < d; ++j) stacked.at(n + i, j) = a.at(i, j);
  double opnorm = spectral_norm(stacked);
  if (opnorm <= 0.0) fail(Status::Internal, "zero stacked operator");
  double step = kStepSafety / opnorm;

  Vector z(d, 0.0), z_bar(d, 0.0), u(n, 0.0), v(m, 0.0);
  double y_scale = std::max(1.0, norm2(y));
  std::size_t iter = 0;
  for (; iter < std::size_t(kTol.qcbp_max_iter); ++iter) {
    // Dual for the l1 term: clamp to [-1, 1] coordinatewise.
    Vector ftz = matvec_t(f.matrix, z_bar);
    for (std::size_t i = 0; i < n; ++i)
      u[i] = std::clamp(u[i] + step * ftz[i], -1.0, 1.0);
    Vector az = matvec(a, z_bar);
    for (std::size_t i = 0; i < m; ++i) v[i] += step * (az[i] - y[i]);
    shrink_l2(v, step * eta);
    Vector pull = matvec(f.matrix, u);
    Vector pull2 = matvec_t(a, v);
    Vector z_new(d);
    for (std::size_t j = 0; j < d; ++j) z_new[j] = z[j] - step * (pull[j] + pull2[j]);
    double change = norm2(sub(z_new, z));
    for (std::size_t j = 0; j < d; ++j) z_bar[j] = 2.0 * z_new[j] - z[j];
    z = z_new;
    if (change <= kTol.qcbp_primal_change * std::max(1.0, norm2(z))) {
      if (feas_residual(a, z, y, eta) <= kTol.decode_feas_rel * y_scale) break;
    }
  }
  result.z_hat = z;
  result.objective = norm1(matvec_t(f.matrix, z));
  result.feasibility_residual = feas_residual(a, z, y, eta);
  result.iterations = iter;
  result.status = iter < std::size_t(kTol.qcbp_max_iter) ? DecodeStatus::Optimal
                                                         : DecodeStatus::MaxIter;
  return result;
}

double error_bound(const BoundParams& params, double sigma, double eta) {
  if (sigma < 0.0 || eta < 0.0) fail(Status::BadArgs, "sigma and eta must be nonnegative");
  switch (params.variant) {
    case BoundVariant::RnspL1: {
      if (!(params.rho >= 0.0 && params.rho < 1.0))
        fail(Status::BadArgs, "hypothesis violated: rho < 1");
      if (params.tau <= 0.0) fail(Status::BadArgs, "hypothesis violated: tau > 0");
      if (params.q < 1.0) fail(Status::BadArgs, "hypothesis violated: q >= 1");
      if (params.k == 0) fail(Status::BadArgs, "hypothesis violated: k >= 1");
      double head = 2.0 * (1.0 + params.rho) / (1.0 - params.rho) * sigma;
      double noise = 2.0 * params.tau / (1.0 - params.rho) *
                     std::pow(double(params.k), 1.0 - 1.0 / params.q) * eta;
      return head + noise;
    }
    case BoundVariant::RnspLp: {
      if (!(params.rho >= 0.0 && params.rho < 1.0))
        fail(Status::BadArgs, "hypothesis violated: rho < 1");
      if (params.tau <= 0.0) fail(Status::BadArgs, "hypothesis violated: tau > 0");
      if (params.p < 1.0 || params.p > params.q)
        fail(Status::BadArgs, "hypothesis violated: 1 <= p <= q");
      if (params.k == 0) fail(Status::BadArgs, "hypothesis violated: k >= 1");
      double head = 2.0 * (1.0 + params.rho) * (1.0 + params.rho) / (1.0 - params.rho) * sigma /
                    std::pow(double(params.k), 1.0 - 1.0 / params.p);
      double noise = (3.0 + params.rho) / (1.0 - params.rho) * params.tau *
                     std::pow(double(params.k), 1.0 / params.p - 1.0 / params.q) * eta;
      return head + noise;
    }
    case BoundVariant::Rwp: {
      if (params.c0 <= 0.0) fail(Status::BadArgs, "hypothesis violated: c0 > 0");
      if (params.c1 <= 0.0) fail(Status::BadArgs, "hypothesis violated: c1 > 0");
      if (params.k == 0) fail(Status::BadArgs, "hypothesis violated: k >= 1");
      return 4.0 * params.c0 * sigma / std::sqrt(double(params.k)) + 2.0 / params.c1 * eta;
    }
    case BoundVariant::FRnsp: {
      if (params.beta <= 0.0) fail(Status::BadArgs, "hypothesis violated: beta > 0");
      if (!(params.rho >= 0.0 && params.rho < 1.0))
        fail(Status::BadArgs, "hypothesis violated: rho < 1");
      if (!(params.rho < params.beta)) fail(Status::BadArgs, "hypothesis violated: rho < beta");
      if (params.tau <= 0.0) fail(Status::BadArgs, "hypothesis violated: tau > 0");
      double head = (1.0 + params.beta) * (1.0 + params.rho) /
                    (params.beta * (params.beta - params.rho)) * sigma;
      double noise = 2.0 * params.tau * (1.0 + params.beta) / (params.beta - params.rho) * eta;
      return head + noise;
    }
    case BoundVariant::FSnsp: {
      if (params.c <= 0.0) fail(Status::BadArgs, "hypothesis violated: c > 0");
      if (params.nu_a <= 0.0)
        fail(Status::BadArgs, "hypothesis violated: smallest nonzero singular value > 0");
      if (params.n == 0) fail(Status::BadArgs, "hypothesis violated: n >= 1");
      return 2.0 / params.nu_a * (std::sqrt(double(params.n)) / params.c + 1.0) * eta +
             2.0 / params.c * sigma;
    }
    case BoundVariant::QpChain: {
      if (params.big_c < 0.0 || params.big_d < 0.0)
        fail(Status::BadArgs, "hypothesis violated: C, D >= 0");
      if (params.p < 1.0 || params.p > 2.0)
        fail(Status::BadArgs, "hypothesis violated: 1 <= p <= 2");
      if (params.k == 0) fail(Status::BadArgs, "hypothesis violated: k >= 1");
      if (params.m == 0 || params.d == 0)
        fail(Status::BadArgs, "hypothesis violated: m, d >= 1");
      double k_star =
          double(params.m) / std::log(std::exp(1.0) * double(params.d) / double(params.m));
      if (k_star <= 0.0) fail(Status::BadArgs, "hypothesis violated: k* > 0");
      return params.big_c * sigma / std::pow(double(params.k), 1.0 - 1.0 / params.p) +
             params.big_d * std::pow(k_star, 1.0 / params.p - 0.5) * eta;
    }
  }
  fail(Status::Internal, "unknown bound variant");
}

}  // namespace fsl
