#include "fsl/properties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "fsl/numerics.hpp"
#include "fsl/rng.hpp"

namespace fsl {

std::string verdict_name(PropertyReport::Verdict verdict) {
  switch (verdict) {
    case PropertyReport::Verdict::CertifiedHolds: return "certified-holds";
    case PropertyReport::Verdict::CertifiedFails: return "certified-fails";
    case PropertyReport::Verdict::Estimate: return "estimate";
    case PropertyReport::Verdict::NotChecked: return "not-checked";
  }
  fail(Status::Internal, "unknown verdict");
}

std::string report_to_json(const PropertyReport& report) {
  nlohmann::json j;
  j["schema"] = 1;
  j["property"] = report.property;
  j["verdict"] = verdict_name(report.verdict);
  if (std::isfinite(report.value)) j["value"] = report.value;
  else j["value"] = report.value > 0 ? "inf" : "-inf";
  j["params"] = report.params;
  if (!report.witness.empty()) j["witness"] = report.witness;
  if (!report.witness_support.empty()) j["witness_support"] = report.witness_support;
  if (!report.witness_signs.empty()) j["witness_signs"] = report.witness_signs;
  if (report.trials > 0) j["trials"] = report.trials;
  if (!report.reason.empty()) j["reason"] = report.reason;
  return j.dump();
}

double coherence(const DenseMatrix& a) {
  const std::size_t d = a.cols();
  std::vector<double> inv_norms(d);
  for (std::size_t j = 0; j < d; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += a.at(i, j) * a.at(i, j);
    if (s <= 0.0) fail(Status::BadArgs, "coherence undefined with a zero column");
    inv_norms[j] = 1.0 / std::sqrt(s);
  }
  double mu = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      double g = 0.0;
      for (std::size_t r = 0; r < a.rows(); ++r) g += a.at(r, i) * a.at(r, j);
      mu = std::max(mu, std::fabs(g) * inv_norms[i] * inv_norms[j]);
    }
  }
  return mu;
}

RipResult rip_constant_exact(const DenseMatrix& a, std::size_t k, long long cap) {
  if (k == 0 || k > a.cols()) fail(Status::BadArgs, "order k must lie in [1, cols]");
  RipResult result{0.0, {}};
  bool first = true;
  bool completed = for_each_subset(a.cols(), k, cap, [&](const std::vector<std::size_t>& t) {
    DenseMatrix at = select_columns(a, t);
    DenseMatrix gram = matmul(transpose(at), at);
    EigResult eig = symmetric_eig(gram);
    double lo = eig.eigenvalues.front();
    double hi = eig.eigenvalues.back();
    double dev = std::max(hi - 1.0, 1.0 - lo);
    if (first || dev > result.delta) {
      result.delta = dev;
      result.witness_support = t;
      first = false;
    }
    return true;
  });
  if (!completed) fail(Status::NotChecked, "support count exceeds enumeration cap");
  return result;
}

SpectrumExtremes rip_gram_extremes(const DenseMatrix& a, std::size_t k, long long cap) {
  if (k == 0 || k > a.cols()) fail(Status::BadArgs, "order k must lie in [1, cols]");
  SpectrumExtremes ext{0.0, 0.0};
  bool first = true;
  bool completed = for_each_subset(a.cols(), k, cap, [&](const std::vector<std::size_t>& t) {
    DenseMatrix at = select_columns(a, t);
    EigResult eig = symmetric_eig(matmul(transpose(at), at));
    if (first) {
      ext.min_value = eig.eigenvalues.front();
      ext.max_value = eig.eigenvalues.back();
      first = false;
    } else {
      ext.min_value = std::min(ext.min_value, eig.eigenvalues.front());
      ext.max_value = std::max(ext.max_value, eig.eigenvalues.back());
    }
    return true;
  });
  if (!completed) fail(Status::NotChecked, "support count exceeds enumeration cap");
  return ext;
}

SpectrumExtremes f_rip_gram_extremes(const DenseMatrix& a, const Frame& f, std::size_t k,
                                     long long cap) {
  if (a.cols() != f.d()) fail(Status::BadArgs, "sensing and frame dimensions disagree");
  if (k == 0 || k > f.n()) fail(Status::BadArgs, "order k must lie in [1, n]");
  DenseMatrix af = matmul(a, f.matrix);
  SpectrumExtremes ext{0.0, 0.0};
  bool first = true;
  bool completed = for_each_subset(f.n(), k, cap, [&](const std::vector<std::size_t>& t) {
    DenseMatrix ft = select_columns(f.matrix, t);
    DenseMatrix aft = select_columns(af, t);
    double max_abs = 0.0;
    for (double v : ft.storage()) max_abs = std::max(max_abs, std::fabs(v));
    if (max_abs <= 1e-14) return true;
    GeneralizedEigExtremes ge =
        generalized_eig_psd(matmul(transpose(aft), aft), matmul(transpose(ft), ft));
    if (first) {
      ext.min_value = ge.min_value;
      ext.max_value = ge.max_value;
      first = false;
    } else {
      ext.min_value = std::min(ext.min_value, ge.min_value);
      ext.max_value = std::max(ext.max_value, ge.max_value);
    }
    return true;
  });
  if (!completed) fail(Status::NotChecked, "support count exceeds enumeration cap");
  if (first) fail(Status::BadArgs, "frame has no nonzero support of this order");
  return ext;
}

PropertyReport nsp_check_exact(const DenseMatrix& a, std::size_t k, long long cap) {
  const std::size_t d = a.cols();
  if (k == 0 || k >= d) fail(Status::BadArgs, "order k must lie in [1, cols)");

  PropertyReport report;
  report.property = "nsp";
  report.params["k"] = double(k);

  long long supports = binomial_capped(d, k, cap);
  long long sign_budget = 1;
  for (std::size_t i = 0; i < k && sign_budget <= cap; ++i) sign_budget *= 2;
  if (supports < 0 || supports > cap / std::max<long long>(1, sign_budget)) {
    report.verdict = PropertyReport::Verdict::NotChecked;
    report.reason = "support-sign count exceeds enumeration cap";
    return report;
  }

  DenseMatrix kernel = kernel_basis(a);
  const std::size_t r = kernel.cols();
  if (r == 0) {
    report.verdict = PropertyReport::Verdict::CertifiedHolds;
    report.reason = "kernel is trivial";
    return report;
  }

  // Per support T and sign pattern s: minimize |z_{T^c}|_1 over z in ker(A)
  // subject to s^T z_T = 1. The property holds iff every such program is
  // infeasible or has optimum strictly above 1; boundary equality is a failure.
  // Patterns with the first sign fixed at +1 suffice since z -> -z mirrors them.
  report.verdict = PropertyReport::Verdict::CertifiedHolds;
  for_each_subset(d, k, cap, [&](const std::vector<std::size_t>& t) {
    std::vector<bool> in_t(d, false);
    for (std::size_t i : t) in_t[i] = true;
    std::vector<std::size_t> off;
    off.reserve(d - k);
    for (std::size_t j = 0; j < d; ++j)
      if (!in_t[j]) off.push_back(j);

    std::size_t half_patterns = std::size_t(1) << (k - 1);
    for (std::size_t mask = 0; mask < half_patterns; ++mask) {
      std::vector<double> signs(k, 1.0);
      for (std::size_t b = 0; b + 1 < k; ++b)
        if (mask & (std::size_t(1) << b)) signs[b + 1] = -1.0;

      // Variables: kernel coordinates c (free), then split magnitudes p, q >= 0
      // for the off-support entries. Rows: (Nc)_j - p_j + q_j = 0 for j off T,
      // then the normalization row sum_t s_t (Nc)_{T_t} = 1.
      std::size_t vars = r + 2 * off.size();
      LpProblem lp;
      lp.objective.assign(vars, 0.0);
      for (std::size_t j = 0; j < 2 * off.size(); ++j) lp.objective[r + j] = 1.0;
      lp.eq_matrix = DenseMatrix(off.size() + 1, vars);
      lp.eq_rhs.assign(off.size() + 1, 0.0);
      for (std::size_t row = 0; row < off.size(); ++row) {
        for (std::size_t c = 0; c < r; ++c) lp.eq_matrix.at(row, c) = kernel.at(off[row], c);
        lp.eq_matrix.at(row, r + 2 * row) = -1.0;
        lp.eq_matrix.at(row, r + 2 * row + 1) = 1.0;
      }
      for (std::size_t c = 0; c < r; ++c) {
        double v = 0.0;
        for (std::size_t i = 0; i < k; ++i) v += signs[i] * kernel.at(t[i], c);
        lp.eq_matrix.at(off.size(), c) = v;
      }
      lp.eq_rhs[off.size()] = 1.0;
      lp.lower.assign(vars, 0.0);
      for (std::size_t c = 0; c < r; ++c) lp.lower[c] = -std::numeric_limits<double>::infinity();

      LpSolution sol = solve_lp(lp);
      if (sol.status == LpStatus::Infeasible) continue;
      if (sol.status != LpStatus::Optimal)
        fail(Status::Internal, "null space LP did not reach an optimum");
      if (sol.objective < 1.0 + kTol.nsp_margin) {
        report.verdict = PropertyReport::Verdict::CertifiedFails;
        report.value = sol.objective;
        report.witness.assign(d, 0.0);
        for (std::size_t j = 0; j < d; ++j) {
          double z = 0.0;
          for (std::size_t c = 0; c < r; ++c) z += kernel.at(j, c) * sol.x[c];
          report.witness[j] = z;
        }
        report.witness_support = t;
        report.witness_signs = signs;
        return false;
      }
    }
    return true;
  });
  return report;
}

RnspConstants rnsp_from_rip(double delta) {
  const double limit = 4.0 / std::sqrt(41.0);
  if (delta < 0.0 || delta >= limit)
    fail(Status::BadArgs, "delta must lie in [0, 4/sqrt(41)) for the transfer");
  double denom = std::sqrt(1.0 - delta * delta) - delta / 4.0;
  return {delta / denom, std::sqrt(1.0 + delta) / denom};
}

namespace {

double lq_norm(const Vector& v, int q) {
  if (q == 1) return norm1(v);
  return norm2(v);
}

// Best-support membership test for the cone: |v_T|_q >= (rho / k^{1-1/q}) |v_{T^c}|_1
// with T the top-k magnitudes.
bool in_cone(const Vector& v, std::size_t k, double rho, int q) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + std::ptrdiff_t(k), idx.end(),
                    [&](std::size_t i, std::size_t j) { return std::fabs(v[i]) > std::fabs(v[j]); });
  double head_q = 0.0;
  double tail_1 = 0.0;
  std::vector<bool> in_t(v.size(), false);
  for (std::size_t i = 0; i < k; ++i) in_t[idx[i]] = true;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (in_t[j]) head_q += (q == 1) ? std::fabs(v[j]) : v[j] * v[j];
    else tail_1 += std::fabs(v[j]);
  }
  if (q == 2) head_q = std::sqrt(head_q);
  double factor = rho / std::pow(double(k), 1.0 - 1.0 / double(q));
  return head_q >= factor * tail_1 - 1e-12;
}

}  // namespace

PropertyReport rnsp_star_estimate(const Frame& f, std::size_t k, double rho, int q,
                                  std::size_t trials, std::uint64_t seed) {
  if (q != 1 && q != 2) fail(Status::BadArgs, "q must be 1 or 2");
  if (rho <= 0.0) fail(Status::BadArgs, "rho must be positive");
  if (trials == 0) fail(Status::BadArgs, "trials must be positive");
  const std::size_t n = f.n();
  if (k == 0 || k > n) fail(Status::BadArgs, "order k must lie in [1, n]");

  PropertyReport report;
  report.property = "rnsp-star";
  report.params["k"] = double(k);
  report.params["rho"] = rho;
  report.params["q"] = double(q);
  report.trials = trials;
  report.verdict = PropertyReport::Verdict::Estimate;

  // Degenerate screen: a kernel vector inside the cone drives the infimum to 0.
  DenseMatrix kernel = kernel_basis(f.matrix);
  for (std::size_t c = 0; c < kernel.cols(); ++c) {
    Vector v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = kernel.at(j, c);
    double nrm = lq_norm(v, q);
    if (nrm <= 0.0) continue;
    for (double& e : v) e /= nrm;
    if (in_cone(v, k, rho, q)) {
      report.value = std::numeric_limits<double>::infinity();
      report.reason = "RNSP* likely fails: kernel vector lies in the cone";
      report.witness = v;
      return report;
    }
  }

  double min_image = std::numeric_limits<double>::infinity();
  Vector argmin;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng(substream_seed(seed, trial));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + rng.below(n - i);
      std::swap(idx[i], idx[j]);
    }
    Vector v(n, 0.0);
    for (std::size_t i = 0; i < k; ++i) v[idx[i]] = rng.normal();
    Vector head(v);
    double head_norm = lq_norm(head, q);
    if (head_norm <= 0.0) continue;

    Vector tail(n, 0.0);
    double tail_1 = 0.0;
    for (std::size_t i = k; i < n; ++i) {
      tail[idx[i]] = rng.normal();
      tail_1 += std::fabs(tail[idx[i]]);
    }
    double budget = head_norm * std::pow(double(k), 1.0 - 1.0 / double(q)) / rho;
    double fill = (trial % 2 == 0) ? 1.0 : rng.uniform();  // saturate or stay interior
    if (tail_1 > 0.0) {
      double s = budget * fill / tail_1;
      for (double& e : tail) e *= s;
    }
    for (std::size_t j = 0; j < n; ++j) v[j] += tail[j];
    double nrm = lq_norm(v, q);
    for (double& e : v) e /= nrm;

    double image = norm2(matvec(f.matrix, v));
    if (image < min_image) {
      min_image = image;
      argmin = v;
    }
  }

  if (!std::isfinite(min_image) || min_image <= 1e-12) {
    report.value = std::numeric_limits<double>::infinity();
    report.reason = "RNSP* likely fails";
    report.witness = argmin;
    return report;
  }
  report.value = 1.0 / min_image;  // tau-hat, a lower bound on any valid tau
  report.witness = argmin;
  return report;
}

RipResult f_rip_constant_exact(const DenseMatrix& a, const Frame& f, std::size_t k, long long cap) {
  if (a.cols() != f.d()) fail(Status::BadArgs, "sensing and frame dimensions disagree");
  if (k == 0 || k > f.n()) fail(Status::BadArgs, "order k must lie in [1, n]");

  DenseMatrix af = matmul(a, f.matrix);
  RipResult result{0.0, {}};
  bool first = true;
  bool completed = for_each_subset(f.n(), k, cap, [&](const std::vector<std::size_t>& t) {
    DenseMatrix ft = select_columns(f.matrix, t);
    DenseMatrix aft = select_columns(af, t);
    double max_abs = 0.0;
    for (double v : ft.storage()) max_abs = std::max(max_abs, std::fabs(v));
    if (max_abs <= 1e-14) return true;  // F_T = 0 constrains nothing
    GeneralizedEigExtremes ext =
        generalized_eig_psd(matmul(transpose(aft), aft), matmul(transpose(ft), ft));
    double dev = std::max(ext.max_value - 1.0, 1.0 - ext.min_value);
    if (first || dev > result.delta) {
      result.delta = dev;
      result.witness_support = t;
      first = false;
    }
    return true;
  });
  if (!completed) fail(Status::NotChecked, "support count exceeds enumeration cap");
  if (first) fail(Status::BadArgs, "frame has no nonzero support of this order");
  return result;
}

PropertyReport f_nsp_check(const DenseMatrix& a, const Frame& f, std::size_t k, long long cap) {
  if (a.cols() != f.d()) fail(Status::BadArgs, "sensing and frame dimensions disagree");

  bool certified_full_spark = false;
  if (f.full_spark.has_value()) {
    certified_full_spark = *f.full_spark;
  } else {
    SparkReport spark = is_full_spark(f, cap);
    certified_full_spark = spark.verdict == SparkReport::Verdict::FullSpark;
    if (spark.verdict == SparkReport::Verdict::NotChecked) {
      PropertyReport report;
      report.property = "f-nsp";
      report.params["k"] = double(k);
      report.verdict = PropertyReport::Verdict::NotChecked;
      report.reason = "full spark not certified: " + spark.reason;
      return report;
    }
  }
  if (!certified_full_spark) {
    PropertyReport report;
    report.property = "f-nsp";
    report.params["k"] = double(k);
    report.verdict = PropertyReport::Verdict::NotChecked;
    report.reason = "frame is not full spark; the coefficient-space equivalence needs full spark";
    return report;
  }

  PropertyReport report = nsp_check_exact(matmul(a, f.matrix), k, cap);
  report.property = "f-nsp";
  return report;
}

PropertyReport quotient_estimate(const DenseMatrix& a, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) fail(Status::BadArgs, "trials must be positive");
  const std::size_t m = a.rows();
  const std::size_t d = a.cols();
  if (svd(a).rank < m) fail(Status::BadArgs, "matrix must be surjective (rank m)");

  double k_star = double(m) / std::log(std::exp(1.0) * double(d) / double(m));
  Frame row_space = make_frame(a);  // A spans R^m, so the preimage LP is the F-norm LP

  double alpha_hat = 0.0;
  Vector arg;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng(substream_seed(seed, trial));
    Vector y(m);
    for (double& e : y) e = rng.normal();
    double nrm = norm2(y);
    if (nrm <= 0.0) continue;
    for (double& e : y) e /= nrm;
    double value = f_norm(row_space, y).value / std::sqrt(k_star);
    if (value > alpha_hat) {
      alpha_hat = value;
      arg = y;
    }
  }

  PropertyReport report;
  report.property = "quotient";
  report.params["k_star"] = k_star;
  report.verdict = PropertyReport::Verdict::Estimate;
  report.value = alpha_hat;
  report.trials = trials;
  report.witness = arg;
  return report;
}

PropertyReport rwp_falsify(const DenseMatrix& a, std::size_t k, double c0, double c1,
                           std::size_t trials, std::uint64_t seed) {
  if (trials == 0) fail(Status::BadArgs, "trials must be positive");
  if (k == 0) fail(Status::BadArgs, "order k must be positive");
  if (c0 <= 0.0 || c1 <= 0.0) fail(Status::BadArgs, "constants must be positive");
  const std::size_t d = a.cols();

  PropertyReport report;
  report.property = "rwp";
  report.params["k"] = double(k);
  report.params["c0"] = c0;
  report.params["c1"] = c1;
  report.trials = trials;

  DenseMatrix kernel = kernel_basis(a);
  const std::size_t r = kernel.cols();
  double sparse_factor = c0 / std::sqrt(double(k));

  double best_margin = -std::numeric_limits<double>::infinity();
  auto consider = [&](const Vector& z) {
    double n2 = norm2(z);
    if (n2 <= 0.0) return;
    double near_kernel = c1 * n2 - norm2(matvec(a, z));  // > 0 required
    double spread = n2 - sparse_factor * norm1(z);       // > 0 required
    double margin = std::min(near_kernel, spread);
    if (margin > best_margin) {
      best_margin = margin;
      report.witness = z;
    }
  };

  for (std::size_t c = 0; c < r; ++c) {
    Vector z(d);
    for (std::size_t j = 0; j < d; ++j) z[j] = kernel.at(j, c);
    consider(z);
  }
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng(substream_seed(seed, trial));
    Vector z(d, 0.0);
    if (r > 0 && trial % 3 != 2) {
      Vector coeff(r);
      for (double& e : coeff) e = rng.normal();
      for (std::size_t j = 0; j < d; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < r; ++c) s += kernel.at(j, c) * coeff[c];
        z[j] = s;
      }
      if (trial % 3 == 1) {
        double scale = 0.1 * norm2(z);
        for (double& e : z) e += scale * rng.normal();
      }
    } else {
      for (double& e : z) e = rng.normal();
    }
    consider(z);
  }

  if (best_margin > 0.0) {
    report.verdict = PropertyReport::Verdict::CertifiedFails;
    report.value = best_margin;
    // Witness must replay: both defining inequalities strict on re-evaluation.
    const Vector& z = report.witness;
    bool replay = norm2(matvec(a, z)) < c1 * norm2(z) && norm2(z) > sparse_factor * norm1(z);
    if (!replay) fail(Status::Internal, "witness failed to reproduce the violation");
    return report;
  }
  report.verdict = PropertyReport::Verdict::Estimate;
  report.value = best_margin;
  report.reason = "no violation in " + std::to_string(trials) + " trials";
  report.witness.clear();
  return report;
}

NspBreak nsp_breaking_diagonal(const DenseMatrix& b, std::size_t k) {
  const std::size_t d = b.cols();
  if (k == 0 || k >= d) fail(Status::BadArgs, "order k must lie in [1, cols)");
  DenseMatrix kernel = kernel_basis(b);
  const std::size_t r = kernel.cols();
  if (r == 0) fail(Status::BadArgs, "kernel is trivial, no diagonal can break the property");

  auto try_vector = [&](const Vector& v, NspBreak& out) {
    // T = the k smallest nonzero magnitudes of v; require 0 < |v_T|_1 < |v_{T^c}|_1.
    std::vector<std::size_t> nonzero;
    for (std::size_t j = 0; j < d; ++j)
      if (std::fabs(v[j]) > 1e-12) nonzero.push_back(j);
    if (nonzero.size() <= k) return false;
    std::sort(nonzero.begin(), nonzero.end(), [&](std::size_t i, std::size_t j) {
      double di = std::fabs(v[i]), dj = std::fabs(v[j]);
      if (di != dj) return di < dj;
      return i < j;
    });
    std::vector<std::size_t> t(nonzero.begin(), nonzero.begin() + std::ptrdiff_t(k));
    std::sort(t.begin(), t.end());
    std::vector<bool> in_t(d, false);
    for (std::size_t j : t) in_t[j] = true;
    double head = 0.0, tail = 0.0;
    for (std::size_t j = 0; j < d; ++j) (in_t[j] ? head : tail) += std::fabs(v[j]);
    if (head <= 0.0 || head >= tail) return false;

    out.support = t;
    out.diagonal.assign(d, 1.0);
    out.witness.assign(d, 0.0);
    double dval = head / (tail + 1.0);
    double wscale = (tail + 1.0) / head;
    for (std::size_t j = 0; j < d; ++j) {
      if (in_t[j]) {
        out.diagonal[j] = dval;
        out.witness[j] = wscale * v[j];
      } else {
        out.witness[j] = v[j];
      }
    }
    return true;
  };

  NspBreak out;
  bool found = false;
  for (std::size_t c = 0; c < r && !found; ++c) {
    Vector v(d);
    for (std::size_t j = 0; j < d; ++j) v[j] = kernel.at(j, c);
    found = try_vector(v, out);
  }
  if (!found) {
    Rng rng(0x5eedu);
    for (int attempt = 0; attempt < 64 && !found; ++attempt) {
      Vector coeff(r);
      for (double& e : coeff) e = rng.normal();
      Vector v(d, 0.0);
      for (std::size_t j = 0; j < d; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < r; ++c) s += kernel.at(j, c) * coeff[c];
        v[j] = s;
      }
      found = try_vector(v, out);
    }
  }
  if (!found)
    fail(Status::BadArgs,
         "no kernel vector with 0 < |v_T|_1 < |v_{T^c}|_1 found; the construction needs a "
         "kernel vector with more than k nonzeros and spread-out mass");

  // Replay the construction's guarantees before returning.
  Vector dw(d);
  for (std::size_t j = 0; j < d; ++j) dw[j] = out.diagonal[j] * out.witness[j];
  Vector image = matvec(b, dw);
  double scale = std::max(1.0, norm2(dw));
  if (norm2(image) > kTol.lemma_identity * scale)
    fail(Status::Internal, "witness left the kernel of BD");
  double head = 0.0, tail = 0.0;
  std::vector<bool> in_t(d, false);
  for (std::size_t j : out.support) in_t[j] = true;
  for (std::size_t j = 0; j < d; ++j) (in_t[j] ? head : tail) += std::fabs(out.witness[j]);
  if (std::fabs(head - tail - 1.0) > kTol.lemma_identity)
    fail(Status::Internal, "witness mass identity violated");
  return out;
}

}  // namespace fsl
