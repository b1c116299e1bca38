#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "fsl/frames.hpp"
#include "fsl/matrix.hpp"

namespace fsl {

struct PropertyReport {
  enum class Verdict { CertifiedHolds, CertifiedFails, Estimate, NotChecked };

  std::string property;
  Verdict verdict = Verdict::NotChecked;
  double value = 0.0;  // mu, delta, tau-hat, alpha-hat, margin, as applicable
  std::map<std::string, double> params;
  Vector witness;
  std::vector<std::size_t> witness_support;
  Vector witness_signs;
  std::size_t trials = 0;
  std::string reason;
};

std::string report_to_json(const PropertyReport& report);
std::string verdict_name(PropertyReport::Verdict verdict);

double coherence(const DenseMatrix& a);

struct RipResult {
  double delta;
  std::vector<std::size_t> witness_support;  // support attaining the extreme deviation
};

RipResult rip_constant_exact(const DenseMatrix& a, std::size_t k,
                             long long cap = kTol.enumeration_cap);

// Global extremes of the restricted Rayleigh quotients over all supports of
// size k: the smallest lambda_min and largest lambda_max of the k-column Gram
// matrices (generalized against F_T^T F_T in the frame variant). Scaling A by
// c = sqrt(2 / (max + min)) minimizes the resulting isometry constant.
struct SpectrumExtremes {
  double min_value;
  double max_value;
};

SpectrumExtremes rip_gram_extremes(const DenseMatrix& a, std::size_t k,
                                   long long cap = kTol.enumeration_cap);
SpectrumExtremes f_rip_gram_extremes(const DenseMatrix& a, const Frame& f, std::size_t k,
                                     long long cap = kTol.enumeration_cap);

// Exact null space property check of order k by support/sign LP enumeration.
PropertyReport nsp_check_exact(const DenseMatrix& a, std::size_t k,
                               long long cap = kTol.enumeration_cap);

struct RnspConstants {
  double rho;
  double tau;
};

// Robust null space constants implied by a restricted isometry constant delta,
// valid for delta < 4/sqrt(41).
RnspConstants rnsp_from_rip(double delta);

PropertyReport rnsp_star_estimate(const Frame& f, std::size_t k, double rho, int q,
                                  std::size_t trials, std::uint64_t seed);

RipResult f_rip_constant_exact(const DenseMatrix& a, const Frame& f, std::size_t k,
                               long long cap = kTol.enumeration_cap);

PropertyReport f_nsp_check(const DenseMatrix& a, const Frame& f, std::size_t k,
                           long long cap = kTol.enumeration_cap);

PropertyReport quotient_estimate(const DenseMatrix& a, std::size_t trials, std::uint64_t seed);

PropertyReport rwp_falsify(const DenseMatrix& a, std::size_t k, double c0, double c1,
                           std::size_t trials, std::uint64_t seed);

struct NspBreak {
  Vector diagonal;                   // entries of D, 1 off the chosen support
  Vector witness;                    // w with BDw = 0 and |w_T|_1 - |w_{T^c}|_1 = 1
  std::vector<std::size_t> support;  // chosen T
};

NspBreak nsp_breaking_diagonal(const DenseMatrix& b, std::size_t k);

}  // namespace fsl
