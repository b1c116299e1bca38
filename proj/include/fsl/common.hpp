#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fsl {

enum class Status : int {
  Ok = 0,
  BadArgs = 2,
  IoError = 3,
  CertifiedHolds = 0,
  CertifiedFails = 10,
  Estimate = 11,
  NotChecked = 12,
  DecodeOptimal = 0,
  DecodeMaxIter = 20,
  DecodeInfeasible = 21,
  AssertionFailed = 30,
  Internal = 70,
};

// Thrown for contract violations; the C API boundary maps it to a status code.
class Error : public std::runtime_error {
 public:
  Error(Status s, const std::string& msg) : std::runtime_error(msg), status_(s) {}
  Status status() const { return status_; }

 private:
  Status status_;
};

[[noreturn]] inline void fail(Status s, const std::string& msg) { throw Error(s, msg); }

// Every numeric tolerance in one place so code, tests, and docs agree.
struct Tolerances {
  double rank_rel = 1e-10;        // rank cutoff: rank_rel * max(rows,cols) * s_max
  double lp_feas = 1e-8;          // LP feasibility, absolute per row
  double lp_obj_rel = 1e-7;       // LP objective, relative
  double spark = 1e-10;           // full-spark singular value cutoff, times ||F||_2
  double parseval = 1e-9;         // FF^T = I entrywise
  double nsp_margin = 1e-9;       // NSP boundary: optimum > -nsp_margin counts as violation
  double witness_replay = 1e-9;   // certified witnesses reproduce within this
  double lemma_identity = 1e-8;   // |w_T|_1 - |w_Tc|_1 = 1
  double decode_feas_rel = 1e-6;  // feasibility residual, times max(1,||y||_2)
  double qcbp_primal_change = 1e-9;
  int qcbp_max_iter = 50000;
  long long enumeration_cap = 200000;
  double success_rel_err = 1e-4;  // phase-transition success threshold
  double hoeffding_delta = 0.01;  // small-ball confidence level
  double moment_slack = 0.2;      // moment-growth bound slack
};

inline constexpr Tolerances kTol{};

inline constexpr const char* kVersion = "0.1.0";

// splitmix64: seed expansion and substream hashing.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Order-independent per-task seed: hash(master, index). Stable across platforms.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL + index * 0xbf58476d1ce4e5b9ULL);
  splitmix64(s);
  return splitmix64(s);
}

// FNV-1a over bytes; used for config hashes in manifests.
inline std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

}  // namespace fsl
