#pragma once

#include <cstdint>

#include "fsl/common.hpp"

namespace fsl {

// xoshiro256++ with splitmix64 seeding. Hand-rolled because the output must be
// a pure function of the seed bytes: std::* distributions are allowed to
// round differently across standard libraries, which would break the
// bit-identical reproducibility contract.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
    have_spare_ = false;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0,1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1): rejects exact zero so log() stays finite.
  double uniform_pos() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  double normal();                         // Box-Muller, cached spare
  double exponential();                    // rate 1, inversion
  double laplace();                        // variance 1
  double rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }
  double weibull_symmetric(double shape);  // mean 0, variance 1
  double student_t(int degrees);           // raw t, finite variance needs degrees >= 3
  double student_t_unit(int degrees);      // standardized to variance 1
  std::uint64_t below(std::uint64_t bound);  // uniform on [0, bound), unbiased

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace fsl
