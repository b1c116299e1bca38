#include "fsl/rng.hpp"

#include <cmath>

namespace fsl {

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller on (0,1) uniforms; trig form keeps the draw count fixed at two
  // uniforms per pair, which substream reproducibility relies on.
  const double u1 = uniform_pos();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

double Rng::exponential() { return -std::log(uniform_pos()); }

double Rng::laplace() {
  // difference of two exponentials has variance 2; scale to variance 1
  return (exponential() - exponential()) / std::sqrt(2.0);
}

double Rng::weibull_symmetric(double shape) {
  if (!(shape >= 1.0 && shape <= 2.0)) fail(Status::BadArgs, "weibull shape must be in [1,2]");
  // random sign times Weibull(shape) magnitude, centered by symmetry, scaled
  // to unit variance: E X^2 = Gamma(1 + 2/shape) for scale-1 Weibull.
  const double mag = std::pow(exponential(), 1.0 / shape);
  const double second_moment = std::tgamma(1.0 + 2.0 / shape);
  return rademacher() * mag / std::sqrt(second_moment);
}

double Rng::student_t(int degrees) {
  if (degrees < 3) fail(Status::BadArgs, "student-t degrees must be >= 3");
  const double z = normal();
  double chi2 = 0.0;
  for (int i = 0; i < degrees; ++i) {
    const double g = normal();
    chi2 += g * g;
  }
  return z / std::sqrt(chi2 / static_cast<double>(degrees));
}

double Rng::student_t_unit(int degrees) {
  // variance of t_K is K/(K-2)
  return student_t(degrees) / std::sqrt(static_cast<double>(degrees) / (degrees - 2.0));
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) fail(Status::BadArgs, "below(0)");
  const std::uint64_t limit = ~0ULL - (~0ULL % bound);
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % bound;
}

}  // namespace fsl
