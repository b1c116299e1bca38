#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "fsl/frames.hpp"
#include "fsl/matrix.hpp"
#include "fsl/rng.hpp"

namespace fsl {

enum class EnsembleFamily {
  Gaussian,
  Rademacher,
  UniformSphereRows,
  Laplace,
  Weibull,
  StudentT,
  PartialCirculant,
  SubsampledDct,
};

enum class Normalization { RowsByInvSqrtM, None };

struct EnsembleSpec {
  EnsembleFamily family = EnsembleFamily::Gaussian;
  std::size_t m = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;
  Normalization normalization = Normalization::None;
  double weibull_shape = 1.5;  // in [1, 2]
  int student_degrees = 4;     // >= 3 so the variance exists

  // PartialCirculant: entry law of the length-d generator, or an explicit
  // generator vector (takes precedence when nonempty). omega lists the kept
  // rows; empty means draw m of them without replacement from the seed.
  std::shared_ptr<const EnsembleSpec> generator;
  Vector generator_vector;
  std::vector<std::size_t> omega;

  // SubsampledDct: kept row indices, same convention as omega.
  std::vector<std::size_t> rows;
};

std::string ensemble_spec_to_json(const EnsembleSpec& spec);
EnsembleSpec ensemble_spec_from_json(const std::string& text);
std::string family_name(EnsembleFamily family);
EnsembleFamily family_from_name(const std::string& name);

DenseMatrix sample(const EnsembleSpec& spec);

// One un-normalized measurement row a_i drawn from the ensemble's row law.
Vector sample_row(const EnsembleSpec& spec, Rng& rng);

struct SmallBallEstimate {
  double u;
  double c_hat;
  std::size_t trials;
  double confidence_radius;  // Hoeffding at delta = 0.01
};

using DirectionSampler = std::function<Vector(Rng&)>;

SmallBallEstimate small_ball_estimate(const EnsembleSpec& spec, const DirectionSampler& directions,
                                      double u, std::size_t trials, std::uint64_t seed);

struct SetDescription {
  enum class Kind { SparseSphere, ConeSection, FrameImage };
  Kind kind = Kind::SparseSphere;
  std::size_t k = 1;
  double rho = 1.0;            // ConeSection only
  const Frame* frame = nullptr;  // FrameImage only
};

struct WidthEstimate {
  double w_hat;
  std::size_t trials;
  double standard_error;
};

WidthEstimate empirical_mean_width(const EnsembleSpec& spec, const SetDescription& set,
                                   std::size_t trials, std::uint64_t seed);

struct MomentGrowthReport {
  int max_order;                 // K
  std::vector<double> lp_norms;  // entry j is the empirical L_p norm at p = j + 2
  double fitted_lambda;
  double fitted_alpha;
  double lambda;  // supplied bound
  double alpha;
  bool pass;
};

// directions: empty = canonical basis vectors; otherwise unit vectors to test.
MomentGrowthReport moment_growth_check(const EnsembleSpec& spec, int max_order,
                                       const std::vector<Vector>& directions, double lambda,
                                       double alpha, std::size_t trials, std::uint64_t seed);

}  // namespace fsl
