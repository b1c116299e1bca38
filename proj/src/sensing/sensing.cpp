#include "fsl/sensing.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace fsl {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate(const EnsembleSpec& spec) {
  if (spec.m == 0 || spec.d == 0) fail(Status::BadArgs, "ensemble dims must be positive");
  switch (spec.family) {
    case EnsembleFamily::Weibull:
      if (spec.weibull_shape < 1.0 || spec.weibull_shape > 2.0)
        fail(Status::BadArgs, "weibull shape must lie in [1, 2]");
      break;
    case EnsembleFamily::StudentT:
      if (spec.student_degrees < 3) fail(Status::BadArgs, "student-t degrees must be >= 3");
      break;
    case EnsembleFamily::PartialCirculant:
      if (spec.m > spec.d) fail(Status::BadArgs, "circulant subsampling needs m <= d");
      if (spec.generator_vector.empty()) {
        if (!spec.generator) fail(Status::BadArgs, "circulant spec needs a generator");
        switch (spec.generator->family) {
          case EnsembleFamily::PartialCirculant:
          case EnsembleFamily::SubsampledDct:
          case EnsembleFamily::UniformSphereRows:
            fail(Status::BadArgs, "circulant generator must be an iid entry family");
          default:
            break;
        }
      } else if (spec.generator_vector.size() != spec.d) {
        fail(Status::BadArgs, "circulant generator length must equal d");
      }
      if (!spec.omega.empty()) {
        if (spec.omega.size() != spec.m) fail(Status::BadArgs, "omega size must equal m");
        for (std::size_t i : spec.omega)
          if (i >= spec.d) fail(Status::BadArgs, "omega index out of range");
      }
      break;
    case EnsembleFamily::SubsampledDct:
      if (spec.m > spec.d) fail(Status::BadArgs, "dct subsampling needs m <= d");
      if (!spec.rows.empty()) {
        if (spec.rows.size() != spec.m) fail(Status::BadArgs, "row list size must equal m");
        for (std::size_t i : spec.rows)
          if (i >= spec.d) fail(Status::BadArgs, "row index out of range");
      }
      break;
    default:
      break;
  }
}

double iid_entry(const EnsembleSpec& spec, Rng& rng) {
  switch (spec.family) {
    case EnsembleFamily::Gaussian:
      return rng.normal();
    case EnsembleFamily::Rademacher:
      return rng.rademacher();
    case EnsembleFamily::Laplace:
      return rng.laplace();
    case EnsembleFamily::Weibull:
      return rng.weibull_symmetric(spec.weibull_shape);
    case EnsembleFamily::StudentT:
      return rng.student_t_unit(spec.student_degrees);
    default:
      fail(Status::Internal, "not an iid entry family");
  }
}

bool is_iid_family(EnsembleFamily family) {
  switch (family) {
    case EnsembleFamily::Gaussian:
    case EnsembleFamily::Rademacher:
    case EnsembleFamily::Laplace:
    case EnsembleFamily::Weibull:
    case EnsembleFamily::StudentT:
      return true;
    default:
      return false;
  }
}

// Row of the unit sphere scaled by sqrt(d) so rows are isotropic (E a a^T = I).
Vector sphere_row(std::size_t d, Rng& rng) {
  Vector row(d);
  double nrm2 = 0.0;
  for (double& v : row) {
    v = rng.normal();
    nrm2 += v * v;
  }
  if (nrm2 <= 0.0) fail(Status::Internal, "degenerate sphere draw");
  double scale = std::sqrt(double(d) / nrm2);
  for (double& v : row) v *= scale;
  return row;
}

Vector circulant_generator(const EnsembleSpec& spec, Rng& rng) {
  if (!spec.generator_vector.empty()) return spec.generator_vector;
  Vector c(spec.d);
  for (double& v : c) v = iid_entry(*spec.generator, rng);
  return c;
}

std::vector<std::size_t> draw_without_replacement(std::size_t population, std::size_t count,
                                                  Rng& rng) {
  std::vector<std::size_t> idx(population);
  for (std::size_t i = 0; i < population; ++i) idx[i] = i;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + rng.below(population - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  return idx;
}

// Orthonormal DCT-II row i evaluated at column j.
double dct_entry(std::size_t d, std::size_t i, std::size_t j) {
  double scale = (i == 0) ? std::sqrt(1.0 / double(d)) : std::sqrt(2.0 / double(d));
  return scale * std::cos(kPi * (2.0 * double(j) + 1.0) * double(i) / (2.0 * double(d)));
}

}  // namespace

std::string family_name(EnsembleFamily family) {
  switch (family) {
    case EnsembleFamily::Gaussian: return "gaussian";
    case EnsembleFamily::Rademacher: return "rademacher";
    case EnsembleFamily::UniformSphereRows: return "uniform-sphere-rows";
    case EnsembleFamily::Laplace: return "laplace";
    case EnsembleFamily::Weibull: return "weibull";
    case EnsembleFamily::StudentT: return "student-t";
    case EnsembleFamily::PartialCirculant: return "partial-circulant";
    case EnsembleFamily::SubsampledDct: return "subsampled-dct";
  }
  fail(Status::Internal, "unknown family");
}

EnsembleFamily family_from_name(const std::string& name) {
  if (name == "gaussian") return EnsembleFamily::Gaussian;
  if (name == "rademacher") return EnsembleFamily::Rademacher;
  if (name == "uniform-sphere-rows") return EnsembleFamily::UniformSphereRows;
  if (name == "laplace") return EnsembleFamily::Laplace;
  if (name == "weibull") return EnsembleFamily::Weibull;
  if (name == "student-t") return EnsembleFamily::StudentT;
  if (name == "partial-circulant") return EnsembleFamily::PartialCirculant;
  if (name == "subsampled-dct") return EnsembleFamily::SubsampledDct;
  fail(Status::BadArgs, "unknown ensemble family: " + name);
}

namespace {

nlohmann::json spec_to_json_obj(const EnsembleSpec& spec) {
  nlohmann::json j;
  j["family"] = family_name(spec.family);
  j["m"] = spec.m;
  j["d"] = spec.d;
  j["seed"] = spec.seed;
  j["normalization"] =
      spec.normalization == Normalization::RowsByInvSqrtM ? "rows-by-inv-sqrt-m" : "none";
  if (spec.family == EnsembleFamily::Weibull) j["weibull_shape"] = spec.weibull_shape;
  if (spec.family == EnsembleFamily::StudentT) j["student_degrees"] = spec.student_degrees;
  if (spec.family == EnsembleFamily::PartialCirculant) {
    if (!spec.generator_vector.empty()) j["generator_vector"] = spec.generator_vector;
    else if (spec.generator) j["generator"] = spec_to_json_obj(*spec.generator);
    if (!spec.omega.empty()) j["omega"] = spec.omega;
  }
  if (spec.family == EnsembleFamily::SubsampledDct && !spec.rows.empty()) j["rows"] = spec.rows;
  return j;
}

EnsembleSpec spec_from_json_obj(const nlohmann::json& j) {
  EnsembleSpec spec;
  spec.family = family_from_name(j.at("family").get<std::string>());
  spec.m = j.at("m").get<std::size_t>();
  spec.d = j.at("d").get<std::size_t>();
  spec.seed = j.value("seed", std::uint64_t{0});
  std::string norm = j.value("normalization", std::string("none"));
  if (norm == "rows-by-inv-sqrt-m") spec.normalization = Normalization::RowsByInvSqrtM;
  else if (norm == "none") spec.normalization = Normalization::None;
  else fail(Status::BadArgs, "unknown normalization: " + norm);
  spec.weibull_shape = j.value("weibull_shape", spec.weibull_shape);
  spec.student_degrees = j.value("student_degrees", spec.student_degrees);
  if (j.contains("generator_vector"))
    spec.generator_vector = j.at("generator_vector").get<Vector>();
  if (j.contains("generator"))
    spec.generator = std::make_shared<EnsembleSpec>(spec_from_json_obj(j.at("generator")));
  if (j.contains("omega")) spec.omega = j.at("omega").get<std::vector<std::size_t>>();
  if (j.contains("rows")) spec.rows = j.at("rows").get<std::vector<std::size_t>>();
  return spec;
}

}  // namespace

std::string ensemble_spec_to_json(const EnsembleSpec& spec) {
  return spec_to_json_obj(spec).dump();
}

EnsembleSpec ensemble_spec_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  EnsembleSpec spec = spec_from_json_obj(j);
  validate(spec);
  return spec;
}

Vector sample_row(const EnsembleSpec& spec, Rng& rng) {
  validate(spec);
  if (is_iid_family(spec.family)) {
    Vector row(spec.d);
    for (double& v : row) v = iid_entry(spec, rng);
    return row;
  }
  if (spec.family == EnsembleFamily::UniformSphereRows) return sphere_row(spec.d, rng);
  if (spec.family == EnsembleFamily::PartialCirculant) {
    Vector c = circulant_generator(spec, rng);
    std::size_t shift = rng.below(spec.d);
    Vector row(spec.d);
    for (std::size_t j = 0; j < spec.d; ++j) row[j] = c[(shift + spec.d - j) % spec.d];
    return row;
  }
  // SubsampledDct: a uniformly chosen orthonormal DCT row, scaled to isotropy.
  std::size_t i = rng.below(spec.d);
  Vector row(spec.d);
  double scale = std::sqrt(double(spec.d));
  for (std::size_t j = 0; j < spec.d; ++j) row[j] = scale * dct_entry(spec.d, i, j);
  return row;
}

DenseMatrix sample(const EnsembleSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  DenseMatrix a(spec.m, spec.d);

  if (is_iid_family(spec.family)) {
    for (std::size_t i = 0; i < spec.m; ++i)
      for (std::size_t j = 0; j < spec.d; ++j) a.at(i, j) = iid_entry(spec, rng);
  } else if (spec.family == EnsembleFamily::UniformSphereRows) {
    for (std::size_t i = 0; i < spec.m; ++i) {
      Vector row = sphere_row(spec.d, rng);
      for (std::size_t j = 0; j < spec.d; ++j) a.at(i, j) = row[j];
    }
  } else if (spec.family == EnsembleFamily::PartialCirculant) {
    Vector c = circulant_generator(spec, rng);
    std::vector<std::size_t> omega =
        spec.omega.empty() ? draw_without_replacement(spec.d, spec.m, rng) : spec.omega;
    // Row i of the circulant is (z * c)_i = sum_j c[(i - j) mod d] z_j.
    for (std::size_t r = 0; r < spec.m; ++r) {
      std::size_t i = omega[r];
      for (std::size_t j = 0; j < spec.d; ++j) a.at(r, j) = c[(i + spec.d - j) % spec.d];
    }
  } else {  // SubsampledDct
    std::vector<std::size_t> rows =
        spec.rows.empty() ? draw_without_replacement(spec.d, spec.m, rng) : spec.rows;
    double scale = std::sqrt(double(spec.d));
    for (std::size_t r = 0; r < spec.m; ++r)
      for (std::size_t j = 0; j < spec.d; ++j) a.at(r, j) = scale * dct_entry(spec.d, rows[r], j);
  }

  if (spec.normalization == Normalization::RowsByInvSqrtM) {
    double inv = 1.0 / std::sqrt(double(spec.m));
    for (std::size_t i = 0; i < spec.m; ++i)
      for (std::size_t j = 0; j < spec.d; ++j) a.at(i, j) *= inv;
  }
  return a;
}

SmallBallEstimate small_ball_estimate(const EnsembleSpec& spec, const DirectionSampler& directions,
                                      double u, std::size_t trials, std::uint64_t seed) {
  validate(spec);
  if (trials == 0) fail(Status::BadArgs, "trials must be positive");
  if (u < 0.0) fail(Status::BadArgs, "threshold u must be nonnegative");
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(substream_seed(seed, t));
    Vector phi = sample_row(spec, rng);
    Vector x = directions(rng);
    if (x.size() != spec.d) fail(Status::BadArgs, "direction dimension mismatch");
    if (std::fabs(dot(phi, x)) >= u) ++hits;
  }
  SmallBallEstimate est;
  est.u = u;
  est.c_hat = double(hits) / double(trials);
  est.trials = trials;
  est.confidence_radius = std::sqrt(std::log(2.0 / kTol.hoeffding_delta) / (2.0 * double(trials)));
  return est;
}

namespace {

double top_k_l2(const Vector& v, std::size_t k) {
  std::vector<double> mags(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) mags[i] = std::fabs(v[i]);
  if (k > mags.size()) k = mags.size();
  std::partial_sort(mags.begin(), mags.begin() + std::ptrdiff_t(k), mags.end(),
                    std::greater<double>());
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += mags[i] * mags[i];
  return std::sqrt(s);
}

}  // namespace

WidthEstimate empirical_mean_width(const EnsembleSpec& spec, const SetDescription& set,
                                   std::size_t trials, std::uint64_t seed) {
  validate(spec);
  if (trials == 0) fail(Status::BadArgs, "trials must be positive");
  if (set.kind == SetDescription::Kind::ConeSection && set.rho <= 0.0)
    fail(Status::BadArgs, "cone section needs rho > 0");
  if (set.kind == SetDescription::Kind::FrameImage) {
    if (set.frame == nullptr) fail(Status::BadArgs, "frame image set needs a frame");
    if (set.frame->d() != spec.d) fail(Status::BadArgs, "frame dimension mismatch");
  }

  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(substream_seed(seed, t));
    Vector v(spec.d, 0.0);
    // V = m^{-1/2} sum_i eps_i phi_i with fresh rows and Rademacher signs.
    for (std::size_t i = 0; i < spec.m; ++i) {
      Vector phi = sample_row(spec, rng);
      double eps = rng.rademacher();
      for (std::size_t j = 0; j < spec.d; ++j) v[j] += eps * phi[j];
    }
    double inv = 1.0 / std::sqrt(double(spec.m));
    for (double& e : v) e *= inv;

    double h = 0.0;
    switch (set.kind) {
      case SetDescription::Kind::SparseSphere:
        h = top_k_l2(v, set.k);
        break;
      case SetDescription::Kind::ConeSection:
        h = (2.0 + 1.0 / set.rho) * top_k_l2(v, set.k);
        break;
      case SetDescription::Kind::FrameImage:
        h = top_k_l2(matvec_t(set.frame->matrix, v), set.k);
        break;
    }
    sum += h;
    sum_sq += h * h;
  }
  WidthEstimate est;
  est.w_hat = sum / double(trials);
  est.trials = trials;
  double var = std::max(0.0, sum_sq / double(trials) - est.w_hat * est.w_hat);
  est.standard_error = std::sqrt(var / double(trials));
  return est;
}

MomentGrowthReport moment_growth_check(const EnsembleSpec& spec, int max_order,
                                       const std::vector<Vector>& directions, double lambda,
                                       double alpha, std::size_t trials, std::uint64_t seed) {
  validate(spec);
  if (max_order < 2 || max_order > 20)
    fail(Status::BadArgs, "moment order must lie in [2, 20]");
  if (trials == 0) fail(Status::BadArgs, "trials must be positive");
  if (lambda <= 0.0) fail(Status::BadArgs, "lambda must be positive");

  std::vector<Vector> dirs = directions;
  if (dirs.empty()) {
    for (std::size_t j = 0; j < spec.d; ++j) {
      Vector e(spec.d, 0.0);
      e[j] = 1.0;
      dirs.push_back(std::move(e));
    }
  }
  for (const Vector& a : dirs) {
    if (a.size() != spec.d) fail(Status::BadArgs, "direction dimension mismatch");
  }

  std::size_t orders = std::size_t(max_order) - 1;  // p = 2 .. max_order
  // moment_sums[dir][j] accumulates |<phi, a>|^(j + 2).
  std::vector<std::vector<double>> moment_sums(dirs.size(), std::vector<double>(orders, 0.0));
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(substream_seed(seed, t));
    Vector phi = sample_row(spec, rng);
    for (std::size_t di = 0; di < dirs.size(); ++di) {
      double g = std::fabs(dot(phi, dirs[di]));
      double pw = g * g;
      for (std::size_t j = 0; j < orders; ++j) {
        moment_sums[di][j] += pw;
        pw *= g;
      }
    }
  }

  MomentGrowthReport report;
  report.max_order = max_order;
  report.lambda = lambda;
  report.alpha = alpha;
  report.lp_norms.assign(orders, 0.0);
  for (std::size_t j = 0; j < orders; ++j) {
    double worst = 0.0;
    for (std::size_t di = 0; di < dirs.size(); ++di) {
      double lp = std::pow(moment_sums[di][j] / double(trials), 1.0 / double(j + 2));
      worst = std::max(worst, lp);
    }
    report.lp_norms[j] = worst;
  }

  report.pass = true;
  for (std::size_t j = 0; j < orders; ++j) {
    double p = double(j + 2);
    if (report.lp_norms[j] > lambda * std::pow(p, alpha) * (1.0 + kTol.moment_slack)) {
      report.pass = false;
      break;
    }
  }

  // Least-squares fit of log L_p = log(lambda) + alpha log(p).
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t used = 0;
  for (std::size_t j = 0; j < orders; ++j) {
    if (report.lp_norms[j] <= 0.0) continue;
    double x = std::log(double(j + 2));
    double y = std::log(report.lp_norms[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  if (used >= 2) {
    double denom = double(used) * sxx - sx * sx;
    report.fitted_alpha = (double(used) * sxy - sx * sy) / denom;
    report.fitted_lambda = std::exp((sy - report.fitted_alpha * sx) / double(used));
  } else {
    report.fitted_alpha = 0.0;
    report.fitted_lambda = *std::max_element(report.lp_norms.begin(), report.lp_norms.end());
  }
  return report;
}

}  // namespace fsl
