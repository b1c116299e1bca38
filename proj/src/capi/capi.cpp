#include "fsl.h"

#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>

#include <json.hpp>

#include "fsl/common.hpp"
#include "fsl/decoders.hpp"
#include "fsl/experiments.hpp"
#include "fsl/frames.hpp"
#include "fsl/io.hpp"
#include "fsl/properties.hpp"
#include "fsl/sensing.hpp"

struct fsl_matrix {
  fsl::DenseMatrix m;
};

namespace {

thread_local std::string g_last_error;
thread_local int g_last_status = 0;

void set_error(const std::string& msg, int status) {
  g_last_error = msg;
  g_last_status = status;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out_json, const std::string& doc) {
  if (out_json != nullptr) *out_json = dup_string(doc);
}

int status_code(fsl::Status s) { return static_cast<int>(s); }

// Runs fn, translating exceptions into the exit-code vocabulary.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    g_last_status = 0;
    return fn();
  } catch (const fsl::Error& e) {
    set_error(e.what(), status_code(e.status()));
    return status_code(e.status());
  } catch (const nlohmann::json::exception& e) {
    set_error(std::string("malformed JSON: ") + e.what(), status_code(fsl::Status::BadArgs));
    return status_code(fsl::Status::BadArgs);
  } catch (const std::exception& e) {
    set_error(e.what(), status_code(fsl::Status::Internal));
    return status_code(fsl::Status::Internal);
  }
}

template <typename Fn>
fsl_matrix* guarded_matrix(Fn&& fn) {
  try {
    g_last_error.clear();
    g_last_status = 0;
    return new fsl_matrix{fn()};
  } catch (const fsl::Error& e) {
    set_error(e.what(), status_code(e.status()));
    return nullptr;
  } catch (const nlohmann::json::exception& e) {
    set_error(std::string("malformed JSON: ") + e.what(), status_code(fsl::Status::BadArgs));
    return nullptr;
  } catch (const std::exception& e) {
    set_error(e.what(), status_code(fsl::Status::Internal));
    return nullptr;
  }
}

fsl::MatrixFormat parse_format(const char* format) {
  std::string f = format == nullptr ? "auto" : format;
  if (f == "csv") return fsl::MatrixFormat::Csv;
  if (f == "bin") return fsl::MatrixFormat::Binary;
  fsl::fail(fsl::Status::BadArgs, "unknown matrix format: " + f);
}

std::string require_string(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_string())
    fsl::fail(fsl::Status::BadArgs, "missing required string argument: " + key);
  return j.at(key).get<std::string>();
}

std::size_t require_count(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_number())
    fsl::fail(fsl::Status::BadArgs, "missing required numeric argument: " + key);
  return j.at(key).get<std::size_t>();
}

double require_number(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_number())
    fsl::fail(fsl::Status::BadArgs, "missing required numeric argument: " + key);
  return j.at(key).get<double>();
}

std::uint64_t require_seed(const nlohmann::json& j) {
  if (!j.contains("seed") || !j.at("seed").is_number())
    fsl::fail(fsl::Status::BadArgs, "randomized check requires an explicit seed");
  return j.at("seed").get<std::uint64_t>();
}

fsl::DenseMatrix load_matrix_arg(const nlohmann::json& j, const std::string& key) {
  return fsl::read_matrix(require_string(j, key));
}

fsl::Frame load_frame_arg(const nlohmann::json& j) {
  // check accepts the frame as a matrix file; fall back to --matrix for
  // frame-only properties so `check split --matrix F.csv` works.
  if (j.contains("frame")) return fsl::make_frame(fsl::read_matrix(require_string(j, "frame")));
  return fsl::make_frame(load_matrix_arg(j, "matrix"));
}

fsl::Vector load_vector_arg(const nlohmann::json& j, const std::string& key) {
  fsl::DenseMatrix m = fsl::read_matrix(require_string(j, key));
  if (m.rows() != 1 && m.cols() != 1)
    fsl::fail(fsl::Status::BadArgs, key + " must be a one-row or one-column matrix file");
  return m.storage();
}

int verdict_code(fsl::PropertyReport::Verdict v) {
  switch (v) {
    case fsl::PropertyReport::Verdict::CertifiedHolds: return status_code(fsl::Status::CertifiedHolds);
    case fsl::PropertyReport::Verdict::CertifiedFails: return status_code(fsl::Status::CertifiedFails);
    case fsl::PropertyReport::Verdict::Estimate: return status_code(fsl::Status::Estimate);
    case fsl::PropertyReport::Verdict::NotChecked: return status_code(fsl::Status::NotChecked);
  }
  fsl::fail(fsl::Status::Internal, "unknown verdict");
}

int finish_report(const fsl::PropertyReport& report, char** out_json) {
  emit(out_json, fsl::report_to_json(report));
  return verdict_code(report.verdict);
}

int check_dispatch(const std::string& property, const nlohmann::json& args, char** out_json) {
  using Verdict = fsl::PropertyReport::Verdict;

  if (property == "coherence") {
    fsl::PropertyReport report;
    report.property = "coherence";
    report.verdict = Verdict::CertifiedHolds;
    report.value = fsl::coherence(load_matrix_arg(args, "matrix"));
    return finish_report(report, out_json);
  }

  if (property == "rip" || property == "f-rip") {
    fsl::DenseMatrix a = load_matrix_arg(args, "matrix");
    std::size_t k = require_count(args, "k");
    fsl::PropertyReport report;
    report.property = property;
    report.params["k"] = double(k);
    try {
      fsl::RipResult r = property == "rip"
                             ? fsl::rip_constant_exact(a, k)
                             : fsl::f_rip_constant_exact(a, load_frame_arg(args), k);
      report.verdict = Verdict::CertifiedHolds;
      report.value = r.delta;
      report.params["delta"] = r.delta;
      report.witness_support = r.witness_support;
    } catch (const fsl::Error& e) {
      if (e.status() != fsl::Status::NotChecked) throw;
      report.verdict = Verdict::NotChecked;
      report.reason = e.what();
    }
    return finish_report(report, out_json);
  }

  if (property == "nsp") {
    return finish_report(fsl::nsp_check_exact(load_matrix_arg(args, "matrix"),
                                              require_count(args, "k")),
                         out_json);
  }

  if (property == "f-nsp") {
    fsl::DenseMatrix a = load_matrix_arg(args, "matrix");
    return finish_report(fsl::f_nsp_check(a, load_frame_arg(args), require_count(args, "k")),
                         out_json);
  }

  if (property == "rnsp-from-rip") {
    fsl::PropertyReport report;
    report.property = "rnsp-from-rip";
    double delta;
    if (args.contains("delta")) {
      delta = require_number(args, "delta");
    } else {
      std::size_t k = require_count(args, "k");
      report.params["k"] = double(k);
      try {
        delta = fsl::rip_constant_exact(load_matrix_arg(args, "matrix"), k).delta;
      } catch (const fsl::Error& e) {
        if (e.status() != fsl::Status::NotChecked) throw;
        report.verdict = Verdict::NotChecked;
        report.reason = e.what();
        return finish_report(report, out_json);
      }
    }
    report.params["delta"] = delta;
    try {
      fsl::RnspConstants rt = fsl::rnsp_from_rip(delta);
      report.verdict = Verdict::CertifiedHolds;
      report.value = rt.rho;
      report.params["rho"] = rt.rho;
      report.params["tau"] = rt.tau;
    } catch (const fsl::Error& e) {
      if (e.status() != fsl::Status::BadArgs) throw;
      report.verdict = Verdict::NotChecked;
      report.reason = e.what();
    }
    return finish_report(report, out_json);
  }

  if (property == "rnsp-star") {
    fsl::Frame f = load_frame_arg(args);
    return finish_report(
        fsl::rnsp_star_estimate(f, require_count(args, "k"), require_number(args, "rho"),
                                int(args.value("q", 2)), args.value("trials", std::size_t{200}),
                                require_seed(args)),
        out_json);
  }

  if (property == "quotient") {
    return finish_report(fsl::quotient_estimate(load_matrix_arg(args, "matrix"),
                                                args.value("trials", std::size_t{200}),
                                                require_seed(args)),
                         out_json);
  }

  if (property == "rwp") {
    return finish_report(
        fsl::rwp_falsify(load_matrix_arg(args, "matrix"), require_count(args, "k"),
                         require_number(args, "c0"), require_number(args, "c1"),
                         args.value("trials", std::size_t{200}), require_seed(args)),
        out_json);
  }

  if (property == "split") {
    fsl::Frame f = load_frame_arg(args);
    std::size_t s = args.contains("s") ? require_count(args, "s") : require_count(args, "k");
    fsl::SplittabilityEstimate est =
        fsl::splittability_search(f, s, args.value("trials", std::size_t{200}), require_seed(args));
    fsl::PropertyReport report;
    report.property = "split";
    report.verdict = Verdict::Estimate;
    report.value = est.beta_upper;
    report.params["s"] = double(est.s);
    report.trials = est.trials;
    report.reason = est.has_witness ? "upper bound from a sampled violating pair"
                                    : "no sampled pair constrains the splitting constant";
    nlohmann::json doc = nlohmann::json::parse(fsl::report_to_json(report));
    if (est.has_witness) {
      doc["witness_x"] = est.witness_x;
      doc["witness_y"] = est.witness_y;
    }
    emit(out_json, doc.dump());
    return verdict_code(report.verdict);
  }

  fsl::fail(fsl::Status::BadArgs, "unknown property: " + property);
}

int decode_dispatch(const std::string& method, const nlohmann::json& args, char** out_json) {
  fsl::DenseMatrix a = load_matrix_arg(args, "matrix");
  fsl::Vector y = load_vector_arg(args, "y");
  double eta = args.value("eta", 0.0);
  if (eta < 0.0) fsl::fail(fsl::Status::BadArgs, "eta must be nonnegative");

  fsl::DecodeResult result;
  if (method == "bp" || method == "bp_eq") {
    result = fsl::basis_pursuit_eq(a, y);
  } else if (method == "qcbp") {
    result = fsl::qcbp(a, y, eta);
  } else if (method == "synthesis") {
    result = fsl::l1_synthesis(load_frame_arg(args), a, y, eta);
  } else if (method == "analysis") {
    result = fsl::l1_analysis(load_frame_arg(args), a, y, eta);
  } else {
    fsl::fail(fsl::Status::BadArgs, "unknown decode method: " + method);
  }
  emit(out_json, fsl::decode_result_to_json(result));
  switch (result.status) {
    case fsl::DecodeStatus::Optimal: return status_code(fsl::Status::DecodeOptimal);
    case fsl::DecodeStatus::MaxIter: return status_code(fsl::Status::DecodeMaxIter);
    case fsl::DecodeStatus::Infeasible: return status_code(fsl::Status::DecodeInfeasible);
  }
  fsl::fail(fsl::Status::Internal, "unknown decode status");
}

std::string resolve_out_dir(const char* out_dir) {
  if (out_dir != nullptr && out_dir[0] != '\0') return out_dir;
  const char* env = std::getenv("FSL_OUTPUT_DIR");
  if (env != nullptr && env[0] != '\0') return env;
  return ".";
}

int finish_experiment(const std::string& out_dir, const std::string& label,
                      const std::string& config_json, const std::string& result_json,
                      const std::string& csv_text, std::uint64_t seed, bool assertions_pass,
                      char** out_json) {
  fsl::ArtifactPaths paths = fsl::summarize(out_dir, label, config_json, result_json, csv_text, seed);
  nlohmann::json doc = nlohmann::json::parse(result_json);
  nlohmann::json artifacts;
  artifacts["json"] = paths.json_path;
  if (!paths.csv_path.empty()) artifacts["csv"] = paths.csv_path;
  artifacts["manifest"] = paths.manifest_path;
  doc["artifacts"] = artifacts;
  doc["assertions_pass"] = assertions_pass;
  emit(out_json, doc.dump());
  return assertions_pass ? status_code(fsl::Status::Ok) : status_code(fsl::Status::AssertionFailed);
}

int experiment_dispatch(const std::string& kind, const std::string& config_json,
                        const std::string& out_dir, char** out_json) {
  if (kind == "phase") {
    fsl::PhaseConfig cfg = fsl::phase_config_from_json(config_json);
    fsl::GridResult grid = fsl::run_phase_transition(cfg);
    return finish_experiment(out_dir, "phase", fsl::phase_config_to_json(cfg),
                             fsl::grid_result_to_json(grid), fsl::grid_result_to_csv(grid),
                             cfg.seed, true, out_json);
  }

  if (kind == "sweep") {
    fsl::SweepConfig cfg = fsl::sweep_config_from_json(config_json);
    fsl::SweepResult result = fsl::run_robustness_sweep(cfg);
    return finish_experiment(out_dir, "sweep", fsl::sweep_config_to_json(cfg),
                             fsl::sweep_result_to_json(result), fsl::sweep_result_to_csv(result),
                             cfg.seed, result.violations.empty(), out_json);
  }

  if (kind == "nsp-scaling") {
    fsl::LemmaScalingConfig cfg = fsl::lemma_config_from_json(config_json);
    fsl::LemmaScalingResult result = fsl::run_lemma_nsp_scaling(cfg);
    return finish_experiment(out_dir, "nsp-scaling", fsl::lemma_config_to_json(cfg),
                             fsl::lemma_result_to_json(result), fsl::lemma_result_to_csv(result),
                             cfg.seed, result.successes == result.trials.size(), out_json);
  }

  if (kind == "f-rip") {
    nlohmann::json j = nlohmann::json::parse(config_json);
    std::size_t d = require_count(j, "d");
    std::size_t n = require_count(j, "n");
    std::size_t k = require_count(j, "k");
    double delta_target = require_number(j, "delta_target");
    std::uint64_t seed = require_seed(j);
    std::size_t retry_budget = j.value("retry_budget", std::size_t{20});
    nlohmann::json canonical;
    canonical["schema"] = 1;
    canonical["d"] = d;
    canonical["n"] = n;
    canonical["k"] = k;
    canonical["delta_target"] = delta_target;
    canonical["seed"] = seed;
    canonical["retry_budget"] = retry_budget;
    fsl::DemoReport report = fsl::run_theorem_dripbad_demo(d, n, k, delta_target, seed, retry_budget);
    return finish_experiment(out_dir, "f-rip", canonical.dump(), fsl::demo_report_to_json(report),
                             "", seed, report.success, out_json);
  }

  if (kind == "smallball") {
    nlohmann::json j = nlohmann::json::parse(config_json);
    fsl::SmallBallConfig cfg;
    cfg.ensemble = fsl::ensemble_spec_from_json(j.at("ensemble").dump());
    nlohmann::json js = j.at("set");
    std::string set_kind = js.value("kind", std::string("sparse-sphere"));
    fsl::Frame frame;  // owns the frame for the lifetime of the run
    if (set_kind == "sparse-sphere") {
      cfg.set.kind = fsl::SetDescription::Kind::SparseSphere;
    } else if (set_kind == "cone-section") {
      cfg.set.kind = fsl::SetDescription::Kind::ConeSection;
      cfg.set.rho = require_number(js, "rho");
    } else if (set_kind == "frame-image") {
      cfg.set.kind = fsl::SetDescription::Kind::FrameImage;
      frame = fsl::build_frame(fsl::frame_spec_from_json(js.at("frame").dump()));
      cfg.set.frame = &frame;
    } else {
      fsl::fail(fsl::Status::BadArgs, "unknown set kind: " + set_kind);
    }
    cfg.set.k = require_count(js, "k");
    cfg.u = j.value("u", 0.25);
    cfg.t = j.value("t", 2.0);
    cfg.repetitions = j.value("repetitions", std::size_t{500});
    cfg.sample_points = j.value("sample_points", std::size_t{200});
    cfg.estimator_trials = j.value("estimator_trials", std::size_t{2000});
    cfg.seed = require_seed(j);
    double min_fraction = j.value("min_fraction", 0.0);

    nlohmann::json canonical;
    canonical["schema"] = 1;
    canonical["ensemble"] = nlohmann::json::parse(fsl::ensemble_spec_to_json(cfg.ensemble));
    nlohmann::json cset;
    cset["kind"] = set_kind;
    cset["k"] = cfg.set.k;
    if (set_kind == "cone-section") cset["rho"] = cfg.set.rho;
    if (set_kind == "frame-image") cset["frame"] = js.at("frame");
    canonical["set"] = cset;
    canonical["u"] = cfg.u;
    canonical["t"] = cfg.t;
    canonical["repetitions"] = cfg.repetitions;
    canonical["sample_points"] = cfg.sample_points;
    canonical["estimator_trials"] = cfg.estimator_trials;
    canonical["seed"] = cfg.seed;
    canonical["min_fraction"] = min_fraction;

    fsl::SmallBallVerification result = fsl::run_smallball_verification(cfg);
    return finish_experiment(out_dir, "smallball", canonical.dump(),
                             fsl::smallball_result_to_json(result), "", cfg.seed,
                             result.fraction >= min_fraction, out_json);
  }

  fsl::fail(fsl::Status::BadArgs, "unknown experiment kind: " + kind);
}

}  // namespace

extern "C" {

const char* fsl_version(void) { return fsl::kVersion; }

const char* fsl_last_error(void) { return g_last_error.c_str(); }

int fsl_last_status(void) { return g_last_status; }

void fsl_string_free(char* s) { std::free(s); }

void fsl_matrix_free(fsl_matrix* m) { delete m; }

size_t fsl_matrix_rows(const fsl_matrix* m) { return m == nullptr ? 0 : m->m.rows(); }

size_t fsl_matrix_cols(const fsl_matrix* m) { return m == nullptr ? 0 : m->m.cols(); }

const double* fsl_matrix_data(const fsl_matrix* m) {
  return m == nullptr ? nullptr : m->m.storage().data();
}

fsl_matrix* fsl_gen_matrix(const char* spec_json) {
  return guarded_matrix([&] {
    if (spec_json == nullptr) fsl::fail(fsl::Status::BadArgs, "spec JSON is null");
    return fsl::sample(fsl::ensemble_spec_from_json(spec_json));
  });
}

fsl_matrix* fsl_gen_frame(const char* spec_json) {
  return guarded_matrix([&] {
    if (spec_json == nullptr) fsl::fail(fsl::Status::BadArgs, "spec JSON is null");
    return fsl::build_frame(fsl::frame_spec_from_json(spec_json)).matrix;
  });
}

fsl_matrix* fsl_matrix_load(const char* path, const char* format) {
  return guarded_matrix([&] {
    if (path == nullptr) fsl::fail(fsl::Status::BadArgs, "path is null");
    std::string f = format == nullptr ? "auto" : format;
    if (f == "auto") return fsl::read_matrix(path);
    return fsl::read_matrix(path, parse_format(format));
  });
}

int fsl_matrix_save(const fsl_matrix* m, const char* path, const char* format) {
  return guarded([&] {
    if (m == nullptr || path == nullptr) fsl::fail(fsl::Status::BadArgs, "null argument");
    fsl::write_matrix(path, m->m, parse_format(format == nullptr ? "csv" : format));
    return status_code(fsl::Status::Ok);
  });
}

int fsl_check(const char* property, const char* args_json, char** out_json) {
  return guarded([&] {
    if (property == nullptr) fsl::fail(fsl::Status::BadArgs, "property is null");
    nlohmann::json args = args_json == nullptr ? nlohmann::json::object()
                                               : nlohmann::json::parse(args_json);
    return check_dispatch(property, args, out_json);
  });
}

int fsl_decode(const char* method, const char* args_json, char** out_json) {
  return guarded([&] {
    if (method == nullptr) fsl::fail(fsl::Status::BadArgs, "method is null");
    nlohmann::json args = args_json == nullptr ? nlohmann::json::object()
                                               : nlohmann::json::parse(args_json);
    return decode_dispatch(method, args, out_json);
  });
}

int fsl_run_experiment(const char* kind, const char* config_json, const char* out_dir,
                       char** out_json) {
  return guarded([&] {
    if (kind == nullptr || config_json == nullptr)
      fsl::fail(fsl::Status::BadArgs, "kind and config are required");
    return experiment_dispatch(kind, config_json, resolve_out_dir(out_dir), out_json);
  });
}

}  // extern "C"
