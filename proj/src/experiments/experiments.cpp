#include "fsl/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "fsl/io.hpp"
#include "fsl/numerics.hpp"
#include "fsl/parallel.hpp"

namespace fsl {

namespace {

const std::chrono::system_clock::time_point kProcessStart = std::chrono::system_clock::now();

std::string iso_utc(std::chrono::system_clock::time_point tp) {
  std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

// k-sparse coefficient vector: uniform support, Rademacher signs.
Vector sparse_signs(std::size_t n, std::size_t k, Rng& rng) {
  Vector x(n, 0.0);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + rng.below(n - i);
    std::swap(idx[i], idx[j]);
    x[idx[i]] = rng.rademacher();
  }
  return x;
}

double rel_error(const Vector& estimate, const Vector& truth) {
  double denom = norm2(truth);
  double err = norm2(sub(estimate, truth));
  return denom > 0.0 ? err / denom : err;
}

// l1 tail beyond the k largest magnitudes.
double sigma_k_l1(const Vector& z, std::size_t k) {
  std::vector<double> mags(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) mags[i] = std::fabs(z[i]);
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  double s = 0.0;
  for (std::size_t i = k; i < mags.size(); ++i) s += mags[i];
  return s;
}

DenseMatrix scale_matrix(const DenseMatrix& a, double c) {
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out.at(i, j) *= c;
  return out;
}

DenseMatrix scale_matrix_columns(const DenseMatrix& a, const Vector& diag) {
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out.at(i, j) *= diag[j];
  return out;
}

nlohmann::json frame_spec_to_json_obj(const FrameSpec& spec) {
  nlohmann::json j;
  switch (spec.kind) {
    case FrameSpec::Kind::Identity: j["kind"] = "identity"; break;
    case FrameSpec::Kind::Gaussian: j["kind"] = "gaussian"; break;
    case FrameSpec::Kind::DctOvercomplete: j["kind"] = "dct-overcomplete"; break;
    case FrameSpec::Kind::FromFile: j["kind"] = "from-file"; break;
  }
  j["d"] = spec.d;
  if (spec.kind == FrameSpec::Kind::Gaussian) {
    j["n"] = spec.n;
    j["seed"] = spec.seed;
  }
  if (spec.kind == FrameSpec::Kind::FromFile) j["path"] = spec.path;
  return j;
}

FrameSpec frame_spec_from_json_obj(const nlohmann::json& j) {
  FrameSpec spec;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "identity") spec.kind = FrameSpec::Kind::Identity;
  else if (kind == "gaussian") spec.kind = FrameSpec::Kind::Gaussian;
  else if (kind == "dct-overcomplete") spec.kind = FrameSpec::Kind::DctOvercomplete;
  else if (kind == "from-file") spec.kind = FrameSpec::Kind::FromFile;
  else fail(Status::BadArgs, "unknown frame kind: " + kind);
  spec.d = j.value("d", std::size_t{0});
  spec.n = j.value("n", std::size_t{0});
  spec.seed = j.value("seed", std::uint64_t{0});
  spec.path = j.value("path", std::string());
  return spec;
}

}  // namespace

std::string decoder_name(DecoderKind kind) {
  switch (kind) {
    case DecoderKind::BpEq: return "bp_eq";
    case DecoderKind::Qcbp: return "qcbp";
    case DecoderKind::Synthesis: return "synthesis";
    case DecoderKind::Analysis: return "analysis";
  }
  fail(Status::Internal, "unknown decoder");
}

DecoderKind decoder_from_name(const std::string& name) {
  if (name == "bp_eq" || name == "bp") return DecoderKind::BpEq;
  if (name == "qcbp") return DecoderKind::Qcbp;
  if (name == "synthesis") return DecoderKind::Synthesis;
  if (name == "analysis") return DecoderKind::Analysis;
  fail(Status::BadArgs, "unknown decoder: " + name);
}

std::string frame_spec_to_json(const FrameSpec& spec) { return frame_spec_to_json_obj(spec).dump(); }

FrameSpec frame_spec_from_json(const std::string& text) {
  return frame_spec_from_json_obj(nlohmann::json::parse(text));
}

Frame build_frame(const FrameSpec& spec) {
  switch (spec.kind) {
    case FrameSpec::Kind::Identity:
      return make_frame_identity(spec.d);
    case FrameSpec::Kind::Gaussian:
      return make_frame_gaussian(spec.d, spec.n, spec.seed);
    case FrameSpec::Kind::DctOvercomplete:
      return make_frame_dct_overcomplete(spec.d);
    case FrameSpec::Kind::FromFile:
      return make_frame_from_file(spec.path);
  }
  fail(Status::Internal, "unknown frame kind");
}

std::string config_hash_hex(const std::string& canonical_json) {
  std::uint64_t h = fnv1a64(canonical_json);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string phase_config_to_json(const PhaseConfig& cfg) {
  nlohmann::json j;
  j["schema"] = 1;
  j["d"] = cfg.d;
  j["n"] = cfg.n;
  j["frame"] = frame_spec_to_json_obj(cfg.frame);
  j["ensemble"] = nlohmann::json::parse(ensemble_spec_to_json(cfg.ensemble));
  j["k_list"] = cfg.k_list;
  j["m_list"] = cfg.m_list;
  j["trials"] = cfg.trials;
  j["success_threshold"] = cfg.success_threshold;
  j["seed"] = cfg.seed;
  j["decoder"] = decoder_name(cfg.decoder);
  j["eta"] = cfg.eta;
  j["threads"] = cfg.threads;
  return j.dump();
}

PhaseConfig phase_config_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  PhaseConfig cfg;
  cfg.d = j.at("d").get<std::size_t>();
  cfg.n = j.value("n", cfg.d);
  if (j.contains("frame")) cfg.frame = frame_spec_from_json_obj(j.at("frame"));
  else {
    cfg.frame.kind = FrameSpec::Kind::Identity;
    cfg.frame.d = cfg.d;
  }
  if (cfg.frame.d == 0) cfg.frame.d = cfg.d;
  cfg.ensemble = ensemble_spec_from_json(j.at("ensemble").dump());
  cfg.k_list = j.at("k_list").get<std::vector<std::size_t>>();
  cfg.m_list = j.at("m_list").get<std::vector<std::size_t>>();
  cfg.trials = j.at("trials").get<std::size_t>();
  cfg.success_threshold = j.value("success_threshold", kTol.success_rel_err);
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.decoder = decoder_from_name(j.value("decoder", std::string("bp_eq")));
  cfg.eta = j.value("eta", 0.0);
  cfg.threads = j.value("threads", std::size_t{1});
  return cfg;
}

GridResult run_phase_transition(const PhaseConfig& cfg) {
  if (cfg.trials == 0) fail(Status::BadArgs, "trials must be >= 1");
  if (cfg.k_list.empty() || cfg.m_list.empty()) fail(Status::BadArgs, "k and m grids must be nonempty");
  for (std::size_t m : cfg.m_list)
    if (m == 0 || m > cfg.d) fail(Status::BadArgs, "m grid must lie in [1, d]");

  FrameSpec fs = cfg.frame;
  if (fs.d == 0) fs.d = cfg.d;
  Frame frame = build_frame(fs);
  if (frame.d() != cfg.d) fail(Status::BadArgs, "frame dimension disagrees with config d");
  const std::size_t n = frame.n();
  if (cfg.n != 0 && cfg.n != n) fail(Status::BadArgs, "config n disagrees with the frame");
  for (std::size_t k : cfg.k_list)
    if (k > n) fail(Status::BadArgs, "k grid exceeds the coefficient dimension");

  const std::size_t n_m = cfg.m_list.size();
  const std::size_t per_cell = cfg.trials;
  const std::size_t total = cfg.k_list.size() * n_m * per_cell;

  struct Slot {
    bool success = false;
    bool failed = false;  // decoder failure (non-optimal status or exception)
    double rel_err = 0.0;
    double seconds = 0.0;
    std::string note;
  };
  std::vector<Slot> slots(total);

  parallel_for(total, int(cfg.threads), [&](std::size_t g) {
    const std::size_t k_idx = g / (n_m * per_cell);
    const std::size_t rem = g % (n_m * per_cell);
    const std::size_t m_idx = rem / per_cell;
    const std::size_t k = cfg.k_list[k_idx];
    const std::size_t m = cfg.m_list[m_idx];

    Rng rng(substream_seed(cfg.seed, g));
    EnsembleSpec es = cfg.ensemble;
    es.m = m;
    es.d = cfg.d;
    es.seed = rng.next_u64();
    Slot& slot = slots[g];
    try {
      DenseMatrix a = sample(es);
      Vector x0 = sparse_signs(n, k, rng);
      Vector z0 = matvec(frame.matrix, x0);
      double nrm = norm2(z0);
      if (nrm > 0.0)
        for (double& e : z0) e /= nrm;
      Vector y = matvec(a, z0);

      auto start = std::chrono::steady_clock::now();
      DecodeResult dec;
      switch (cfg.decoder) {
        case DecoderKind::BpEq: dec = basis_pursuit_eq(a, y); break;
        case DecoderKind::Qcbp: dec = qcbp(a, y, cfg.eta); break;
        case DecoderKind::Synthesis: dec = l1_synthesis(frame, a, y, cfg.eta); break;
        case DecoderKind::Analysis: dec = l1_analysis(frame, a, y, cfg.eta); break;
      }
      slot.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (dec.status != DecodeStatus::Optimal) {
        slot.failed = true;
        slot.note = "decoder status " + decode_status_name(dec.status);
        return;
      }
      slot.rel_err = rel_error(dec.z_hat, z0);
      slot.success = slot.rel_err <= cfg.success_threshold;
    } catch (const std::exception& e) {
      slot.failed = true;
      slot.note = e.what();
    }
  });

  GridResult grid;
  grid.seed = cfg.seed;
  grid.config_hash = config_hash_hex(phase_config_to_json(cfg));
  for (std::size_t k_idx = 0; k_idx < cfg.k_list.size(); ++k_idx) {
    for (std::size_t m_idx = 0; m_idx < n_m; ++m_idx) {
      PhaseCell cell;
      cell.k = cfg.k_list[k_idx];
      cell.m = cfg.m_list[m_idx];
      cell.trials = per_cell;
      double err_sum = 0.0;
      double sec_sum = 0.0;
      std::size_t decoded = 0;
      for (std::size_t t = 0; t < per_cell; ++t) {
        const Slot& slot = slots[(k_idx * n_m + m_idx) * per_cell + t];
        if (slot.failed) {
          ++cell.decoder_failures;
          std::cerr << "trial failure at k=" << cell.k << " m=" << cell.m << " t=" << t << ": "
                    << slot.note << "\n";
          continue;
        }
        ++decoded;
        if (slot.success) ++cell.successes;
        err_sum += slot.rel_err;
        cell.max_rel_error = std::max(cell.max_rel_error, slot.rel_err);
        sec_sum += slot.seconds;
      }
      cell.mean_rel_error = decoded > 0 ? err_sum / double(decoded) : 0.0;
      cell.mean_decode_seconds = decoded > 0 ? sec_sum / double(decoded) : 0.0;
      grid.cells.push_back(cell);
    }
  }

  for (std::size_t k_idx = 0; k_idx < cfg.k_list.size(); ++k_idx) {
    M50Entry entry{cfg.k_list[k_idx], nan_value()};
    for (std::size_t m_idx = 0; m_idx + 1 < n_m; ++m_idx) {
      const PhaseCell& lo = grid.cells[k_idx * n_m + m_idx];
      const PhaseCell& hi = grid.cells[k_idx * n_m + m_idx + 1];
      double r_lo = double(lo.successes) / double(lo.trials);
      double r_hi = double(hi.successes) / double(hi.trials);
      if (r_lo < 0.5 && r_hi >= 0.5) {
        entry.m50 = double(lo.m) + (0.5 - r_lo) * double(hi.m - lo.m) / (r_hi - r_lo);
        break;
      }
    }
    grid.m50.push_back(entry);
  }
  return grid;
}

std::string grid_result_to_json(const GridResult& grid) {
  nlohmann::json j;
  j["schema"] = 1;
  j["config_hash"] = grid.config_hash;
  j["seed"] = grid.seed;
  j["cells"] = nlohmann::json::array();
  for (const PhaseCell& c : grid.cells) {
    nlohmann::json jc;
    jc["k"] = c.k;
    jc["m"] = c.m;
    jc["trials"] = c.trials;
    jc["successes"] = c.successes;
    jc["decoder_failures"] = c.decoder_failures;
    jc["mean_rel_error"] = c.mean_rel_error;
    jc["max_rel_error"] = c.max_rel_error;
    jc["mean_decode_seconds"] = c.mean_decode_seconds;
    j["cells"].push_back(jc);
  }
  j["m50"] = nlohmann::json::array();
  for (const M50Entry& e : grid.m50) {
    nlohmann::json je;
    je["k"] = e.k;
    if (std::isnan(e.m50)) je["m50"] = nullptr;
    else je["m50"] = e.m50;
    j["m50"].push_back(je);
  }
  return j.dump();
}

GridResult grid_result_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  GridResult grid;
  grid.config_hash = j.value("config_hash", std::string());
  grid.seed = j.value("seed", std::uint64_t{0});
  for (const auto& jc : j.at("cells")) {
    PhaseCell c;
    c.k = jc.at("k").get<std::size_t>();
    c.m = jc.at("m").get<std::size_t>();
    c.trials = jc.at("trials").get<std::size_t>();
    c.successes = jc.at("successes").get<std::size_t>();
    c.decoder_failures = jc.value("decoder_failures", std::size_t{0});
    c.mean_rel_error = jc.at("mean_rel_error").get<double>();
    c.max_rel_error = jc.at("max_rel_error").get<double>();
    c.mean_decode_seconds = jc.value("mean_decode_seconds", 0.0);
    grid.cells.push_back(c);
  }
  for (const auto& je : j.value("m50", nlohmann::json::array())) {
    M50Entry e;
    e.k = je.at("k").get<std::size_t>();
    e.m50 = je.at("m50").is_null() ? nan_value() : je.at("m50").get<double>();
    grid.m50.push_back(e);
  }
  return grid;
}

std::string grid_result_to_csv(const GridResult& grid) {
  std::string out = "k,m,trials,successes,decoder_failures,success_rate,mean_rel_error,max_rel_error\n";
  for (const PhaseCell& c : grid.cells) {
    out += std::to_string(c.k) + "," + std::to_string(c.m) + "," + std::to_string(c.trials) + "," +
           std::to_string(c.successes) + "," + std::to_string(c.decoder_failures) + "," +
           format_double(double(c.successes) / double(c.trials)) + "," +
           format_double(c.mean_rel_error) + "," + format_double(c.max_rel_error) + "\n";
  }
  return out;
}

std::string sweep_config_to_json(const SweepConfig& cfg) {
  nlohmann::json j;
  j["schema"] = 1;
  j["d"] = cfg.d;
  j["m"] = cfg.m;
  j["k"] = cfg.k;
  j["ensemble"] = nlohmann::json::parse(ensemble_spec_to_json(cfg.ensemble));
  j["eta_list"] = cfg.eta_list;
  j["matrices"] = cfg.matrices;
  j["instances"] = cfg.instances;
  j["delta_target"] = cfg.delta_target;
  j["rejection_budget"] = cfg.rejection_budget;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["profile"] = cfg.profile == SweepConfig::Profile::PowerLaw ? "power-law" : "exact-sparse";
  return j.dump();
}

SweepConfig sweep_config_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  SweepConfig cfg;
  cfg.d = j.at("d").get<std::size_t>();
  cfg.m = j.at("m").get<std::size_t>();
  cfg.k = j.at("k").get<std::size_t>();
  cfg.ensemble = ensemble_spec_from_json(j.at("ensemble").dump());
  cfg.eta_list = j.at("eta_list").get<std::vector<double>>();
  cfg.matrices = j.at("matrices").get<std::size_t>();
  cfg.instances = j.at("instances").get<std::size_t>();
  cfg.delta_target = j.value("delta_target", 0.6);
  cfg.rejection_budget = j.value("rejection_budget", std::size_t{50});
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.threads = j.value("threads", std::size_t{1});
  std::string profile = j.value("profile", std::string("power-law"));
  if (profile == "power-law") cfg.profile = SweepConfig::Profile::PowerLaw;
  else if (profile == "exact-sparse") cfg.profile = SweepConfig::Profile::ExactSparse;
  else fail(Status::BadArgs, "unknown signal profile: " + profile);
  return cfg;
}

namespace {

Vector sweep_signal(const SweepConfig& cfg, Rng& rng) {
  const std::size_t d = cfg.d;
  Vector z(d, 0.0);
  if (cfg.profile == SweepConfig::Profile::ExactSparse) {
    z = sparse_signs(d, cfg.k, rng);
  } else {
    // sorted magnitudes proportional to 1/rank, random positions and signs
    std::vector<std::size_t> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i + 1 < d; ++i) {
      std::size_t j = i + rng.below(d - i);
      std::swap(idx[i], idx[j]);
    }
    for (std::size_t r = 0; r < d; ++r) z[idx[r]] = rng.rademacher() / double(r + 1);
  }
  double nrm = norm2(z);
  for (double& e : z) e /= nrm;
  return z;
}

}  // namespace

SweepResult run_robustness_sweep(const SweepConfig& cfg) {
  if (cfg.matrices == 0 || cfg.instances == 0) fail(Status::BadArgs, "matrices and instances must be >= 1");
  if (cfg.k == 0 || 2 * cfg.k > cfg.d) fail(Status::BadArgs, "need 1 <= k and 2k <= d");
  if (cfg.eta_list.empty()) fail(Status::BadArgs, "eta grid must be nonempty");
  for (double eta : cfg.eta_list)
    if (eta < 0.0) fail(Status::BadArgs, "eta must be nonnegative");
  const double transfer_limit = 4.0 / std::sqrt(41.0);

  const std::uint64_t matrix_master = substream_seed(cfg.seed, 1);
  const std::uint64_t instance_master = substream_seed(cfg.seed, 2);

  struct PerMatrix {
    SweepMatrix meta;
    std::vector<SweepRow> rows;
    std::vector<SweepViolation> violations;
  };
  std::vector<PerMatrix> work(cfg.matrices);

  parallel_for(cfg.matrices, int(cfg.threads), [&](std::size_t mi) {
    PerMatrix& pm = work[mi];
    pm.meta.index = mi;

    DenseMatrix a;
    for (std::size_t attempt = 0; attempt < cfg.rejection_budget; ++attempt) {
      EnsembleSpec es = cfg.ensemble;
      es.m = cfg.m;
      es.d = cfg.d;
      es.seed = substream_seed(matrix_master, mi * cfg.rejection_budget + attempt);
      DenseMatrix raw = sample(es);
      SpectrumExtremes ext = rip_gram_extremes(raw, 2 * cfg.k);
      if (ext.max_value + ext.min_value <= 0.0) {
        ++pm.meta.rejections;
        continue;
      }
      double delta = (ext.max_value - ext.min_value) / (ext.max_value + ext.min_value);
      if (delta <= cfg.delta_target && delta < transfer_limit) {
        double c = std::sqrt(2.0 / (ext.max_value + ext.min_value));
        a = scale_matrix(raw, c);
        double verified = rip_constant_exact(a, 2 * cfg.k).delta;
        if (std::fabs(verified - delta) > 1e-9)
          fail(Status::Internal, "scaled isometry constant failed to reproduce");
        pm.meta.admitted = true;
        pm.meta.delta = verified;
        break;
      }
      ++pm.meta.rejections;
    }
    if (!pm.meta.admitted) return;

    RnspConstants rt = rnsp_from_rip(pm.meta.delta);
    pm.meta.rho = rt.rho;
    pm.meta.tau = rt.tau;

    BoundParams bp;
    bp.variant = BoundVariant::RnspLp;
    bp.rho = rt.rho;
    bp.tau = rt.tau;
    bp.p = 2.0;
    bp.q = 2.0;
    bp.k = cfg.k;

    for (std::size_t ei = 0; ei < cfg.eta_list.size(); ++ei) {
      double eta = cfg.eta_list[ei];
      for (std::size_t ii = 0; ii < cfg.instances; ++ii) {
        Rng rng(substream_seed(instance_master, (mi * cfg.eta_list.size() + ei) * cfg.instances + ii));
        Vector z0 = sweep_signal(cfg, rng);
        Vector w(cfg.m, 0.0);
        if (eta > 0.0) {
          for (double& e : w) e = rng.normal();
          double nrm = norm2(w);
          for (double& e : w) e *= eta / nrm;  // worst case |w|_2 = eta exactly
        }
        Vector y = add(matvec(a, z0), w);
        DecodeResult dec = qcbp(a, y, eta);

        SweepRow row;
        row.matrix_index = mi;
        row.eta = eta;
        row.instance_index = ii;
        row.sigma_k = sigma_k_l1(z0, cfg.k);
        row.observed_error = norm2(sub(dec.z_hat, z0));
        row.bound = error_bound(bp, row.sigma_k, eta);
        row.violation = dec.status == DecodeStatus::Optimal ? row.observed_error > row.bound : true;
        pm.rows.push_back(row);
        if (row.violation) {
          SweepViolation v;
          v.matrix_index = mi;
          v.eta = eta;
          v.instance_index = ii;
          v.a = a;
          v.z0 = z0;
          v.w = w;
          v.observed_error = row.observed_error;
          v.bound = row.bound;
          pm.violations.push_back(v);
        }
      }
    }
  });

  SweepResult result;
  result.seed = cfg.seed;
  result.config_hash = config_hash_hex(sweep_config_to_json(cfg));
  for (PerMatrix& pm : work) {
    result.matrices.push_back(pm.meta);
    if (pm.meta.admitted) ++result.admitted_matrices;
    for (SweepRow& r : pm.rows) result.rows.push_back(r);
    for (SweepViolation& v : pm.violations) result.violations.push_back(std::move(v));
  }
  return result;
}

std::string sweep_result_to_json(const SweepResult& result) {
  nlohmann::json j;
  j["schema"] = 1;
  j["config_hash"] = result.config_hash;
  j["seed"] = result.seed;
  j["admitted_matrices"] = result.admitted_matrices;
  j["matrices"] = nlohmann::json::array();
  for (const SweepMatrix& m : result.matrices) {
    nlohmann::json jm;
    jm["index"] = m.index;
    jm["admitted"] = m.admitted;
    jm["rejections"] = m.rejections;
    jm["delta"] = m.delta;
    jm["rho"] = m.rho;
    jm["tau"] = m.tau;
    j["matrices"].push_back(jm);
  }
  j["rows"] = nlohmann::json::array();
  for (const SweepRow& r : result.rows) {
    nlohmann::json jr;
    jr["matrix"] = r.matrix_index;
    jr["eta"] = r.eta;
    jr["instance"] = r.instance_index;
    jr["sigma_k"] = r.sigma_k;
    jr["observed_error"] = r.observed_error;
    jr["bound"] = r.bound;
    jr["violation"] = r.violation;
    j["rows"].push_back(jr);
  }
  j["violations"] = nlohmann::json::array();
  for (const SweepViolation& v : result.violations) {
    nlohmann::json jv;
    jv["matrix"] = v.matrix_index;
    jv["eta"] = v.eta;
    jv["instance"] = v.instance_index;
    jv["a_rows"] = v.a.rows();
    jv["a_cols"] = v.a.cols();
    jv["a_data"] = v.a.storage();
    jv["z0"] = v.z0;
    jv["w"] = v.w;
    jv["observed_error"] = v.observed_error;
    jv["bound"] = v.bound;
    j["violations"].push_back(jv);
  }
  return j.dump();
}

std::string sweep_result_to_csv(const SweepResult& result) {
  std::string out = "matrix,eta,instance,sigma_k,observed_error,bound,violation\n";
  for (const SweepRow& r : result.rows) {
    out += std::to_string(r.matrix_index) + "," + format_double(r.eta) + "," +
           std::to_string(r.instance_index) + "," + format_double(r.sigma_k) + "," +
           format_double(r.observed_error) + "," + format_double(r.bound) + "," +
           (r.violation ? "1" : "0") + "\n";
  }
  return out;
}

std::string lemma_config_to_json(const LemmaScalingConfig& cfg) {
  nlohmann::json j;
  j["schema"] = 1;
  j["b_spec"] = nlohmann::json::parse(ensemble_spec_to_json(cfg.b_spec));
  j["k"] = cfg.k;
  j["trials"] = cfg.trials;
  j["resample_budget"] = cfg.resample_budget;
  j["seed"] = cfg.seed;
  return j.dump();
}

LemmaScalingConfig lemma_config_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  LemmaScalingConfig cfg;
  cfg.b_spec = ensemble_spec_from_json(j.at("b_spec").dump());
  cfg.k = j.at("k").get<std::size_t>();
  cfg.trials = j.at("trials").get<std::size_t>();
  cfg.resample_budget = j.value("resample_budget", std::size_t{50});
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

LemmaScalingResult run_lemma_nsp_scaling(const LemmaScalingConfig& cfg) {
  if (cfg.trials == 0) fail(Status::BadArgs, "trials must be >= 1");
  LemmaScalingResult result;
  result.seed = cfg.seed;
  result.config_hash = config_hash_hex(lemma_config_to_json(cfg));

  for (std::size_t t = 0; t < cfg.trials; ++t) {
    LemmaTrial trial;
    trial.trial = t;

    DenseMatrix b;
    for (std::size_t attempt = 0; attempt < cfg.resample_budget; ++attempt) {
      EnsembleSpec es = cfg.b_spec;
      es.seed = substream_seed(cfg.seed, t * cfg.resample_budget + attempt);
      DenseMatrix candidate = sample(es);
      PropertyReport base = nsp_check_exact(candidate, cfg.k);
      if (base.verdict == PropertyReport::Verdict::CertifiedHolds) {
        // The construction needs a kernel vector with spread mass; try it now so
        // a degenerate draw is rejected the same way a property failure is.
        try {
          NspBreak nb = nsp_breaking_diagonal(candidate, cfg.k);
          b = candidate;
          trial.base_certified = true;
          trial.resamples = attempt;
          trial.diagonal = nb.diagonal;
          trial.witness = nb.witness;
          trial.support = nb.support;
        } catch (const Error& e) {
          std::cerr << "trial " << t << ": construction rejected a draw: " << e.what() << "\n";
          continue;
        }
        break;
      }
    }
    if (!trial.base_certified) {
      std::cerr << "trial " << t << ": no certified draw within the resample budget\n";
      result.trials.push_back(trial);
      continue;
    }

    DenseMatrix bd = scale_matrix_columns(b, trial.diagonal);
    PropertyReport scaled = nsp_check_exact(bd, cfg.k);
    trial.scaled_fails_certified = scaled.verdict == PropertyReport::Verdict::CertifiedFails;

    double head = 0.0, tail = 0.0;
    std::vector<bool> in_t(bd.cols(), false);
    for (std::size_t j : trial.support) in_t[j] = true;
    for (std::size_t j = 0; j < bd.cols(); ++j)
      (in_t[j] ? head : tail) += std::fabs(trial.witness[j]);
    trial.witness_identity_error = std::fabs(head - tail - 1.0);

    Vector x0(bd.cols(), 0.0);
    for (std::size_t j : trial.support) x0[j] = trial.witness[j];
    DecodeResult dec = basis_pursuit_eq(bd, matvec(bd, x0));
    trial.bp_failure_rel_error = rel_error(dec.z_hat, x0);
    trial.bp_failure_shown = dec.status == DecodeStatus::Optimal && trial.bp_failure_rel_error > 1e-6;

    PropertyReport control = nsp_check_exact(b, cfg.k);
    trial.control_still_holds = control.verdict == PropertyReport::Verdict::CertifiedHolds;

    trial.ok = trial.scaled_fails_certified &&
               trial.witness_identity_error <= kTol.lemma_identity && trial.bp_failure_shown &&
               trial.control_still_holds;
    if (trial.ok) ++result.successes;
    result.trials.push_back(trial);
  }
  return result;
}

std::string lemma_result_to_json(const LemmaScalingResult& result) {
  nlohmann::json j;
  j["schema"] = 1;
  j["config_hash"] = result.config_hash;
  j["seed"] = result.seed;
  j["successes"] = result.successes;
  j["trials"] = nlohmann::json::array();
  for (const LemmaTrial& t : result.trials) {
    nlohmann::json jt;
    jt["trial"] = t.trial;
    jt["resamples"] = t.resamples;
    jt["base_certified"] = t.base_certified;
    jt["scaled_fails_certified"] = t.scaled_fails_certified;
    jt["witness_identity_error"] = t.witness_identity_error;
    jt["bp_failure_shown"] = t.bp_failure_shown;
    jt["bp_failure_rel_error"] = t.bp_failure_rel_error;
    jt["control_still_holds"] = t.control_still_holds;
    jt["ok"] = t.ok;
    jt["diagonal"] = t.diagonal;
    jt["witness"] = t.witness;
    jt["support"] = t.support;
    j["trials"].push_back(jt);
  }
  return j.dump();
}

std::string lemma_result_to_csv(const LemmaScalingResult& result) {
  std::string out =
      "trial,resamples,base_certified,scaled_fails,identity_error,bp_failure,control_holds,ok\n";
  for (const LemmaTrial& t : result.trials) {
    out += std::to_string(t.trial) + "," + std::to_string(t.resamples) + "," +
           (t.base_certified ? "1" : "0") + "," + (t.scaled_fails_certified ? "1" : "0") + "," +
           format_double(t.witness_identity_error) + "," + (t.bp_failure_shown ? "1" : "0") + "," +
           (t.control_still_holds ? "1" : "0") + "," + (t.ok ? "1" : "0") + "\n";
  }
  return out;
}

DemoReport run_theorem_dripbad_demo(std::size_t d, std::size_t n, std::size_t k,
                                    double delta_target, std::uint64_t seed,
                                    std::size_t retry_budget) {
  if (d == 0 || n < d) fail(Status::BadArgs, "need n >= d >= 1");
  if (k == 0 || 2 * k > n) fail(Status::BadArgs, "need 1 <= k and 2k <= n");
  if (delta_target <= 0.0 || delta_target >= 1.0)
    fail(Status::BadArgs, "delta target must lie in (0, 1)");

  // Stage 5 needs the sensing matrix to have a nontrivial kernel: with d or
  // more rows a generic draw is injective, the equality constraint then pins
  // the synthesized signal completely, and no decoding failure can exist.
  const std::size_t m_cap = d - 1;
  DemoReport report;

  for (std::size_t retry = 0; retry < retry_budget; ++retry) {
    report = DemoReport{};
    report.retries_used = retry + 1;
    Rng rng(substream_seed(seed, retry));

    // Stage 1: full-spark frame.
    Frame frame;
    bool have_frame = false;
    for (int attempt = 0; attempt < 8 && !have_frame; ++attempt) {
      Frame candidate = make_frame_gaussian(d, n, rng.next_u64());
      SparkReport spark = is_full_spark(candidate);
      if (spark.verdict == SparkReport::Verdict::FullSpark) {
        candidate.full_spark = true;
        frame = candidate;
        have_frame = true;
      }
    }
    report.stages[0].ok = have_frame;
    report.stages[0].detail = have_frame ? "full-spark frame certified"
                                         : "no full-spark draw in 8 attempts";
    if (!have_frame) continue;

    // Stage 2: escalate rows until the scaled exact isometry constant on
    // F-sparse vectors meets the target.
    DenseMatrix a;
    bool have_a = false;
    double best_delta = std::numeric_limits<double>::infinity();
    for (std::size_t m = 1; m <= m_cap && !have_a; ++m) {
      EnsembleSpec es;
      es.family = EnsembleFamily::Gaussian;
      es.m = m;
      es.d = d;
      es.seed = rng.next_u64();
      DenseMatrix raw = sample(es);
      SpectrumExtremes ext = f_rip_gram_extremes(raw, frame, 2 * k);
      if (ext.max_value + ext.min_value <= 0.0) continue;
      double delta = (ext.max_value - ext.min_value) / (ext.max_value + ext.min_value);
      best_delta = std::min(best_delta, delta);
      if (delta <= delta_target) {
        a = scale_matrix(raw, std::sqrt(2.0 / (ext.max_value + ext.min_value)));
        report.m = m;
        report.delta_before = f_rip_constant_exact(a, frame, 2 * k).delta;
        if (std::fabs(report.delta_before - delta) > 1e-9)
          fail(Status::Internal, "scaled isometry constant failed to reproduce");
        have_a = true;
      }
    }
    report.stages[1].ok = have_a;
    report.stages[1].detail =
        have_a ? "target met at m=" + std::to_string(report.m) + " with delta=" +
                     format_double(report.delta_before)
               : "smallest constant " + format_double(best_delta) + " over rows 1.." +
                     std::to_string(m_cap) +
                     " misses the target; more rows would make the sensing matrix "
                     "injective and equality-constrained synthesis exact, so no "
                     "demonstration instance exists for this target";
    if (!have_a) continue;

    // Stage 3: the product must satisfy the coefficient-space property before a
    // breaking diagonal exists.
    DenseMatrix af = matmul(a, frame.matrix);
    PropertyReport base = nsp_check_exact(af, k);
    if (base.verdict != PropertyReport::Verdict::CertifiedHolds) {
      report.stages[2].ok = false;
      report.stages[2].detail = "product matrix lacks the order-" + std::to_string(k) +
                                " null space property; resampling";
      continue;
    }
    NspBreak nb;
    try {
      nb = nsp_breaking_diagonal(af, k);
    } catch (const Error& e) {
      report.stages[2].ok = false;
      report.stages[2].detail = std::string("diagonal construction failed: ") + e.what();
      continue;
    }
    report.diagonal = nb.diagonal;
    report.stages[2].ok = true;
    report.stages[2].detail = "breaking diagonal built on a certified product";

    // Stage 4: the isometry constant ignores column scaling of the frame.
    Frame scaled = scale_columns(frame, nb.diagonal);
    scaled.full_spark = frame.full_spark;
    report.delta_after = f_rip_constant_exact(a, scaled, 2 * k).delta;
    report.invariance_gap = std::fabs(report.delta_after - report.delta_before);
    report.stages[3].ok = report.invariance_gap <= 1e-9;
    report.stages[3].detail = "constant gap " + format_double(report.invariance_gap);
    if (!report.stages[3].ok) continue;

    // Stage 5: exhibit a sparse signal the synthesis decoder misses. At k = 1
    // every model signal is a multiple of a single frame column and decoding
    // commutes with scaling, so scanning the column directions searches the
    // whole model set; for larger k the scan adds witness-aligned supports.
    // With eta = 0 the synthesis program is min |x|_1 s.t. (A F) x = y, solved
    // here by the simplex path so every verdict is exact.
    std::vector<Vector> candidates;
    for (std::size_t j = 0; j < n; ++j) {
      Vector e(n, 0.0);
      e[j] = 1.0;
      candidates.push_back(e);
    }
    if (k > 1) {
      Vector head(n, 0.0);
      for (std::size_t j : nb.support) head[j] = nb.witness[j];
      candidates.push_back(head);
      std::size_t patterns = std::min<std::size_t>(std::size_t{1} << k, 64);
      for (std::size_t bits = 0; bits < patterns; ++bits) {
        Vector v(n, 0.0);
        for (std::size_t i = 0; i < nb.support.size(); ++i)
          v[nb.support[i]] = (bits >> i) & 1 ? -1.0 : 1.0;
        candidates.push_back(v);
      }
    }
    DenseMatrix product = matmul(a, scaled.matrix);
    bool found = false;
    double best_err = 0.0;
    std::size_t best_col = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      Vector z0 = matvec(scaled.matrix, candidates[c]);
      double nz = norm2(z0);
      if (nz <= 1e-12) continue;
      for (double& e : z0) e /= nz;
      DecodeResult dec = basis_pursuit_eq(product, matvec(a, z0));
      if (dec.status != DecodeStatus::Optimal) continue;
      Vector z_hat = matvec(scaled.matrix, dec.z_hat);
      double err = rel_error(z_hat, z0);
      if (err > best_err) {
        best_err = err;
        best_col = c;
      }
      if (err > 0.1) {
        report.z0 = z0;
        report.rel_error = err;
        report.failing_column = c;
        report.decoder_cost = dec.objective;
        report.representation_cost = f_norm(scaled, z0).value;
        found = true;
        break;
      }
    }
    report.best_scan_error = best_err;
    report.stages[4].ok = found;
    report.stages[4].detail =
        found ? "synthesis misses the direction of column " +
                    std::to_string(report.failing_column) + " with relative error " +
                    format_double(report.rel_error) + "; the minimizer costs " +
                    format_double(report.decoder_cost) +
                    " while the cheapest exact representation costs " +
                    format_double(report.representation_cost)
              : "all " + std::to_string(candidates.size()) +
                    " scanned directions are reproduced exactly (largest relative error " +
                    format_double(best_err) + " at candidate " + std::to_string(best_col) +
                    "); the coefficient property fails for the scaled product, yet each "
                    "scanned signal still has a cheapest representation that reproduces it";
    if (!found) continue;

    report.success = true;
    return report;
  }
  report.success = false;
  return report;
}

std::string demo_report_to_json(const DemoReport& report) {
  nlohmann::json j;
  j["schema"] = 1;
  j["success"] = report.success;
  j["retries_used"] = report.retries_used;
  j["m"] = report.m;
  j["delta_before"] = report.delta_before;
  j["delta_after"] = report.delta_after;
  j["invariance_gap"] = report.invariance_gap;
  j["rel_error"] = report.rel_error;
  j["failing_column"] = report.failing_column;
  j["decoder_cost"] = report.decoder_cost;
  j["representation_cost"] = report.representation_cost;
  j["best_scan_error"] = report.best_scan_error;
  j["diagonal"] = report.diagonal;
  j["z0"] = report.z0;
  j["stages"] = nlohmann::json::array();
  for (const DemoStage& s : report.stages) {
    nlohmann::json js;
    js["ok"] = s.ok;
    js["detail"] = s.detail;
    j["stages"].push_back(js);
  }
  return j.dump();
}

namespace {

DirectionSampler set_sampler(const SetDescription& set, std::size_t d) {
  switch (set.kind) {
    case SetDescription::Kind::SparseSphere:
      return [d, k = set.k](Rng& rng) {
        Vector v(d, 0.0);
        std::vector<std::size_t> idx(d);
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = 0; i < k; ++i) {
          std::size_t j = i + rng.below(d - i);
          std::swap(idx[i], idx[j]);
          v[idx[i]] = rng.normal();
        }
        double nrm = norm2(v);
        for (double& e : v) e /= nrm;
        return v;
      };
    case SetDescription::Kind::ConeSection:
      return [d, k = set.k, rho = set.rho](Rng& rng) {
        // head on a random support, tail scaled into the cone, then normalized
        Vector v(d, 0.0);
        std::vector<std::size_t> idx(d);
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = 0; i + 1 < d; ++i) {
          std::size_t j = i + rng.below(d - i);
          std::swap(idx[i], idx[j]);
        }
        double head2 = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
          v[idx[i]] = rng.normal();
          head2 += v[idx[i]] * v[idx[i]];
        }
        double tail1 = 0.0;
        for (std::size_t i = k; i < d; ++i) {
          v[idx[i]] = rng.normal();
          tail1 += std::fabs(v[idx[i]]);
        }
        double budget = std::sqrt(head2) * std::sqrt(double(k)) / rho;
        if (tail1 > 0.0) {
          double s = budget * rng.uniform() / tail1;
          for (std::size_t i = k; i < d; ++i) v[idx[i]] *= s;
        }
        double nrm = norm2(v);
        for (double& e : v) e /= nrm;
        return v;
      };
    case SetDescription::Kind::FrameImage: {
      const Frame* frame = set.frame;
      return [frame, k = set.k](Rng& rng) {
        std::size_t n = frame->n();
        Vector coeff(n, 0.0);
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = 0; i < k; ++i) {
          std::size_t j = i + rng.below(n - i);
          std::swap(idx[i], idx[j]);
          coeff[idx[i]] = rng.normal();
        }
        Vector v = matvec(frame->matrix, coeff);
        double nrm = norm2(v);
        if (nrm <= 0.0) return Vector(frame->d(), 0.0);
        for (double& e : v) e /= nrm;
        return v;
      };
    }
  }
  fail(Status::Internal, "unknown set description");
}

}  // namespace

SmallBallVerification run_smallball_verification(const SmallBallConfig& cfg) {
  if (cfg.repetitions == 0 || cfg.sample_points == 0 || cfg.estimator_trials == 0)
    fail(Status::BadArgs, "repetitions, sample points, and estimator trials must be >= 1");
  if (cfg.u <= 0.0 || cfg.t < 0.0) fail(Status::BadArgs, "need u > 0 and t >= 0");
  if (cfg.ensemble.normalization != Normalization::None)
    fail(Status::BadArgs, "the concentration inequality is stated for un-normalized rows");

  DirectionSampler sampler = set_sampler(cfg.set, cfg.ensemble.d);

  SmallBallEstimate q =
      small_ball_estimate(cfg.ensemble, sampler, 2.0 * cfg.u, cfg.estimator_trials,
                          substream_seed(cfg.seed, 11));
  WidthEstimate w =
      empirical_mean_width(cfg.ensemble, cfg.set, cfg.estimator_trials, substream_seed(cfg.seed, 12));

  // Finite surrogate of S; the reported check uses the sampled infimum.
  Rng surrogate_rng(substream_seed(cfg.seed, 13));
  std::vector<Vector> points;
  points.reserve(cfg.sample_points);
  for (std::size_t i = 0; i < cfg.sample_points; ++i) points.push_back(sampler(surrogate_rng));

  SmallBallVerification out;
  out.u = cfg.u;
  out.t = cfg.t;
  out.repetitions = cfg.repetitions;
  out.q_hat = q.c_hat;
  out.w_hat = w.w_hat;
  out.expected = 1.0 - std::exp(-cfg.t * cfg.t / 2.0);
  out.rhs = cfg.u * std::sqrt(double(cfg.ensemble.m)) * q.c_hat - 2.0 * w.w_hat - cfg.u * cfg.t;

  for (std::size_t r = 0; r < cfg.repetitions; ++r) {
    EnsembleSpec es = cfg.ensemble;
    es.seed = substream_seed(cfg.seed, 1000 + r);
    DenseMatrix phi = sample(es);
    double inf_value = std::numeric_limits<double>::infinity();
    for (const Vector& x : points) inf_value = std::min(inf_value, norm2(matvec(phi, x)));
    if (inf_value >= out.rhs) ++out.holds;
  }
  out.fraction = double(out.holds) / double(cfg.repetitions);
  return out;
}

std::string smallball_result_to_json(const SmallBallVerification& result) {
  nlohmann::json j;
  j["schema"] = 1;
  j["u"] = result.u;
  j["t"] = result.t;
  j["repetitions"] = result.repetitions;
  j["holds"] = result.holds;
  j["fraction"] = result.fraction;
  j["q_hat"] = result.q_hat;
  j["w_hat"] = result.w_hat;
  j["expected"] = result.expected;
  j["rhs"] = result.rhs;
  return j.dump();
}

ArtifactPaths summarize(const std::string& out_dir, const std::string& label,
                        const std::string& config_json, const std::string& result_json,
                        const std::string& csv_text, std::uint64_t seed) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(Status::IoError, "cannot create output directory " + out_dir + ": " + ec.message());

  ArtifactPaths paths;
  paths.json_path = (fs::path(out_dir) / (label + ".json")).string();
  write_text_file_atomic(paths.json_path, result_json);
  if (!csv_text.empty()) {
    paths.csv_path = (fs::path(out_dir) / (label + ".csv")).string();
    write_text_file_atomic(paths.csv_path, csv_text);
  }

  nlohmann::json manifest;
  manifest["schema"] = 1;
  manifest["tool_version"] = kVersion;
  manifest["subcommand"] = label;
  manifest["config"] = config_json.empty() ? nlohmann::json(nullptr)
                                           : nlohmann::json::parse(config_json);
  manifest["config_hash"] = config_hash_hex(config_json);
  manifest["seed"] = seed;
  manifest["started"] = iso_utc(kProcessStart);
  manifest["finished"] = iso_utc(std::chrono::system_clock::now());
  nlohmann::json outputs = nlohmann::json::array();
  outputs.push_back(fs::path(paths.json_path).filename().string());
  if (!paths.csv_path.empty()) outputs.push_back(fs::path(paths.csv_path).filename().string());
  manifest["outputs"] = outputs;
  paths.manifest_path = (fs::path(out_dir) / (label + ".manifest.json")).string();
  write_text_file_atomic(paths.manifest_path, manifest.dump());
  return paths;
}

}  // namespace fsl
