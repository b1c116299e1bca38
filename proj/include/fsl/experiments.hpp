#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fsl/decoders.hpp"
#include "fsl/frames.hpp"
#include "fsl/properties.hpp"
#include "fsl/sensing.hpp"

namespace fsl {

enum class DecoderKind { BpEq, Qcbp, Synthesis, Analysis };

std::string decoder_name(DecoderKind kind);
DecoderKind decoder_from_name(const std::string& name);

struct FrameSpec {
  enum class Kind { Identity, Gaussian, DctOvercomplete, FromFile };
  Kind kind = Kind::Identity;
  std::size_t d = 0;
  std::size_t n = 0;  // gaussian only; identity and dct derive n from d
  std::uint64_t seed = 0;
  std::string path;
};

Frame build_frame(const FrameSpec& spec);
std::string frame_spec_to_json(const FrameSpec& spec);
FrameSpec frame_spec_from_json(const std::string& text);

struct PhaseConfig {
  std::size_t d = 0;
  std::size_t n = 0;
  FrameSpec frame;
  EnsembleSpec ensemble;  // m and seed overridden per cell/trial
  std::vector<std::size_t> k_list;
  std::vector<std::size_t> m_list;
  std::size_t trials = 1;
  double success_threshold = kTol.success_rel_err;
  std::uint64_t seed = 0;
  DecoderKind decoder = DecoderKind::BpEq;
  double eta = 0.0;
  std::size_t threads = 1;
};

std::string phase_config_to_json(const PhaseConfig& cfg);
PhaseConfig phase_config_from_json(const std::string& text);

struct PhaseCell {
  std::size_t k = 0;
  std::size_t m = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  std::size_t decoder_failures = 0;
  double mean_rel_error = 0.0;  // over trials that decoded
  double max_rel_error = 0.0;
  double mean_decode_seconds = 0.0;  // timing lives in JSON only, never CSV
};

struct M50Entry {
  std::size_t k;
  double m50;  // NaN when the 0.5 level is not bracketed by the grid
};

struct GridResult {
  std::vector<PhaseCell> cells;  // k-major, then m ascending
  std::vector<M50Entry> m50;
  std::string config_hash;  // fnv1a64 of the canonical config JSON, hex
  std::uint64_t seed = 0;
};

GridResult run_phase_transition(const PhaseConfig& cfg);
std::string grid_result_to_json(const GridResult& grid);
GridResult grid_result_from_json(const std::string& text);
std::string grid_result_to_csv(const GridResult& grid);

struct SweepConfig {
  std::size_t d = 0;
  std::size_t m = 0;
  std::size_t k = 0;  // bound order; the isometry constant is checked at 2k
  EnsembleSpec ensemble;
  std::vector<double> eta_list;
  std::size_t matrices = 1;
  std::size_t instances = 1;  // (z, w) pairs per matrix and eta
  double delta_target = 0.6;  // required exact constant at order 2k after scaling
  std::size_t rejection_budget = 50;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  enum class Profile { PowerLaw, ExactSparse };
  Profile profile = Profile::PowerLaw;
};

std::string sweep_config_to_json(const SweepConfig& cfg);
SweepConfig sweep_config_from_json(const std::string& text);

struct SweepRow {
  std::size_t matrix_index = 0;
  double eta = 0.0;
  std::size_t instance_index = 0;
  double sigma_k = 0.0;  // l1 tail of the best k-term approximation
  double observed_error = 0.0;
  double bound = 0.0;
  bool violation = false;
};

struct SweepViolation {
  std::size_t matrix_index = 0;
  double eta = 0.0;
  std::size_t instance_index = 0;
  DenseMatrix a;
  Vector z0;
  Vector w;
  double observed_error = 0.0;
  double bound = 0.0;
};

struct SweepMatrix {
  std::size_t index = 0;
  bool admitted = false;  // scaled matrix met the target constant in budget
  std::size_t rejections = 0;
  double delta = 0.0;  // exact constant at order 2k after scaling
  double rho = 0.0;
  double tau = 0.0;
};

struct SweepResult {
  std::vector<SweepMatrix> matrices;
  std::vector<SweepRow> rows;
  std::vector<SweepViolation> violations;
  std::size_t admitted_matrices = 0;
  std::string config_hash;
  std::uint64_t seed = 0;
};

SweepResult run_robustness_sweep(const SweepConfig& cfg);
std::string sweep_result_to_json(const SweepResult& result);
std::string sweep_result_to_csv(const SweepResult& result);

struct LemmaScalingConfig {
  EnsembleSpec b_spec;
  std::size_t k = 1;
  std::size_t trials = 100;
  std::size_t resample_budget = 50;
  std::uint64_t seed = 0;
};

std::string lemma_config_to_json(const LemmaScalingConfig& cfg);
LemmaScalingConfig lemma_config_from_json(const std::string& text);

struct LemmaTrial {
  std::size_t trial = 0;
  std::size_t resamples = 0;  // rejected B draws before one with the property
  bool base_certified = false;
  bool scaled_fails_certified = false;
  double witness_identity_error = 0.0;
  bool bp_failure_shown = false;
  double bp_failure_rel_error = 0.0;
  bool control_still_holds = false;  // D = I leaves the certified verdict alone
  bool ok = false;
  Vector diagonal;
  Vector witness;
  std::vector<std::size_t> support;
};

struct LemmaScalingResult {
  std::vector<LemmaTrial> trials;
  std::size_t successes = 0;
  std::string config_hash;
  std::uint64_t seed = 0;
};

LemmaScalingResult run_lemma_nsp_scaling(const LemmaScalingConfig& cfg);
std::string lemma_result_to_json(const LemmaScalingResult& result);
std::string lemma_result_to_csv(const LemmaScalingResult& result);

struct DemoStage {
  bool ok = false;
  std::string detail;
};

struct DemoReport {
  bool success = false;
  std::size_t retries_used = 0;
  std::size_t m = 0;  // rows at which the isometry target was met
  double delta_before = 0.0;
  double delta_after = 0.0;
  double invariance_gap = 0.0;
  double rel_error = 0.0;  // synthesis decoding error of the exhibited signal
  std::size_t failing_column = 0;   // frame column whose direction is missed
  double decoder_cost = 0.0;        // l1 cost of the decoder's minimizer
  double representation_cost = 0.0;  // cheapest exact representation of z0
  double best_scan_error = 0.0;      // largest decoding error seen in the scan
  Vector diagonal;
  Vector z0;
  std::array<DemoStage, 5> stages;
};

DemoReport run_theorem_dripbad_demo(std::size_t d, std::size_t n, std::size_t k,
                                    double delta_target, std::uint64_t seed,
                                    std::size_t retry_budget = 20);
std::string demo_report_to_json(const DemoReport& report);

struct SmallBallConfig {
  EnsembleSpec ensemble;
  SetDescription set;
  double u = 0.25;
  double t = 2.0;
  std::size_t repetitions = 500;
  std::size_t sample_points = 200;     // finite surrogate of S for the inf
  std::size_t estimator_trials = 2000;  // for the probability and width estimates
  std::uint64_t seed = 0;
};

struct SmallBallVerification {
  double u = 0.0;
  double t = 0.0;
  std::size_t repetitions = 0;
  std::size_t holds = 0;
  double fraction = 0.0;
  double q_hat = 0.0;  // small-ball frequency at threshold 2u
  double w_hat = 0.0;
  double expected = 0.0;  // 1 - exp(-t^2/2)
  double rhs = 0.0;       // u sqrt(m) q_hat - 2 w_hat - u t
};

SmallBallVerification run_smallball_verification(const SmallBallConfig& cfg);
std::string smallball_result_to_json(const SmallBallVerification& result);

// Writes result.json, result.csv (when csv_text nonempty), and manifest.json
// under out_dir; all writes are atomic. Returns the file paths written.
struct ArtifactPaths {
  std::string json_path;
  std::string csv_path;
  std::string manifest_path;
};

ArtifactPaths summarize(const std::string& out_dir, const std::string& label,
                        const std::string& config_json, const std::string& result_json,
                        const std::string& csv_text, std::uint64_t seed);

std::string config_hash_hex(const std::string& canonical_json);

}  // namespace fsl
