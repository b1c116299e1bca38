// Command-line front end. All substance lives behind the C API; this file
// parses arguments, assembles JSON argument documents, and maps results to
// the exit-code contract:
//   0 ok/holds/optimal, 2 bad arguments, 3 I/O,
//   10 certified-fails, 11 estimate, 12 not-checked,
//   20 iteration cap, 21 infeasible, 30 assertion failure, 70 internal.
// stdout carries exactly one JSON document per invocation; logs go to stderr.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fsl.h"

namespace {

using nlohmann::json;

int emit_error(int code, const std::string& message) {
  json doc;
  doc["schema"] = 1;
  doc["error"] = message;
  doc["status"] = code;
  std::cout << doc.dump() << "\n";
  std::cerr << "error: " << message << "\n";
  return code;
}

int emit_capi_failure(int code) {
  return emit_error(code, fsl_last_error());
}

// Accepts either inline JSON (first non-space byte is '{') or a path to a
// JSON file. err_code 3 when reading the file fails.
std::string load_doc(const std::string& arg, bool& ok, int& err_code, std::string& err) {
  ok = true;
  std::size_t pos = arg.find_first_not_of(" \t\r\n");
  if (pos != std::string::npos && arg[pos] == '{') return arg;
  std::ifstream in(arg, std::ios::binary);
  if (!in) {
    ok = false;
    err_code = 3;
    err = "cannot open " + arg;
    return "";
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct DocOrExit {
  std::string doc;
  int exit_code = -1;  // >= 0 when the caller must exit
};

DocOrExit load_doc_or_error(const std::string& arg) {
  bool ok = true;
  int code = 0;
  std::string err;
  std::string doc = load_doc(arg, ok, code, err);
  if (!ok) return {"", emit_error(code, err)};
  return {doc, -1};
}

int print_doc_and_exit(char* doc, int rc) {
  if (doc != nullptr) {
    std::cout << doc << "\n";
    fsl_string_free(doc);
  } else {
    return emit_capi_failure(rc);
  }
  return rc;
}

int run_gen(bool is_matrix, const std::string& spec_arg, const std::string& out_path,
            const std::string& format, std::optional<std::uint64_t> seed) {
  DocOrExit spec = load_doc_or_error(spec_arg);
  if (spec.exit_code >= 0) return spec.exit_code;

  json j;
  try {
    j = json::parse(spec.doc);
  } catch (const json::exception& e) {
    return emit_error(2, std::string("malformed spec JSON: ") + e.what());
  }
  if (seed.has_value()) j["seed"] = *seed;

  bool randomized = is_matrix;  // every ensemble family draws randomness
  if (!is_matrix) {
    std::string kind = j.value("kind", std::string());
    randomized = kind == "gaussian";
  }
  if (randomized && !j.contains("seed"))
    return emit_error(2, "randomized generation requires a seed (--seed or spec field)");

  std::string doc = j.dump();
  fsl_matrix* m = is_matrix ? fsl_gen_matrix(doc.c_str()) : fsl_gen_frame(doc.c_str());
  if (m == nullptr) return emit_capi_failure(fsl_last_status());

  int rc = fsl_matrix_save(m, out_path.c_str(), format.c_str());
  if (rc != 0) {
    fsl_matrix_free(m);
    return emit_capi_failure(rc);
  }
  json result;
  result["schema"] = 1;
  result["out"] = out_path;
  result["format"] = format;
  result["rows"] = fsl_matrix_rows(m);
  result["cols"] = fsl_matrix_cols(m);
  fsl_matrix_free(m);
  std::cout << result.dump() << "\n";
  return 0;
}

int run_experiment(const std::string& kind, const std::string& config_arg,
                   const std::string& out_dir, std::optional<std::uint64_t> seed,
                   std::optional<std::size_t> threads) {
  DocOrExit config = load_doc_or_error(config_arg);
  if (config.exit_code >= 0) return config.exit_code;

  json j;
  try {
    j = json::parse(config.doc);
  } catch (const json::exception& e) {
    return emit_error(2, std::string("malformed config JSON: ") + e.what());
  }
  if (seed.has_value()) j["seed"] = *seed;
  if (threads.has_value()) j["threads"] = *threads;
  if (!j.contains("seed"))
    return emit_error(2, "experiments require a seed (--seed or config field)");

  char* doc = nullptr;
  int rc = fsl_run_experiment(kind.c_str(), j.dump().c_str(), out_dir.c_str(), &doc);
  return print_doc_and_exit(doc, rc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frame-sparse recovery workbench"};
  app.set_version_flag("--version", std::string(fsl_version()));
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a sensing matrix or a frame");
  gen->require_subcommand(1);
  std::string gen_spec, gen_out, gen_format = "csv";
  std::uint64_t gen_seed = 0;
  auto add_gen_options = [&](CLI::App* cmd) {
    cmd->add_option("--spec", gen_spec, "spec JSON (inline or a file path)")->required();
    cmd->add_option("--out", gen_out, "output file")->required();
    cmd->add_option("--format", gen_format, "csv|bin")->check(CLI::IsMember({"csv", "bin"}));
    return cmd->add_option("--seed", gen_seed, "overrides the spec seed");
  };
  auto* gen_matrix = gen->add_subcommand("matrix", "sample from an ensemble spec");
  auto* gm_seed = add_gen_options(gen_matrix);
  auto* gen_frame = gen->add_subcommand("frame", "build from a frame spec");
  auto* gf_seed = add_gen_options(gen_frame);

  // check
  auto* check = app.add_subcommand("check", "run a property check");
  std::string property;
  check->add_option("property", property,
                    "coherence|rip|nsp|f-rip|f-nsp|rnsp-from-rip|rnsp-star|quotient|rwp|split")
      ->required();
  std::string check_matrix, check_frame;
  std::size_t check_k = 0, check_s = 0, check_q = 2, check_trials = 0;
  std::uint64_t check_seed = 0;
  double check_rho = 0.0, check_c0 = 0.0, check_c1 = 0.0, check_delta = 0.0;
  auto* cm = check->add_option("--matrix", check_matrix, "matrix file");
  auto* cf = check->add_option("--frame", check_frame, "frame matrix file");
  auto* ck = check->add_option("--k", check_k, "property order");
  auto* cs = check->add_option("--s", check_s, "splitting sparsity (split)");
  auto* cq = check->add_option("--q", check_q, "cone exponent, 1 or 2 (rnsp-star)");
  auto* ct = check->add_option("--trials", check_trials, "sampling trials");
  auto* cseed = check->add_option("--seed", check_seed, "sampling seed");
  auto* crho = check->add_option("--rho", check_rho, "cone parameter (rnsp-star)");
  auto* cc0 = check->add_option("--c0", check_c0, "width constant (rwp)");
  auto* cc1 = check->add_option("--c1", check_c1, "kernel constant (rwp)");
  auto* cdelta = check->add_option("--delta", check_delta, "isometry constant (rnsp-from-rip)");

  // decode
  auto* decode = app.add_subcommand("decode", "run a decoder");
  std::string decode_method, decode_matrix, decode_y, decode_frame;
  double decode_eta = 0.0;
  decode->add_option("--method", decode_method, "bp|qcbp|synthesis|analysis")->required();
  decode->add_option("--matrix", decode_matrix, "sensing matrix file")->required();
  decode->add_option("--y", decode_y, "measurement vector file")->required();
  auto* df = decode->add_option("--frame", decode_frame, "frame file (synthesis/analysis)");
  decode->add_option("--eta", decode_eta, "noise radius (default 0)");

  // experiment pipelines
  std::string cfg_arg, out_dir;
  std::uint64_t run_seed = 0;
  std::size_t run_threads = 0;
  CLI::Option *seed_opts[4], *thread_opts[4];
  auto add_run_options = [&](CLI::App* cmd, int slot, bool config_required) {
    auto* copt = cmd->add_option("--config", cfg_arg, "config JSON (inline or a file path)");
    if (config_required) copt->required();
    cmd->add_option("--out", out_dir, "output directory (default $FSL_OUTPUT_DIR or .)");
    seed_opts[slot] = cmd->add_option("--seed", run_seed, "overrides the config seed");
    thread_opts[slot] = cmd->add_option("--threads", run_threads, "caps worker threads");
  };
  auto* phase = app.add_subcommand("phase", "phase-transition grid");
  add_run_options(phase, 0, true);
  auto* sweep = app.add_subcommand("sweep", "noisy recovery against the certified error bound");
  add_run_options(sweep, 1, true);
  auto* counter = app.add_subcommand("counterexample", "constructive counterexample pipelines");
  counter->require_subcommand(1);
  auto* nsp_scaling = counter->add_subcommand(
      "nsp-scaling", "column scaling that certifiably breaks the null space property");
  add_run_options(nsp_scaling, 2, false);
  auto* f_rip = counter->add_subcommand(
      "f-rip", "isometry constant blind to frame scaling while decoding breaks");
  std::string frip_cfg;
  f_rip->add_option("--config", frip_cfg, "config JSON (inline or a file path)")->required();
  f_rip->add_option("--out", out_dir, "output directory (default $FSL_OUTPUT_DIR or .)");
  auto* frip_seed = f_rip->add_option("--seed", run_seed, "overrides the config seed");
  auto* verify = app.add_subcommand("verify", "statistical verification pipelines");
  verify->require_subcommand(1);
  auto* smallball = verify->add_subcommand(
      "smallball", "empirical lower bound on the sampled infimum of the measurement norm");
  add_run_options(smallball, 3, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (gen_matrix->parsed() || gen_frame->parsed()) {
    bool is_matrix = gen_matrix->parsed();
    CLI::Option* seed_opt = is_matrix ? gm_seed : gf_seed;
    std::optional<std::uint64_t> seed;
    if (seed_opt->count() > 0) seed = gen_seed;
    return run_gen(is_matrix, gen_spec, gen_out, gen_format, seed);
  }

  if (check->parsed()) {
    json args;
    if (cm->count()) args["matrix"] = check_matrix;
    if (cf->count()) args["frame"] = check_frame;
    if (ck->count()) args["k"] = check_k;
    if (cs->count()) args["s"] = check_s;
    if (cq->count()) args["q"] = check_q;
    if (ct->count()) args["trials"] = check_trials;
    if (cseed->count()) args["seed"] = check_seed;
    if (crho->count()) args["rho"] = check_rho;
    if (cc0->count()) args["c0"] = check_c0;
    if (cc1->count()) args["c1"] = check_c1;
    if (cdelta->count()) args["delta"] = check_delta;
    char* doc = nullptr;
    int rc = fsl_check(property.c_str(), args.dump().c_str(), &doc);
    return print_doc_and_exit(doc, rc);
  }

  if (decode->parsed()) {
    json args;
    args["matrix"] = decode_matrix;
    args["y"] = decode_y;
    if (df->count()) args["frame"] = decode_frame;
    args["eta"] = decode_eta;
    char* doc = nullptr;
    int rc = fsl_decode(decode_method.c_str(), args.dump().c_str(), &doc);
    return print_doc_and_exit(doc, rc);
  }

  auto seed_of = [&](int slot) {
    std::optional<std::uint64_t> s;
    if (seed_opts[slot]->count() > 0) s = run_seed;
    return s;
  };
  auto threads_of = [&](int slot) {
    std::optional<std::size_t> t;
    if (thread_opts[slot]->count() > 0) t = run_threads;
    return t;
  };

  if (phase->parsed()) return run_experiment("phase", cfg_arg, out_dir, seed_of(0), threads_of(0));
  if (sweep->parsed()) return run_experiment("sweep", cfg_arg, out_dir, seed_of(1), threads_of(1));
  if (nsp_scaling->parsed()) {
    if (cfg_arg.empty())
      cfg_arg = R"({"b_spec":{"family":"gaussian","m":4,"d":8},"k":1,"trials":100,"resample_budget":50})";
    return run_experiment("nsp-scaling", cfg_arg, out_dir, seed_of(2), threads_of(2));
  }
  if (f_rip->parsed()) {
    std::optional<std::uint64_t> s;
    if (frip_seed->count() > 0) s = run_seed;
    return run_experiment("f-rip", frip_cfg, out_dir, s, std::nullopt);
  }
  if (smallball->parsed())
    return run_experiment("smallball", cfg_arg, out_dir, seed_of(3), threads_of(3));

  return emit_error(2, "no subcommand selected");
}
