// Exercises the C interface end to end: handle lifecycle, thread-local error
// state, exit-code vocabulary, and the JSON payloads behind each entry point.
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fsl.h"

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("fsl_capi_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

// Owns the char* results so failed CHECKs cannot leak them.
struct OutStr {
  char* p = nullptr;
  ~OutStr() { fsl_string_free(p); }
  std::string str() const { return p == nullptr ? std::string() : std::string(p); }
  nlohmann::json json() const { return nlohmann::json::parse(str()); }
};

struct MatPtr {
  fsl_matrix* p = nullptr;
  explicit MatPtr(fsl_matrix* m) : p(m) {}
  ~MatPtr() { fsl_matrix_free(p); }
  MatPtr(const MatPtr&) = delete;
  MatPtr& operator=(const MatPtr&) = delete;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  REQUIRE(bool(f));
  f << text;
}

std::vector<double> copy_data(const fsl_matrix* m) {
  const double* d = fsl_matrix_data(m);
  return std::vector<double>(d, d + fsl_matrix_rows(m) * fsl_matrix_cols(m));
}

std::string gaussian_spec(std::size_t m, std::size_t d, std::uint64_t seed,
                          const std::string& normalization = "none") {
  nlohmann::json j;
  j["family"] = "gaussian";
  j["m"] = m;
  j["d"] = d;
  j["seed"] = seed;
  j["normalization"] = normalization;
  return j.dump();
}

// Saves a freshly generated or hand-built matrix as CSV and returns its path.
std::string save_csv(const TempDir& dir, const std::string& name, const std::string& spec) {
  MatPtr m(fsl_gen_matrix(spec.c_str()));
  REQUIRE(m.p != nullptr);
  std::string path = dir.file(name);
  REQUIRE(fsl_matrix_save(m.p, path.c_str(), "csv") == 0);
  return path;
}

}  // namespace

TEST_CASE("c api: version and thread-local error state") {
  CHECK(std::string(fsl_version()) == "0.1.0");

  // A failing call records message + status; the next success clears both.
  fsl_matrix* bad = fsl_gen_matrix(nullptr);
  CHECK(bad == nullptr);
  CHECK(fsl_last_status() == 2);
  CHECK(std::string(fsl_last_error()) == "spec JSON is null");

  MatPtr good(fsl_gen_matrix(gaussian_spec(2, 3, 1).c_str()));
  CHECK(good.p != nullptr);
  CHECK(fsl_last_status() == 0);
  CHECK(std::string(fsl_last_error()).empty());

  // Null-tolerant teardown helpers.
  fsl_string_free(nullptr);
  fsl_matrix_free(nullptr);
  CHECK(fsl_matrix_rows(nullptr) == 0);
  CHECK(fsl_matrix_cols(nullptr) == 0);
  CHECK(fsl_matrix_data(nullptr) == nullptr);
}

TEST_CASE("c api: matrix generation determinism and validation") {
  MatPtr a(fsl_gen_matrix(gaussian_spec(4, 6, 3).c_str()));
  REQUIRE(a.p != nullptr);
  CHECK(fsl_matrix_rows(a.p) == 4);
  CHECK(fsl_matrix_cols(a.p) == 6);
  std::vector<double> va = copy_data(a.p);
  for (double v : va) CHECK(std::isfinite(v));

  // Same spec, fresh handle: bit-identical entries.
  MatPtr b(fsl_gen_matrix(gaussian_spec(4, 6, 3).c_str()));
  REQUIRE(b.p != nullptr);
  CHECK(std::memcmp(va.data(), fsl_matrix_data(b.p), va.size() * sizeof(double)) == 0);

  // A different seed must actually change the draw.
  MatPtr c(fsl_gen_matrix(gaussian_spec(4, 6, 4).c_str()));
  REQUIRE(c.p != nullptr);
  CHECK(std::memcmp(va.data(), fsl_matrix_data(c.p), va.size() * sizeof(double)) != 0);

  // Row normalization scales the same draw by 1/sqrt(m); m=4 makes that exact.
  MatPtr n(fsl_gen_matrix(gaussian_spec(4, 6, 3, "rows-by-inv-sqrt-m").c_str()));
  REQUIRE(n.p != nullptr);
  std::vector<double> vn = copy_data(n.p);
  for (std::size_t i = 0; i < va.size(); ++i) CHECK(vn[i] == 0.5 * va[i]);

  MatPtr r(fsl_gen_matrix(R"({"family":"rademacher","m":3,"d":5,"seed":9})"));
  REQUIRE(r.p != nullptr);
  for (double v : copy_data(r.p)) CHECK(std::abs(v) == 1.0);

  CHECK(fsl_gen_matrix(R"({"family":"cauchy","m":2,"d":2,"seed":1})") == nullptr);
  CHECK(fsl_last_status() == 2);
  CHECK(fsl_gen_matrix(R"({"family":"gaussian","m":0,"d":2,"seed":1})") == nullptr);
  CHECK(fsl_last_status() == 2);
  CHECK(fsl_gen_matrix("{not json") == nullptr);
  CHECK(fsl_last_status() == 2);
  CHECK(std::string(fsl_last_error()).find("malformed JSON") != std::string::npos);
}

TEST_CASE("c api: frame generation") {
  MatPtr id(fsl_gen_frame(R"({"kind":"identity","d":4})"));
  REQUIRE(id.p != nullptr);
  CHECK(fsl_matrix_rows(id.p) == 4);
  CHECK(fsl_matrix_cols(id.p) == 4);
  std::vector<double> v = copy_data(id.p);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(v[i * 4 + j] == (i == j ? 1.0 : 0.0));

  MatPtr dct(fsl_gen_frame(R"({"kind":"dct-overcomplete","d":4})"));
  REQUIRE(dct.p != nullptr);
  CHECK(fsl_matrix_rows(dct.p) == 4);
  CHECK(fsl_matrix_cols(dct.p) == 8);

  MatPtr g1(fsl_gen_frame(R"({"kind":"gaussian","d":3,"n":5,"seed":9})"));
  MatPtr g2(fsl_gen_frame(R"({"kind":"gaussian","d":3,"n":5,"seed":9})"));
  REQUIRE(g1.p != nullptr);
  REQUIRE(g2.p != nullptr);
  CHECK(fsl_matrix_rows(g1.p) == 3);
  CHECK(fsl_matrix_cols(g1.p) == 5);
  CHECK(std::memcmp(fsl_matrix_data(g1.p), fsl_matrix_data(g2.p), 15 * sizeof(double)) == 0);

  // from-file round-trips through disk.
  TempDir dir;
  std::string path = dir.file("dct.csv");
  REQUIRE(fsl_matrix_save(dct.p, path.c_str(), "csv") == 0);
  nlohmann::json spec;
  spec["kind"] = "from-file";
  spec["path"] = path;
  MatPtr ff(fsl_gen_frame(spec.dump().c_str()));
  REQUIRE(ff.p != nullptr);
  CHECK(fsl_matrix_rows(ff.p) == 4);
  CHECK(fsl_matrix_cols(ff.p) == 8);
  CHECK(std::memcmp(fsl_matrix_data(ff.p), fsl_matrix_data(dct.p), 32 * sizeof(double)) == 0);

  CHECK(fsl_gen_frame(R"({"kind":"wavelet","d":4})") == nullptr);
  CHECK(fsl_last_status() == 2);
  CHECK(fsl_gen_frame(nullptr) == nullptr);
  CHECK(fsl_last_status() == 2);
}

TEST_CASE("c api: save and load round trips") {
  TempDir dir;
  MatPtr m(fsl_gen_matrix(gaussian_spec(3, 5, 7).c_str()));
  REQUIRE(m.p != nullptr);
  std::vector<double> vm = copy_data(m.p);

  std::string csv = dir.file("m.csv");
  std::string bin = dir.file("m.bin");
  REQUIRE(fsl_matrix_save(m.p, csv.c_str(), "csv") == 0);
  REQUIRE(fsl_matrix_save(m.p, bin.c_str(), "bin") == 0);

  // CSV text uses shortest round-trip formatting, so both formats are exact.
  for (const std::string& path : {csv, bin}) {
    for (const char* fmt : {static_cast<const char*>(nullptr), path == csv ? "csv" : "bin"}) {
      MatPtr back(fsl_matrix_load(path.c_str(), fmt));
      REQUIRE(back.p != nullptr);
      CHECK(fsl_matrix_rows(back.p) == 3);
      CHECK(fsl_matrix_cols(back.p) == 5);
      CHECK(std::memcmp(vm.data(), fsl_matrix_data(back.p), vm.size() * sizeof(double)) == 0);
    }
  }

  CHECK(fsl_matrix_save(m.p, dir.file("m.pq").c_str(), "parquet") == 2);
  CHECK(std::string(fsl_last_error()).find("unknown matrix format") != std::string::npos);
  CHECK(fsl_matrix_save(nullptr, csv.c_str(), "csv") == 2);
  CHECK(fsl_matrix_save(m.p, nullptr, "csv") == 2);

  CHECK(fsl_matrix_load(dir.file("missing.csv").c_str(), nullptr) == nullptr);
  CHECK(fsl_last_status() == 3);
  CHECK(fsl_matrix_load(nullptr, nullptr) == nullptr);
  CHECK(fsl_last_status() == 2);
}

TEST_CASE("c api: property checks map verdicts to exit codes") {
  TempDir dir;
  std::string id4 = save_csv(dir, "id4.csv", R"({"family":"gaussian","m":1,"d":1,"seed":1})");
  {
    MatPtr id(fsl_gen_frame(R"({"kind":"identity","d":4})"));
    REQUIRE(id.p != nullptr);
    REQUIRE(fsl_matrix_save(id.p, id4.c_str(), "csv") == 0);
  }
  std::string ones13 = dir.file("ones13.csv");
  write_file(ones13, "1,1,1\n");
  std::string zeros24 = dir.file("zeros24.csv");
  write_file(zeros24, "0,0,0,0\n0,0,0,0\n");
  std::string wide = save_csv(dir, "wide.csv", gaussian_spec(3, 30, 5));
  std::string dct4;
  {
    MatPtr dct(fsl_gen_frame(R"({"kind":"dct-overcomplete","d":4})"));
    REQUIRE(dct.p != nullptr);
    dct4 = dir.file("dct4.csv");
    REQUIRE(fsl_matrix_save(dct.p, dct4.c_str(), "csv") == 0);
  }
  auto args = [&](std::initializer_list<std::pair<std::string, nlohmann::json>> kv) {
    nlohmann::json j;
    for (const auto& [k, v] : kv) j[k] = v;
    return j.dump();
  };

  SUBCASE("certified-holds is exit 0") {
    OutStr out;
    CHECK(fsl_check("coherence", args({{"matrix", id4}}).c_str(), &out.p) == 0);
    nlohmann::json doc = out.json();
    CHECK(doc.at("property") == "coherence");
    CHECK(doc.at("verdict") == "certified-holds");
    CHECK(doc.at("value").get<double>() == 0.0);

    // The report pointer is optional.
    CHECK(fsl_check("coherence", args({{"matrix", id4}}).c_str(), nullptr) == 0);

    OutStr rip;
    CHECK(fsl_check("rip", args({{"matrix", id4}, {"k", 2}}).c_str(), &rip.p) == 0);
    CHECK(rip.json().at("value").get<double>() == 0.0);

    OutStr frip;
    CHECK(fsl_check("f-rip", args({{"matrix", id4}, {"frame", id4}, {"k", 2}}).c_str(),
                    &frip.p) == 0);
    CHECK(frip.json().at("value").get<double>() == 0.0);

    OutStr fnsp;
    CHECK(fsl_check("f-nsp", args({{"matrix", id4}, {"frame", id4}, {"k", 1}}).c_str(),
                    &fnsp.p) == 0);
    CHECK(fnsp.json().at("verdict") == "certified-holds");
  }

  SUBCASE("certified-fails is exit 10") {
    OutStr out;
    CHECK(fsl_check("nsp", args({{"matrix", ones13}, {"k", 1}}).c_str(), &out.p) == 10);
    CHECK(out.json().at("verdict") == "certified-fails");

    OutStr rwp;
    CHECK(fsl_check("rwp",
                    args({{"matrix", zeros24}, {"k", 4}, {"c0", 0.5}, {"c1", 0.5},
                          {"trials", 20}, {"seed", 1}})
                        .c_str(),
                    &rwp.p) == 10);
    CHECK(rwp.json().at("verdict") == "certified-fails");
  }

  SUBCASE("estimates are exit 11") {
    OutStr q;
    CHECK(fsl_check("quotient", args({{"matrix", id4}, {"trials", 40}, {"seed", 1}}).c_str(),
                    &q.p) == 11);
    CHECK(q.json().at("verdict") == "estimate");

    OutStr sp;
    CHECK(fsl_check("split", args({{"matrix", dct4}, {"k", 1}, {"trials", 60}, {"seed", 2}})
                                .c_str(),
                    &sp.p) == 11);
    CHECK(sp.json().at("property") == "split");

    // Frame-only properties accept the frame under its own key too.
    OutStr sp2;
    CHECK(fsl_check("split", args({{"frame", dct4}, {"s", 1}, {"trials", 60}, {"seed", 2}})
                                 .c_str(),
                    &sp2.p) == 11);
    CHECK(sp2.str() == sp.str());

    OutStr star;
    CHECK(fsl_check("rnsp-star",
                    args({{"frame", id4}, {"k", 1}, {"rho", 0.7}, {"trials", 50}, {"seed", 3}})
                        .c_str(),
                    &star.p) == 11);
    CHECK(star.json().at("value").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("not-checked is exit 12") {
    // C(30,6) far exceeds the support-enumeration budget.
    OutStr out;
    CHECK(fsl_check("rip", args({{"matrix", wide}, {"k", 6}}).c_str(), &out.p) == 12);
    nlohmann::json doc = out.json();
    CHECK(doc.at("verdict") == "not-checked");
    CHECK(doc.at("reason").get<std::string>().find("enumeration cap") != std::string::npos);

    // The isometry-to-null-space transfer has a hard validity ceiling.
    OutStr far;
    CHECK(fsl_check("rnsp-from-rip", args({{"delta", 0.7}}).c_str(), &far.p) == 12);
    CHECK(far.json().at("verdict") == "not-checked");
  }

  SUBCASE("isometry transfer reports both constants") {
    OutStr out;
    CHECK(fsl_check("rnsp-from-rip", args({{"delta", 0.5}}).c_str(), &out.p) == 0);
    nlohmann::json doc = out.json();
    const double denom = std::sqrt(1.0 - 0.25) - 0.5 / 4.0;
    CHECK(doc.at("params").at("rho").get<double>() ==
          doctest::Approx(0.5 / denom).epsilon(1e-12));
    CHECK(doc.at("params").at("tau").get<double>() ==
          doctest::Approx(std::sqrt(1.5) / denom).epsilon(1e-12));

    // Without an explicit delta it measures the matrix first.
    OutStr via;
    CHECK(fsl_check("rnsp-from-rip", args({{"matrix", id4}, {"k", 1}}).c_str(), &via.p) == 0);
    CHECK(via.json().at("params").at("delta").get<double>() == 0.0);
  }

  SUBCASE("argument errors are exit 2, io errors exit 3") {
    CHECK(fsl_check("sparkle", args({{"matrix", id4}}).c_str(), nullptr) == 2);
    CHECK(std::string(fsl_last_error()).find("unknown property") != std::string::npos);

    CHECK(fsl_check("coherence", nullptr, nullptr) == 2);
    CHECK(std::string(fsl_last_error()).find("matrix") != std::string::npos);

    CHECK(fsl_check("coherence", "{bad", nullptr) == 2);
    CHECK(std::string(fsl_last_error()).find("malformed JSON") != std::string::npos);

    CHECK(fsl_check("quotient", args({{"matrix", id4}, {"trials", 10}}).c_str(), nullptr) == 2);
    CHECK(std::string(fsl_last_error()).find("seed") != std::string::npos);

    CHECK(fsl_check("nsp", args({{"matrix", dir.file("nope.csv")}, {"k", 1}}).c_str(),
                    nullptr) == 3);
    CHECK(fsl_check(nullptr, "{}", nullptr) == 2);
  }
}

TEST_CASE("c api: decoding statuses and payloads") {
  TempDir dir;
  std::string id3 = dir.file("id3.csv");
  {
    MatPtr id(fsl_gen_frame(R"({"kind":"identity","d":3})"));
    REQUIRE(id.p != nullptr);
    REQUIRE(fsl_matrix_save(id.p, id3.c_str(), "csv") == 0);
  }
  std::string y0col = dir.file("y0col.csv");
  write_file(y0col, "0\n0\n0\n");
  std::string y0row = dir.file("y0row.csv");
  write_file(y0row, "0,0,0\n");
  std::string e1 = dir.file("e1.csv");
  write_file(e1, "1\n0\n0\n");
  std::string thin = dir.file("thin.csv");
  write_file(thin, "1,0\n1,0\n");
  std::string y12 = dir.file("y12.csv");
  write_file(y12, "1\n2\n");
  auto args = [&](const std::string& a, const std::string& y, double eta = -1.0,
                  const std::string& frame = "") {
    nlohmann::json j;
    j["matrix"] = a;
    j["y"] = y;
    if (eta >= 0.0) j["eta"] = eta;
    if (!frame.empty()) j["frame"] = frame;
    return j.dump();
  };

  SUBCASE("optimal solve is exit 0") {
    OutStr out;
    CHECK(fsl_decode("bp", args(id3, y0col).c_str(), &out.p) == 0);
    nlohmann::json doc = out.json();
    CHECK(doc.at("status") == "optimal");
    CHECK(doc.at("objective").get<double>() == 0.0);
    for (double v : doc.at("z_hat").get<std::vector<double>>()) CHECK(v == 0.0);
    CHECK(!doc.contains("x_hat"));

    // Measurements load from one-row files too, and bp_eq is the same method.
    OutStr row;
    CHECK(fsl_decode("bp_eq", args(id3, y0row).c_str(), &row.p) == 0);
    CHECK(row.str() == out.str());
  }

  SUBCASE("slack-dominated denoising returns zero immediately") {
    OutStr out;
    CHECK(fsl_decode("qcbp", args(id3, e1, 5.0).c_str(), &out.p) == 0);
    nlohmann::json doc = out.json();
    CHECK(doc.at("iterations").get<int>() == 0);
    for (double v : doc.at("z_hat").get<std::vector<double>>()) CHECK(v == 0.0);
  }

  SUBCASE("inconsistent systems are exit 21") {
    OutStr out;
    CHECK(fsl_decode("bp", args(thin, y12).c_str(), &out.p) == 21);
    CHECK(out.json().at("status") == "infeasible");
  }

  SUBCASE("frame decoders carry the frame argument") {
    OutStr syn;
    CHECK(fsl_decode("synthesis", args(id3, e1, 0.0, id3).c_str(), &syn.p) == 0);
    nlohmann::json sdoc = syn.json();
    REQUIRE(sdoc.contains("x_hat"));
    CHECK(sdoc.at("z_hat").get<std::vector<double>>()[0] == doctest::Approx(1.0).epsilon(1e-9));

    OutStr ana;
    CHECK(fsl_decode("analysis", args(id3, e1, 0.0, id3).c_str(), &ana.p) == 0);
    CHECK(!ana.json().contains("x_hat"));
  }

  SUBCASE("argument validation") {
    CHECK(fsl_decode("omp", args(id3, y0col).c_str(), nullptr) == 2);
    CHECK(std::string(fsl_last_error()).find("unknown decode method") != std::string::npos);

    nlohmann::json neg = nlohmann::json::parse(args(id3, e1));
    neg["eta"] = -1.0;
    CHECK(fsl_decode("qcbp", neg.dump().c_str(), nullptr) == 2);
    CHECK(std::string(fsl_last_error()).find("eta") != std::string::npos);

    nlohmann::json noy;
    noy["matrix"] = id3;
    CHECK(fsl_decode("bp", noy.dump().c_str(), nullptr) == 2);
    CHECK(std::string(fsl_last_error()).find("y") != std::string::npos);

    // A measurement file must be a single row or column.
    std::string fat = dir.file("fat.csv");
    write_file(fat, "1,2,3\n4,5,6\n");
    nlohmann::json bady = nlohmann::json::parse(args(id3, fat));
    CHECK(fsl_decode("bp", bady.dump().c_str(), nullptr) == 2);
    CHECK(std::string(fsl_last_error()).find("one-row or one-column") != std::string::npos);

    CHECK(fsl_decode(nullptr, "{}", nullptr) == 2);
  }
}

TEST_CASE("c api: experiments write artifacts and gate on assertions") {
  TempDir dir;
  nlohmann::json lemma;
  lemma["b_spec"] = nlohmann::json::parse(gaussian_spec(8, 16, 1));
  lemma["k"] = 1;
  lemma["trials"] = 2;
  lemma["seed"] = 21;

  SUBCASE("a passing run returns 0 and lists its artifacts") {
    std::string out_dir = dir.file("run1");
    OutStr out;
    CHECK(fsl_run_experiment("nsp-scaling", lemma.dump().c_str(), out_dir.c_str(), &out.p) == 0);
    nlohmann::json doc = out.json();
    CHECK(doc.at("assertions_pass") == true);
    CHECK(doc.at("successes").get<std::size_t>() == 2);
    const nlohmann::json& art = doc.at("artifacts");
    for (const char* key : {"json", "csv", "manifest"}) {
      std::string path = art.at(key).get<std::string>();
      CHECK(path.rfind(out_dir, 0) == 0);
      CHECK(std::filesystem::exists(path));
    }
    nlohmann::json manifest =
        nlohmann::json::parse(std::ifstream(art.at("manifest").get<std::string>()));
    CHECK(manifest.at("subcommand") == "nsp-scaling");
    CHECK(manifest.at("tool_version") == "0.1.0");
  }

  SUBCASE("an empty out_dir falls back to the environment") {
    std::string env_dir = dir.file("env_out");
    ::setenv("FSL_OUTPUT_DIR", env_dir.c_str(), 1);
    OutStr out;
    int rc = fsl_run_experiment("nsp-scaling", lemma.dump().c_str(), nullptr, &out.p);
    ::unsetenv("FSL_OUTPUT_DIR");
    CHECK(rc == 0);
    CHECK(std::filesystem::exists(env_dir + "/nsp-scaling.json"));
    CHECK(std::filesystem::exists(env_dir + "/nsp-scaling.manifest.json"));
  }

  SUBCASE("a demo without tabular output omits the csv artifact") {
    nlohmann::json demo;
    demo["d"] = 24;
    demo["n"] = 26;
    demo["k"] = 1;
    demo["delta_target"] = 0.8;
    demo["seed"] = 11;
    std::string out_dir = dir.file("run2");
    OutStr out;
    CHECK(fsl_run_experiment("f-rip", demo.dump().c_str(), out_dir.c_str(), &out.p) == 0);
    nlohmann::json doc = out.json();
    CHECK(doc.at("success") == true);
    CHECK(!doc.at("artifacts").contains("csv"));
  }

  SUBCASE("a failed assertion returns 30 with the report still written") {
    // All-zero circulant generator: the verification holds vacuously for every
    // repetition, so fraction is 1.0 and an impossible floor must trip.
    nlohmann::json cfg;
    cfg["ensemble"] = {{"family", "partial-circulant"},
                       {"m", 4},
                       {"d", 8},
                       {"seed", 3},
                       {"generator_vector", std::vector<double>(8, 0.0)},
                       {"omega", {0, 1, 2, 3}}};
    cfg["set"] = {{"kind", "sparse-sphere"}, {"k", 1}};
    cfg["u"] = 0.25;
    cfg["t"] = 2.0;
    cfg["repetitions"] = 3;
    cfg["sample_points"] = 8;
    cfg["estimator_trials"] = 8;
    cfg["seed"] = 5;
    cfg["min_fraction"] = 1.1;
    std::string out_dir = dir.file("run3");
    OutStr out;
    CHECK(fsl_run_experiment("smallball", cfg.dump().c_str(), out_dir.c_str(), &out.p) == 30);
    nlohmann::json doc = out.json();
    CHECK(doc.at("assertions_pass") == false);
    CHECK(doc.at("fraction").get<double>() == 1.0);
    CHECK(std::filesystem::exists(out_dir + "/smallball.json"));
  }

  SUBCASE("argument validation") {
    CHECK(fsl_run_experiment("annealing", "{}", dir.file("x").c_str(), nullptr) == 2);
    CHECK(std::string(fsl_last_error()).find("unknown experiment kind") != std::string::npos);
    CHECK(fsl_run_experiment("phase", "{oops", dir.file("x").c_str(), nullptr) == 2);
    CHECK(fsl_run_experiment(nullptr, "{}", nullptr, nullptr) == 2);
    CHECK(fsl_run_experiment("phase", nullptr, nullptr, nullptr) == 2);
  }
}
