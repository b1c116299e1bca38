#include <doctest.h>

#include <unistd.h>

#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "fsl/io.hpp"
#include "fsl/matrix.hpp"
#include "fsl/rng.hpp"

using fsl::DenseMatrix;
using fsl::Vector;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("fsl_io_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

DenseMatrix awkward_matrix() {
  fsl::Rng rng(1234);
  DenseMatrix m(3, 4);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) m.at(i, j) = rng.normal() * std::pow(10.0, rng.below(7));
  m.at(0, 0) = 0.1;  // not exactly representable
  m.at(1, 1) = -0.0;
  m.at(2, 2) = 1e-300;
  m.at(2, 3) = 12345678901234568.0;
  return m;
}

bool bitwise_equal(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double x = a.at(i, j), y = b.at(i, j);
      if (std::memcmp(&x, &y, sizeof(double)) != 0) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("format_double round-trips exactly") {
  const double values[] = {0.0,   -0.0,    0.1,     1.0 / 3.0, 1e-300, 1e300,
                           -1.5,  2.0,     1e17,    -0.0625,   3.14,   5e-324,
                           123.0, 1.0e22,  0.3 - 0.1};
  for (double v : values) {
    const std::string s = fsl::format_double(v);
    double back = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), back);
    REQUIRE(res.ec == std::errc());
    CHECK(std::memcmp(&back, &v, sizeof(double)) == 0);
  }
  CHECK(fsl::format_double(0.0) == "0");
  CHECK(fsl::format_double(-1.5) == "-1.5");
  CHECK(fsl::format_double(0.1) == "0.1");  // shortest form, not 17 digits
}

TEST_CASE("csv round-trip is bit exact") {
  TempDir dir;
  const DenseMatrix m = awkward_matrix();
  fsl::write_matrix(dir.file("m.csv"), m, fsl::MatrixFormat::Csv);
  const DenseMatrix back = fsl::read_matrix(dir.file("m.csv"), fsl::MatrixFormat::Csv);
  CHECK(bitwise_equal(m, back));
}

TEST_CASE("binary round-trip is bit exact and sniffable") {
  TempDir dir;
  const DenseMatrix m = awkward_matrix();
  fsl::write_matrix(dir.file("m.bin"), m, fsl::MatrixFormat::Binary);
  CHECK(bitwise_equal(m, fsl::read_matrix(dir.file("m.bin"), fsl::MatrixFormat::Binary)));
  // Sniffing: same file without a format hint.
  CHECK(bitwise_equal(m, fsl::read_matrix(dir.file("m.bin"))));
  // A csv file is sniffed as csv.
  fsl::write_matrix(dir.file("m.csv"), m, fsl::MatrixFormat::Csv);
  CHECK(bitwise_equal(m, fsl::read_matrix(dir.file("m.csv"))));
}

TEST_CASE("csv reader tolerates whitespace and crlf") {
  TempDir dir;
  {
    std::ofstream f(dir.file("w.csv"), std::ios::binary);
    f << " 1 ,\t2\r\n\r\n3, -4.5\r\n";
  }
  const DenseMatrix m = fsl::read_matrix(dir.file("w.csv"));
  REQUIRE(m.rows() == 2);
  REQUIRE(m.cols() == 2);
  CHECK(m.at(0, 0) == 1.0);
  CHECK(m.at(0, 1) == 2.0);
  CHECK(m.at(1, 0) == 3.0);
  CHECK(m.at(1, 1) == -4.5);
}

TEST_CASE("malformed inputs fail with io errors") {
  TempDir dir;
  auto write_raw = [&](const std::string& name, const std::string& body) {
    std::ofstream f(dir.file(name), std::ios::binary);
    f << body;
    return dir.file(name);
  };
  CHECK_THROWS_AS(fsl::read_matrix(dir.file("missing.csv")), fsl::Error);
  CHECK_THROWS_AS(fsl::read_matrix(write_raw("ragged.csv", "1,2\n3\n")), fsl::Error);
  CHECK_THROWS_AS(fsl::read_matrix(write_raw("words.csv", "1,two\n")), fsl::Error);
  CHECK_THROWS_AS(fsl::read_matrix(write_raw("empty.csv", "")), fsl::Error);
  CHECK_THROWS_AS(fsl::read_matrix(write_raw("semi.csv", "1;2\n")), fsl::Error);
  // Binary with a truncated payload.
  const DenseMatrix m(2, 2, Vector{1, 2, 3, 4});
  fsl::write_matrix(dir.file("ok.bin"), m, fsl::MatrixFormat::Binary);
  std::string raw = fsl::read_text_file(dir.file("ok.bin"));
  raw.pop_back();
  write_raw("trunc.bin", raw);
  CHECK_THROWS_AS(fsl::read_matrix(dir.file("trunc.bin"), fsl::MatrixFormat::Binary), fsl::Error);
  // Wrong magic.
  CHECK_THROWS_AS(fsl::read_matrix(write_raw("magic.bin", "XXXX0123456789abcdef"),
                                   fsl::MatrixFormat::Binary),
                  fsl::Error);
  try {
    fsl::read_matrix(dir.file("missing.csv"));
    FAIL("expected throw");
  } catch (const fsl::Error& e) {
    CHECK(e.status() == fsl::Status::IoError);
  }
}

TEST_CASE("atomic text writes replace whole files") {
  TempDir dir;
  const std::string p = dir.file("note.txt");
  fsl::write_text_file_atomic(p, "first version");
  CHECK(fsl::read_text_file(p) == "first version");
  fsl::write_text_file_atomic(p, "second");
  CHECK(fsl::read_text_file(p) == "second");
  // No temp file is left behind.
  CHECK_FALSE(std::filesystem::exists(p + ".tmp"));
}
