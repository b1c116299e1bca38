#include "fsl/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fsl {

namespace {

constexpr char kMagic[4] = {'F', 'S', 'M', '1'};

void put_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

void put_f64_le(std::string& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  put_u64_le(out, bits);
}

double get_f64_le(const unsigned char* p) {
  const std::uint64_t bits = get_u64_le(p);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(Status::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(Status::IoError, "cannot open " + tmp + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) fail(Status::IoError, "short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(Status::IoError, "rename " + tmp + " -> " + path + ": " + ec.message());
}

void write_matrix(const std::string& path, const DenseMatrix& m, MatrixFormat fmt) {
  std::string out;
  if (fmt == MatrixFormat::Binary) {
    out.append(kMagic, 4);
    put_u64_le(out, m.rows());
    put_u64_le(out, m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) put_f64_le(out, m.at(i, j));
  } else {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        if (j) out.push_back(',');
        out += format_double(m.at(i, j));
      }
      out.push_back('\n');
    }
  }
  write_text_file_atomic(path, out);
}

DenseMatrix read_matrix(const std::string& path, MatrixFormat fmt) {
  const std::string raw = read_text_file(path);
  if (fmt == MatrixFormat::Binary) {
    if (raw.size() < 20 || std::memcmp(raw.data(), kMagic, 4) != 0)
      fail(Status::IoError, path + " is not an FSM1 file");
    const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
    const std::uint64_t rows = get_u64_le(p + 4);
    const std::uint64_t cols = get_u64_le(p + 12);
    if (raw.size() != 20 + rows * cols * 8)
      fail(Status::IoError, path + ": FSM1 size mismatch");
    Vector data(rows * cols);
    for (std::uint64_t i = 0; i < rows * cols; ++i) data[i] = get_f64_le(p + 20 + 8 * i);
    return DenseMatrix(rows, cols, std::move(data));
  }
  std::vector<Vector> rows;
  std::size_t cols = 0;
  std::istringstream ss(raw);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Vector row;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      double v = 0.0;
      auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) fail(Status::IoError, path + ": bad number in CSV");
      row.push_back(v);
      p = res.ptr;
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p < end) {
        if (*p != ',') fail(Status::IoError, path + ": expected comma in CSV");
        ++p;
      }
    }
    if (rows.empty()) cols = row.size();
    if (row.size() != cols) fail(Status::IoError, path + ": ragged CSV rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(Status::IoError, path + ": empty matrix file");
  Vector data;
  data.reserve(rows.size() * cols);
  for (auto& r : rows) data.insert(data.end(), r.begin(), r.end());
  return DenseMatrix(rows.size(), cols, std::move(data));
}

DenseMatrix read_matrix(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(Status::IoError, "cannot open " + path);
  char head[4] = {0, 0, 0, 0};
  f.read(head, 4);
  const bool bin = f.gcount() == 4 && std::memcmp(head, kMagic, 4) == 0;
  return read_matrix(path, bin ? MatrixFormat::Binary : MatrixFormat::Csv);
}

}  // namespace fsl
