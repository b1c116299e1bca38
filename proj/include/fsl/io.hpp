#pragma once

#include <string>

#include "fsl/matrix.hpp"

namespace fsl {

enum class MatrixFormat { Csv, Binary };

// CSV: plain rows of decimal floats, comma separated, no header.
// Binary "FSM1": magic FSM1, u64 LE rows, u64 LE cols, row-major f64 LE.
DenseMatrix read_matrix(const std::string& path);  // format sniffed from content
DenseMatrix read_matrix(const std::string& path, MatrixFormat fmt);
void write_matrix(const std::string& path, const DenseMatrix& m, MatrixFormat fmt);

// Shortest decimal string that round-trips the double exactly.
std::string format_double(double v);

std::string read_text_file(const std::string& path);
// Write via temp file + rename so readers never observe a partial file.
void write_text_file_atomic(const std::string& path, const std::string& content);

}  // namespace fsl
