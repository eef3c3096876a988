#pragma once

#include <string>

#include "tlmor/sysmodel.hpp"

namespace tlmor::bench {

/// Reads a real Matrix Market file (coordinate or array; general, symmetric or skew-symmetric).
/// Throws ParseError naming the file and line.
MatrixXd read_matrix_market(const std::string& path);

/// Writes M in dense array format with round-trip precision.
void write_matrix_market(const std::string& path, const MatrixXd& M);

struct ModelPaths {
  std::string A, B, C;
  /// <dir>/A.mtx, <dir>/B.mtx, <dir>/C.mtx
  static ModelPaths in_directory(const std::string& dir);
};

StateSpace load_model(const ModelPaths& paths);
void save_model(const std::string& dir, const StateSpace& sys);

}  // namespace tlmor::bench
