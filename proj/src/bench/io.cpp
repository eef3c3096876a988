#include "tlmor/bench/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace tlmor::bench {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return s;
}

bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '%') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

double parse_real(const std::string& tok, const std::string& file, int line) {
  double v = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ParseError(file, line, "invalid number '" + tok + "'");
  return v;
}

long parse_index(const std::string& tok, const std::string& file, int line) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) throw ParseError(file, line, "invalid integer '" + tok + "'");
  return v;
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

}  // namespace

MatrixXd read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw ParseError(path, 1, "empty file");
  ++lineno;
  const auto head = tokens(lower(line));
  if (head.size() != 5 || head[0] != "%%matrixmarket" || head[1] != "matrix")
    throw ParseError(path, lineno, "malformed Matrix Market header");
  const std::string& format = head[2];
  const std::string& field = head[3];
  const std::string& symmetry = head[4];
  if (format != "coordinate" && format != "array") throw ParseError(path, lineno, "unsupported format '" + format + "'");
  if (field != "real" && field != "integer" && field != "double")
    throw ParseError(path, lineno, "unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric")
    throw ParseError(path, lineno, "unsupported symmetry '" + symmetry + "'");

  do {
    if (!std::getline(in, line)) throw ParseError(path, lineno + 1, "missing size line");
    ++lineno;
  } while (blank_or_comment(line));
  const auto size = tokens(line);
  const bool coord = format == "coordinate";
  if (size.size() != (coord ? 3u : 2u)) throw ParseError(path, lineno, "malformed size line");
  const long rows = parse_index(size[0], path, lineno);
  const long cols = parse_index(size[1], path, lineno);
  if (rows < 1 || cols < 1) throw ParseError(path, lineno, "nonpositive dimensions");
  const bool sym = symmetry != "general";
  if (sym && rows != cols) throw ParseError(path, lineno, "symmetric storage requires a square matrix");
  const double mirror = symmetry == "skew-symmetric" ? -1.0 : 1.0;

  MatrixXd M = MatrixXd::Zero(rows, cols);
  if (coord) {
    const long nnz = parse_index(size[2], path, lineno);
    if (nnz < 0) throw ParseError(path, lineno, "negative entry count");
    long seen = 0;
    while (seen < nnz && std::getline(in, line)) {
      ++lineno;
      if (blank_or_comment(line)) continue;
      const auto t = tokens(line);
      if (t.size() != 3) throw ParseError(path, lineno, "expected 'row col value'");
      const long i = parse_index(t[0], path, lineno), j = parse_index(t[1], path, lineno);
      if (i < 1 || i > rows || j < 1 || j > cols) throw ParseError(path, lineno, "entry index out of range");
      const double v = parse_real(t[2], path, lineno);
      M(i - 1, j - 1) += v;
      if (sym && i != j) M(j - 1, i - 1) += mirror * v;
      ++seen;
    }
    if (seen < nnz) throw ParseError(path, lineno, "file ends before all entries were read");
  } else {
    // Column-major; symmetric storage lists the lower triangle only.
    std::vector<std::pair<long, long>> order;
    for (long j = 0; j < cols; ++j)
      for (long i = sym ? j : 0; i < rows; ++i)
        if (!(symmetry == "skew-symmetric" && i == j)) order.emplace_back(i, j);
    std::size_t k = 0;
    while (k < order.size() && std::getline(in, line)) {
      ++lineno;
      if (blank_or_comment(line)) continue;
      for (const auto& t : tokens(line)) {
        if (k >= order.size()) throw ParseError(path, lineno, "too many values");
        const auto [i, j] = order[k++];
        const double v = parse_real(t, path, lineno);
        M(i, j) = v;
        if (sym && i != j) M(j, i) = mirror * v;
      }
    }
    if (k < order.size()) throw ParseError(path, lineno, "file ends before all values were read");
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (!blank_or_comment(line)) throw ParseError(path, lineno, "unexpected trailing data");
  }
  if (!M.allFinite()) throw ParseError(path, lineno, "non-finite value");
  return M;
}

void write_matrix_market(const std::string& path, const MatrixXd& M) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "%%MatrixMarket matrix array real general\n" << M.rows() << ' ' << M.cols() << '\n';
  char buf[32];
  for (Index j = 0; j < M.cols(); ++j)
    for (Index i = 0; i < M.rows(); ++i) {
      auto res = std::to_chars(buf, buf + sizeof buf, M(i, j));
      out.write(buf, res.ptr - buf);
      out << '\n';
    }
  if (!out) throw InputError("failed writing " + path);
}

ModelPaths ModelPaths::in_directory(const std::string& dir) {
  const std::filesystem::path d(dir);
  return {(d / "A.mtx").string(), (d / "B.mtx").string(), (d / "C.mtx").string()};
}

StateSpace load_model(const ModelPaths& paths) {
  StateSpace sys;
  sys.A = read_matrix_market(paths.A);
  sys.B = read_matrix_market(paths.B);
  sys.C = read_matrix_market(paths.C);
  if (sys.A.rows() != sys.A.cols())
    throw DimensionError(paths.A + ": A is " + std::to_string(sys.A.rows()) + "x" + std::to_string(sys.A.cols()) +
                         ", expected square");
  if (sys.B.rows() != sys.A.rows())
    throw DimensionError(paths.B + ": B has " + std::to_string(sys.B.rows()) + " rows, expected " +
                         std::to_string(sys.A.rows()));
  if (sys.C.cols() != sys.A.rows())
    throw DimensionError(paths.C + ": C has " + std::to_string(sys.C.cols()) + " columns, expected " +
                         std::to_string(sys.A.rows()));
  sys.validate();
  return sys;
}

void save_model(const std::string& dir, const StateSpace& sys) {
  std::filesystem::create_directories(dir);
  const ModelPaths p = ModelPaths::in_directory(dir);
  write_matrix_market(p.A, sys.A);
  write_matrix_market(p.B, sys.B);
  write_matrix_market(p.C, sys.C);
}

}  // namespace tlmor::bench
