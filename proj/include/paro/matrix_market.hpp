#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "paro/errors.hpp"
#include "paro/sym_matrix.hpp"

namespace paro::mm {

namespace detail {

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline std::string next_data_line(std::istream& in, const std::string& path) {
  std::string line;
  while (std::getline(in, line)) {
    size_t i = line.find_first_not_of(" \t\r");
    if (i == std::string::npos) continue;
    if (line[i] == '%') continue;
    return line;
  }
  throw BadInput("matrix market: unexpected end of file in " + path);
}

struct Header {
  std::string object, format, field, symmetry;
};

inline Header read_header(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line))
    throw BadInput("matrix market: empty file " + path);
  std::istringstream hs(line);
  std::string banner;
  Header h;
  hs >> banner >> h.object >> h.format >> h.field >> h.symmetry;
  if (lower(banner) != "%%matrixmarket")
    throw BadInput("matrix market: missing banner in " + path);
  h.object = lower(h.object);
  h.format = lower(h.format);
  h.field = lower(h.field);
  h.symmetry = lower(h.symmetry);
  if (h.object != "matrix" || h.field != "real")
    throw BadInput("matrix market: unsupported header in " + path);
  return h;
}

}  // namespace detail

// Coordinate real symmetric; only the lower triangle is stored (1-based).
inline void write_symmetric(const std::string& path, const SymMatrix& m) {
  std::ofstream out(path);
  if (!out) throw BadInput("matrix market: cannot open " + path + " for writing");
  std::vector<std::tuple<int, int, double>> entries;
  for (Eigen::Index j = 0; j < m.order(); ++j)
    for (Eigen::Index i = j; i < m.order(); ++i)
      if (m(i, j) != 0.0)
        entries.emplace_back(static_cast<int>(i) + 1, static_cast<int>(j) + 1, m(i, j));
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << m.order() << " " << m.order() << " " << entries.size() << "\n";
  for (const auto& [i, j, v] : entries)
    out << i << " " << j << " " << format_double(v) << "\n";
  if (!out) throw BadInput("matrix market: write failed for " + path);
}

inline SymMatrix read_symmetric(const std::string& path,
                                Definiteness hint = Definiteness::unknown) {
  std::ifstream in(path);
  if (!in) throw BadInput("matrix market: cannot open " + path);
  detail::Header h = detail::read_header(in, path);
  if (h.format != "coordinate" || h.symmetry != "symmetric")
    throw BadInput("matrix market: expected coordinate symmetric in " + path);
  std::istringstream sz(detail::next_data_line(in, path));
  long rows = 0, cols = 0, nnz = 0;
  if (!(sz >> rows >> cols >> nnz) || rows != cols || rows < 1 || nnz < 0)
    throw BadInput("matrix market: bad size line in " + path);
  std::vector<std::tuple<int, int, double>> entries;
  entries.reserve(static_cast<size_t>(nnz));
  for (long k = 0; k < nnz; ++k) {
    std::istringstream es(detail::next_data_line(in, path));
    long i = 0, j = 0;
    double v = 0.0;
    if (!(es >> i >> j >> v) || i < 1 || j < 1 || i > rows || j > rows)
      throw BadInput("matrix market: bad entry in " + path);
    if (i < j) std::swap(i, j);  // tolerate upper-triangle input
    entries.emplace_back(static_cast<int>(i) - 1, static_cast<int>(j) - 1, v);
  }
  return SymMatrix::from_triplets(static_cast<Eigen::Index>(rows), entries, hint);
}

// Array real general, column-major; used for dense vector blocks.
inline void write_dense(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw BadInput("matrix market: cannot open " + path + " for writing");
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << " " << m.cols() << "\n";
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      out << format_double(m(i, j)) << "\n";
  if (!out) throw BadInput("matrix market: write failed for " + path);
}

inline Matrix read_dense(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadInput("matrix market: cannot open " + path);
  detail::Header h = detail::read_header(in, path);
  if (h.format != "array" || h.symmetry != "general")
    throw BadInput("matrix market: expected array general in " + path);
  std::istringstream sz(detail::next_data_line(in, path));
  long rows = 0, cols = 0;
  if (!(sz >> rows >> cols) || rows < 0 || cols < 0)
    throw BadInput("matrix market: bad size line in " + path);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      std::istringstream es(detail::next_data_line(in, path));
      double v = 0.0;
      if (!(es >> v)) throw BadInput("matrix market: bad value in " + path);
      m(i, j) = v;
    }
  return m;
}

}  // namespace paro::mm
