#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "paro/errors.hpp"

namespace paro {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Definiteness { spd, indefinite, unknown };

// Dense symmetric matrix. Symmetry is enforced on construction by mirroring
// the lower triangle, so entry(i,j) == entry(j,i) holds exactly as stored.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(Matrix m, Definiteness hint = Definiteness::unknown)
      : hint_(hint) {
    if (m.rows() != m.cols()) throw BadInput("SymMatrix: matrix not square");
    if (m.rows() < 1) throw BadInput("SymMatrix: order must be >= 1");
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = j + 1; i < m.rows(); ++i) m(j, i) = m(i, j);
    m_ = std::move(m);
  }

  // Triplet assembly (duplicates accumulate); entries may address either
  // triangle, both mirrors receive the sum.
  static SymMatrix from_triplets(
      Eigen::Index order, const std::vector<std::tuple<int, int, double>>& ts,
      Definiteness hint = Definiteness::unknown) {
    if (order < 1) throw BadInput("SymMatrix: order must be >= 1");
    Matrix m = Matrix::Zero(order, order);
    for (const auto& [i, j, v] : ts) {
      if (i < 0 || j < 0 || i >= order || j >= order)
        throw BadInput("SymMatrix: triplet index out of range");
      Eigen::Index r = std::max(i, j), c = std::min(i, j);
      m(r, c) += v;
    }
    return SymMatrix(std::move(m), hint);
  }

  static SymMatrix identity(Eigen::Index order) {
    return SymMatrix(Matrix::Identity(order, order), Definiteness::spd);
  }

  Eigen::Index order() const { return m_.rows(); }
  const Matrix& mat() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  Definiteness hint() const { return hint_; }

  double norm_inf() const {
    return m_.cwiseAbs().rowwise().sum().maxCoeff();
  }

 private:
  Matrix m_;
  Definiteness hint_ = Definiteness::unknown;
};

// Shortest text form that round-trips a double exactly.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

}  // namespace paro
