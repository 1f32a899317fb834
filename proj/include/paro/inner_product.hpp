#pragma once

#include <Eigen/Cholesky>
#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "paro/errors.hpp"
#include "paro/sym_matrix.hpp"

namespace paro {

inline constexpr double kUnderflowTol = 1e-150;
inline constexpr double kDefaultRankTol = 1e-10;

// Inner product induced by an SPD metric M: <u,v> = u' M v.
// The SPD check is a Cholesky factorization; the factor is cached.
class InnerProductContext {
 public:
  explicit InnerProductContext(SymMatrix metric) : metric_(std::move(metric)) {
    llt_.compute(metric_.mat());
    if (llt_.info() != Eigen::Success)
      throw NotSpd("InnerProductContext: metric is not positive definite");
  }

  const SymMatrix& metric() const { return metric_; }
  Eigen::Index order() const { return metric_.order(); }

  double inner(const Vector& u, const Vector& v) const {
    return u.dot(metric_.mat() * v);
  }

  double norm(const Vector& v) const {
    double s = inner(v, v);
    return s > 0.0 ? std::sqrt(s) : 0.0;
  }

  Vector apply(const Vector& v) const { return metric_.mat() * v; }
  Matrix apply(const Matrix& m) const { return metric_.mat() * m; }

  // v / ||v||_M; rejects vectors too small to normalize safely.
  Vector normalize(const Vector& v) const {
    double n = norm(v);
    if (!(n > kUnderflowTol))
      throw ZeroVector("normalize: vector norm below underflow threshold");
    return v / n;
  }

  // Modified Gram-Schmidt in this metric, two passes for orthogonality near
  // machine precision. Columns whose residual collapses are reported, not
  // silently dropped; callers decide.
  struct MgsResult {
    Matrix q;                     // orthonormal retained columns, input order
    std::vector<int> kept;        // indices into the input columns
    std::vector<int> dropped;     // complement of kept
  };

  MgsResult orthonormalize(const Matrix& basis, double drop_tol) const {
    MgsResult r;
    if (basis.cols() == 0) return r;
    const Matrix& M = metric_.mat();
    std::vector<Vector> cols;
    for (Eigen::Index j = 0; j < basis.cols(); ++j) {
      Vector v = basis.col(j);
      double orig = std::sqrt(v.dot(M * v));
      if (!(orig > kUnderflowTol)) {
        r.dropped.push_back(static_cast<int>(j));
        continue;
      }
      bool drop = false;
      for (int pass = 0; pass < 2; ++pass) {
        for (const Vector& q : cols) v -= q.dot(M * v) * q;
        double n = std::sqrt(std::max(0.0, v.dot(M * v)));
        if (n <= drop_tol * orig) {
          drop = true;
          break;
        }
        v /= n;
      }
      if (drop) {
        r.dropped.push_back(static_cast<int>(j));
      } else {
        cols.push_back(v);
        r.kept.push_back(static_cast<int>(j));
      }
    }
    r.q.resize(basis.rows(), static_cast<Eigen::Index>(cols.size()));
    for (size_t k = 0; k < cols.size(); ++k)
      r.q.col(static_cast<Eigen::Index>(k)) = cols[k];
    return r;
  }

  // Strict variant: any dependent column is an error.
  Matrix orthonormal_basis(const Matrix& basis, double drop_tol = 1e-12) const {
    MgsResult r = orthonormalize(basis, drop_tol);
    if (!r.dropped.empty())
      throw RankDeficient("orthonormal_basis: dependent columns in basis");
    return r.q;
  }

 private:
  SymMatrix metric_;
  Eigen::LLT<Matrix> llt_;
};

using CtxPtr = std::shared_ptr<const InnerProductContext>;

inline CtxPtr make_context(SymMatrix metric) {
  return std::make_shared<const InnerProductContext>(std::move(metric));
}

}  // namespace paro
