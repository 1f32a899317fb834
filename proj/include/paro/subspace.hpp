#pragma once

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "paro/errors.hpp"
#include "paro/inner_product.hpp"
#include "paro/sym_matrix.hpp"

namespace paro {

namespace detail {

// Symmetrized Gram basis' * M * basis; roundoff asymmetry would otherwise
// leak into the eigensolver.
inline Matrix gram(const InnerProductContext& ctx, const Matrix& basis) {
  Matrix g = basis.transpose() * ctx.apply(basis);
  return 0.5 * (g + g.transpose());
}

struct GramEig {
  Vector values;  // ascending
  Matrix vectors;
};

inline GramEig gram_eig(const InnerProductContext& ctx, const Matrix& basis) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram(ctx, basis));
  if (es.info() != Eigen::Success)
    throw NumericalError("gram eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace detail

// Span of a set of columns measured in a fixed SPD inner product.
class Subspace {
 public:
  Subspace(Matrix basis, CtxPtr ctx, double rank_tol = kDefaultRankTol)
      : basis_(std::move(basis)), ctx_(std::move(ctx)) {
    if (!ctx_) throw BadInput("Subspace: null inner-product context");
    if (basis_.rows() != ctx_->order())
      throw BadInput("Subspace: basis rows do not match metric order");
    if (basis_.cols() > 0) {
      detail::GramEig ge = detail::gram_eig(*ctx_, basis_);
      const double largest = ge.values[ge.values.size() - 1];
      if (!(ge.values[0] > rank_tol * largest))
        throw RankDeficient("Subspace: basis columns are linearly dependent");
    }
  }

  const Matrix& basis() const { return basis_; }
  const InnerProductContext& ctx() const { return *ctx_; }
  const CtxPtr& ctx_ptr() const { return ctx_; }
  Eigen::Index dim() const { return basis_.cols(); }

  // Orthonormal basis of the span in the context metric.
  Matrix orthonormal_basis() const {
    return ctx_->orthonormal_basis(basis_);
  }

 private:
  Matrix basis_;
  CtxPtr ctx_;
};

namespace detail {

inline void require_same_ctx(const Subspace& u, const Subspace& v, const char* who) {
  if (u.ctx_ptr() == v.ctx_ptr()) return;
  if (u.ctx().order() == v.ctx().order() &&
      u.ctx().metric().mat() == v.ctx().metric().mat())
    return;
  throw BadInput(std::string(who) + ": subspaces use different metrics");
}

}  // namespace detail

// Largest principal angle between the spans, reported as its sine:
// sup over unit u in U of the distance from u to V. 1 when U cannot fit in V.
inline double subspace_dist(const Subspace& U, const Subspace& V) {
  if (U.dim() == 0) throw DimZero("subspace_dist: first argument is trivial");
  detail::require_same_ctx(U, V, "subspace_dist");
  if (U.dim() > V.dim()) return 1.0;

  const Matrix qu = U.orthonormal_basis();
  const Matrix qv = V.orthonormal_basis();
  const Matrix cross = qu.transpose() * U.ctx().apply(qv);
  Eigen::JacobiSVD<Matrix> svd(cross);
  const double smin = svd.singularValues().minCoeff();

  // For small angles 1 - smin^2 cancels catastrophically; switch to the
  // complement residual, whose largest a-norm is the same sine exactly.
  if (smin * smin >= 0.5) {
    const Matrix r = qu - qv * cross.transpose();
    Matrix g = r.transpose() * U.ctx().apply(r);
    g = (0.5 * (g + g.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    if (es.info() != Eigen::Success)
      throw NumericalError("subspace_dist: residual eigendecomposition failed");
    const double top = std::max(0.0, es.eigenvalues().maxCoeff());
    return std::min(1.0, std::sqrt(top));
  }
  const double s = std::min(1.0, smin);
  return std::sqrt(std::max(0.0, 1.0 - s * s));
}

// Sine of the angle between two vectors; invariant to rescaling.
inline double vector_dist(const Vector& u, const Vector& v,
                          const InnerProductContext& ctx) {
  const Vector un = ctx.normalize(u);
  const Vector vn = ctx.normalize(v);
  const double c = ctx.inner(un, vn);
  const double s = ctx.norm(vn - c * un);
  return std::min(1.0, s);
}

// Basis-level polar step: W * (W' A W)^(-1/2), the closest a-orthonormal
// system to W in the aggregate sense.
inline Matrix polar_orthonormalize_basis(const InnerProductContext& ctx,
                                         const Matrix& basis,
                                         double rank_tol = kDefaultRankTol) {
  if (basis.cols() == 0) return basis;
  detail::GramEig ge = detail::gram_eig(ctx, basis);
  const double largest = ge.values[ge.values.size() - 1];
  if (!(ge.values[0] > rank_tol * largest))
    throw RankDeficient("polar_orthonormalize: Gram matrix is numerically singular");
  Vector inv_sqrt = ge.values.cwiseSqrt().cwiseInverse();
  return basis * (ge.vectors * inv_sqrt.asDiagonal() * ge.vectors.transpose());
}

inline Subspace polar_orthonormalize(const Subspace& V,
                                     double rank_tol = kDefaultRankTol) {
  return Subspace(polar_orthonormalize_basis(V.ctx(), V.basis(), rank_tol),
                  V.ctx_ptr(), rank_tol);
}

// Per-column deviation ||v~_j - v_j||_a from the polar basis; max over j
// certifies quasi-orthogonality at that level.
inline std::vector<double> quasi_orthogonality_defect(const Subspace& V,
                                                      double rank_tol = kDefaultRankTol) {
  const Matrix polar = polar_orthonormalize_basis(V.ctx(), V.basis(), rank_tol);
  std::vector<double> defects(static_cast<size_t>(V.dim()));
  for (Eigen::Index j = 0; j < V.dim(); ++j)
    defects[static_cast<size_t>(j)] = V.ctx().norm(polar.col(j) - V.basis().col(j));
  return defects;
}

// Pairs each u_j with a nearby vector of V: a-project u_j onto V, normalize,
// then one polar step to restore exact orthonormality.
inline Matrix align_basis(const Matrix& u_basis, const Subspace& V,
                          double rank_tol = kDefaultRankTol) {
  if (u_basis.cols() != V.dim() || V.dim() == 0)
    throw BadInput("align_basis: dimension mismatch");
  const Matrix qv = V.orthonormal_basis();
  Matrix w(u_basis.rows(), u_basis.cols());
  for (Eigen::Index j = 0; j < u_basis.cols(); ++j) {
    Vector p = qv * (qv.transpose() * V.ctx().apply(Vector(u_basis.col(j))));
    const double n = V.ctx().norm(p);
    if (!(n > 1e-8))
      throw NotIsomorphic("align_basis: projection onto target collapses a column");
    w.col(j) = p / n;
  }
  try {
    return polar_orthonormalize_basis(V.ctx(), w, rank_tol);
  } catch (const RankDeficient&) {
    throw NotIsomorphic("align_basis: projected basis is rank-deficient");
  }
}

struct DirectSumReport {
  bool is_direct_sum = false;
  double min_gram_eigenvalue = 0.0;
  std::vector<double> thresholds;  // sufficient per-block distance bounds
};

// Sufficient per-block perturbation level below which q blocks of dimensions
// d_i summing to N still span a direct sum.
inline double direct_sum_threshold(Eigen::Index d_i, Eigen::Index total_dim) {
  const double s = 1.0 + std::sqrt(static_cast<double>(d_i));
  const double n = static_cast<double>(total_dim);
  return std::sqrt((4.0 * s * s * n - 1.0) / (4.0 * s * s * s * s * n * n));
}

inline DirectSumReport verify_direct_sum(const std::vector<Subspace>& blocks,
                                         double rank_tol = kDefaultRankTol) {
  DirectSumReport report;
  Eigen::Index total = 0;
  for (const Subspace& b : blocks) total += b.dim();
  if (total == 0) {
    report.is_direct_sum = true;
    report.min_gram_eigenvalue = 1.0;
    return report;
  }
  for (size_t i = 1; i < blocks.size(); ++i)
    detail::require_same_ctx(blocks[0], blocks[i], "verify_direct_sum");

  Matrix joined(blocks[0].ctx().order(), total);
  Eigen::Index at = 0;
  for (const Subspace& b : blocks) {
    joined.middleCols(at, b.dim()) = b.basis();
    at += b.dim();
  }
  detail::GramEig ge = detail::gram_eig(blocks[0].ctx(), joined);
  const double largest = ge.values[ge.values.size() - 1];
  report.min_gram_eigenvalue = ge.values[0];
  report.is_direct_sum = ge.values[0] > rank_tol * largest;
  for (const Subspace& b : blocks)
    report.thresholds.push_back(direct_sum_threshold(b.dim(), total));
  return report;
}

}  // namespace paro
