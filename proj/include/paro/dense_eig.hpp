#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <vector>

#include "paro/errors.hpp"
#include "paro/sym_matrix.hpp"

namespace paro {

inline constexpr Eigen::Index kDenseEigMaxOrder = 4096;

struct EigDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // columns B-orthonormal, vectors.col(k) pairs with values[k]
};

// Full spectrum of A x = lambda B x for symmetric A and SPD B. Desk-scale
// only; this is the verification oracle and the projected-problem solver.
inline EigDecomposition dense_generalized_eig(const SymMatrix& A, const SymMatrix& B) {
  if (A.order() != B.order())
    throw BadInput("dense_generalized_eig: operand orders differ");
  if (A.order() > kDenseEigMaxOrder)
    throw BadInput("dense_generalized_eig: order exceeds dense limit");
  {
    Eigen::LLT<Matrix> llt(B.mat());
    if (llt.info() != Eigen::Success)
      throw NotSpd("dense_generalized_eig: B is not positive definite");
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(A.mat(), B.mat(),
                                                      Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success)
    throw NumericalError("dense_generalized_eig: eigensolver failed to converge");
  EigDecomposition d;
  d.values = es.eigenvalues();
  d.vectors = es.eigenvectors();
  return d;
}

}  // namespace paro
