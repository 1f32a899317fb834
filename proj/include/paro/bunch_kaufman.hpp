#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "paro/errors.hpp"
#include "paro/sym_matrix.hpp"

namespace paro {

inline constexpr double kDefaultPivotTol = 1e-12;

// Symmetric-indefinite LDL' with Bunch-Kaufman partial pivoting, lower
// triangle, unblocked, fixed elimination order. Hand-rolled so the pivot
// sequence is identical on every platform and every pivot magnitude is
// observable for near-singularity detection.
class ShiftedFactorization {
 public:
  // Factors S = A - shift*B. Throws NearSingular the moment a pivot falls
  // below pivot_tol * ||S||_inf (a shift too close to an eigenvalue).
  ShiftedFactorization(const SymMatrix& A, const SymMatrix& B, double shift,
                       double pivot_tol = kDefaultPivotTol)
      : shift_(shift), n_(A.order()) {
    if (A.order() != B.order())
      throw BadInput("factorize_shifted: operand orders differ");
    a_ = A.mat() - shift * B.mat();
    const double threshold = pivot_tol * a_.cwiseAbs().rowwise().sum().maxCoeff();
    ipiv_.assign(static_cast<size_t>(n_), 0);
    smallest_pivot_ = std::numeric_limits<double>::infinity();
    factorize(threshold);
  }

  double shift() const { return shift_; }
  double smallest_pivot() const { return smallest_pivot_; }
  Eigen::Index order() const { return n_; }

  Vector solve(const Vector& rhs) const {
    if (rhs.size() != n_) throw BadInput("solve_with: rhs size mismatch");
    Vector b = rhs;
    solve_in_place(b);
    return b;
  }

  Matrix solve(const Matrix& rhs) const {
    if (rhs.rows() != n_) throw BadInput("solve_with: rhs size mismatch");
    Matrix x = rhs;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      Vector b = x.col(j);
      solve_in_place(b);
      x.col(j) = b;
    }
    return x;
  }

 private:
  static constexpr double kAlpha = 0.6403882032022076;  // (1 + sqrt(17)) / 8

  void note_pivot(double magnitude, double threshold) {
    if (magnitude < smallest_pivot_) smallest_pivot_ = magnitude;
    if (!(magnitude > threshold))
      throw NearSingular("factorize_shifted: pivot below tolerance, shift is too close to an eigenvalue",
                         shift_, magnitude);
  }

  // Exchange rows/columns p < q of the trailing submatrix starting at column
  // `from`. Columns before `from` hold finished multipliers and are left
  // untouched; the solve replays the interchanges in elimination order.
  void swap_sym(Eigen::Index from, Eigen::Index p, Eigen::Index q) {
    if (p == q) return;
    if (p > q) std::swap(p, q);
    for (Eigen::Index j = from; j < p; ++j) std::swap(a_(p, j), a_(q, j));
    for (Eigen::Index i = p + 1; i < q; ++i) std::swap(a_(i, p), a_(q, i));
    for (Eigen::Index i = q + 1; i < n_; ++i) std::swap(a_(i, p), a_(i, q));
    std::swap(a_(p, p), a_(q, q));
  }

  void factorize(double threshold) {
    Eigen::Index k = 0;
    while (k < n_) {
      Eigen::Index kstep = 1;
      Eigen::Index kp = k;
      const double absakk = std::abs(a_(k, k));

      Eigen::Index imax = k;
      double colmax = 0.0;
      if (k + 1 < n_) {
        for (Eigen::Index i = k + 1; i < n_; ++i)
          if (std::abs(a_(i, k)) > colmax) {
            colmax = std::abs(a_(i, k));
            imax = i;
          }
      }

      if (std::max(absakk, colmax) == 0.0) {
        note_pivot(0.0, threshold);  // always throws: threshold >= 0
      } else if (absakk >= kAlpha * colmax) {
        kp = k;  // 1x1, no interchange
      } else {
        double rowmax = 0.0;
        for (Eigen::Index j = k; j < imax; ++j)
          rowmax = std::max(rowmax, std::abs(a_(imax, j)));
        for (Eigen::Index i = imax + 1; i < n_; ++i)
          rowmax = std::max(rowmax, std::abs(a_(i, imax)));
        if (absakk >= kAlpha * colmax * (colmax / rowmax)) {
          kp = k;  // 1x1, no interchange
        } else if (std::abs(a_(imax, imax)) >= kAlpha * rowmax) {
          kp = imax;  // 1x1 with interchange
        } else {
          kp = imax;  // 2x2 pivot
          kstep = 2;
        }
      }

      const Eigen::Index kk = k + kstep - 1;
      if (kp != kk) swap_sym(k, kk, kp);

      if (kstep == 1) {
        const double d = a_(k, k);
        note_pivot(std::abs(d), threshold);
        if (k + 1 < n_) {
          const double r1 = 1.0 / d;
          for (Eigen::Index j = k + 1; j < n_; ++j) {
            const double c = r1 * a_(j, k);
            for (Eigen::Index i = j; i < n_; ++i) a_(i, j) -= c * a_(i, k);
          }
          a_.col(k).tail(n_ - k - 1) *= r1;
        }
        ipiv_[static_cast<size_t>(k)] = static_cast<int>(kp) + 1;
      } else {
        // 2x2 pivot block [a b; b c]; its magnitude is the smaller |eigenvalue|.
        const double pa = a_(k, k), pb = a_(k + 1, k), pc = a_(k + 1, k + 1);
        const double mid = 0.5 * (pa + pc);
        const double rad = std::hypot(0.5 * (pa - pc), pb);
        const double big = std::abs(mid) + rad;
        const double det = pa * pc - pb * pb;
        note_pivot(big > 0.0 ? std::abs(det) / big : 0.0, threshold);
        if (k + 2 < n_) {
          double d21 = a_(k + 1, k);
          const double d11 = a_(k + 1, k + 1) / d21;
          const double d22 = a_(k, k) / d21;
          const double t = 1.0 / (d11 * d22 - 1.0);
          d21 = t / d21;
          for (Eigen::Index j = k + 2; j < n_; ++j) {
            const double wk = d21 * (d11 * a_(j, k) - a_(j, k + 1));
            const double wkp1 = d21 * (d22 * a_(j, k + 1) - a_(j, k));
            for (Eigen::Index i = j; i < n_; ++i)
              a_(i, j) -= a_(i, k) * wk + a_(i, k + 1) * wkp1;
            a_(j, k) = wk;
            a_(j, k + 1) = wkp1;
          }
        }
        ipiv_[static_cast<size_t>(k)] = -(static_cast<int>(kp) + 1);
        ipiv_[static_cast<size_t>(k + 1)] = -(static_cast<int>(kp) + 1);
      }
      k += kstep;
    }
  }

  void solve_in_place(Vector& b) const {
    // Forward: solve L*D*y = P*b, pivots applied in factorization order.
    Eigen::Index k = 0;
    while (k < n_) {
      if (ipiv_[static_cast<size_t>(k)] > 0) {
        const Eigen::Index kp = ipiv_[static_cast<size_t>(k)] - 1;
        if (kp != k) std::swap(b[k], b[kp]);
        if (k + 1 < n_) b.tail(n_ - k - 1) -= b[k] * a_.col(k).tail(n_ - k - 1);
        b[k] /= a_(k, k);
        k += 1;
      } else {
        const Eigen::Index kp = -ipiv_[static_cast<size_t>(k)] - 1;
        if (kp != k + 1) std::swap(b[k + 1], b[kp]);
        if (k + 2 < n_) {
          b.tail(n_ - k - 2) -= b[k] * a_.col(k).tail(n_ - k - 2);
          b.tail(n_ - k - 2) -= b[k + 1] * a_.col(k + 1).tail(n_ - k - 2);
        }
        const double akm1k = a_(k + 1, k);
        const double akm1 = a_(k, k) / akm1k;
        const double ak = a_(k + 1, k + 1) / akm1k;
        const double denom = akm1 * ak - 1.0;
        const double bkm1 = b[k] / akm1k;
        const double bk = b[k + 1] / akm1k;
        b[k] = (ak * bkm1 - bk) / denom;
        b[k + 1] = (akm1 * bk - bkm1) / denom;
        k += 2;
      }
    }
    // Backward: solve L'*x = y, undoing pivots in reverse order.
    k = n_ - 1;
    while (k >= 0) {
      if (ipiv_[static_cast<size_t>(k)] > 0) {
        if (k + 1 < n_) b[k] -= a_.col(k).tail(n_ - k - 1).dot(b.tail(n_ - k - 1));
        const Eigen::Index kp = ipiv_[static_cast<size_t>(k)] - 1;
        if (kp != k) std::swap(b[k], b[kp]);
        k -= 1;
      } else {
        if (k + 1 < n_) {
          b[k] -= a_.col(k).tail(n_ - k - 1).dot(b.tail(n_ - k - 1));
          b[k - 1] -= a_.col(k - 1).tail(n_ - k - 1).dot(b.tail(n_ - k - 1));
        }
        const Eigen::Index kp = -ipiv_[static_cast<size_t>(k)] - 1;
        if (kp != k) std::swap(b[k], b[kp]);
        k -= 2;
      }
    }
  }

  Matrix a_;
  std::vector<int> ipiv_;
  double shift_;
  double smallest_pivot_;
  Eigen::Index n_;
};

inline ShiftedFactorization factorize_shifted(const SymMatrix& A, const SymMatrix& B,
                                              double shift,
                                              double pivot_tol = kDefaultPivotTol) {
  return ShiftedFactorization(A, B, shift, pivot_tol);
}

inline Vector solve_with(const ShiftedFactorization& handle, const Vector& rhs) {
  return handle.solve(rhs);
}

inline Matrix solve_with(const ShiftedFactorization& handle, const Matrix& rhs) {
  return handle.solve(rhs);
}

}  // namespace paro
