#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "paro/bunch_kaufman.hpp"
#include "paro/clustering.hpp"
#include "paro/dense_eig.hpp"
#include "paro/errors.hpp"
#include "paro/inner_product.hpp"
#include "paro/model_problems.hpp"
#include "paro/parallel.hpp"
#include "paro/rng.hpp"
#include "paro/subspace.hpp"
#include "paro/sym_matrix.hpp"
#include "paro/trace.hpp"

namespace paro {

// Relative size of the shift perturbation applied when a factorization
// reports a near-singular shift, before locking is considered.
inline constexpr double kShiftNudge = 1e-8;

// Augmented bases of the residual-corrected variant contain directions that
// become dependent as the iteration converges; columns below this level are
// redundant rather than informative.
inline constexpr double kAugmentedDropTol = 1e-8;

enum class Variant { simplified, shifted, modified };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::simplified: return "simplified";
    case Variant::shifted: return "shifted";
    case Variant::modified: return "modified";
  }
  throw BadInput("variant_name: unknown variant");
}

inline Variant variant_from_name(const std::string& name) {
  if (name == "simplified") return Variant::simplified;
  if (name == "shifted") return Variant::shifted;
  if (name == "modified") return Variant::modified;
  throw BadInput("unknown variant: " + name);
}

// One cluster's orbitals: d_i columns, their value estimates, and the shift
// used for the cluster's linear solves.
struct OrbitalBlock {
  int cluster_index = 0;
  Matrix vectors;
  Vector values;
  double shift = 0.0;
  bool locked = false;
};

using OrbitalBlocks = std::vector<OrbitalBlock>;

struct ParoOptions {
  Variant variant = Variant::shifted;
  double tol = 1e-10;
  int max_iter = 50;
  double lock_tol = 0.0;  // 0 selects tol / 100
  double pivot_tol = kDefaultPivotTol;
  int threads = 1;
  double rank_tol = kDefaultRankTol;

  double effective_lock_tol() const { return lock_tol > 0.0 ? lock_tol : tol / 100.0; }

  void validate() const {
    if (!(tol > 0.0)) throw BadInput("options: tol must be positive");
    if (max_iter < 1) throw BadInput("options: max_iter must be >= 1");
    if (threads < 1) throw BadInput("options: threads must be >= 1");
    if (!(pivot_tol > 0.0)) throw BadInput("options: pivot_tol must be positive");
    if (!(rank_tol > 0.0)) throw BadInput("options: rank_tol must be positive");
    if (lock_tol < 0.0) throw BadInput("options: lock_tol must be >= 0");
  }
};

struct ParoResult {
  Vector eigenvalues;   // flat, cluster-blocked, ascending within the run
  Matrix eigenvectors;  // columns pair with eigenvalues
  IterationTrace trace;
  bool converged = false;
  int iterations = 0;
  std::vector<double> residuals;  // ||A u - lambda B u|| / (lambda ||B u||)
  std::vector<std::string> warnings;

  // Filled only when an oracle decomposition is supplied.
  std::vector<double> eps_hat;       // max per-cluster subspace distance, per iteration
  std::vector<double> xi;            // pooled subspace distance, per iteration
  std::vector<double> aligned_dist;  // max per-orbital aligned-vector distance
  double c_tilde_estimate = 0.0;     // max observed aligned_dist / xi

  // Smallest relative a-Gram eigenvalue seen across all update blocks; stays
  // near 1 while every cluster keeps its dimension.
  double min_update_gram = 1.0;
};

// x solving (A - shift B) x = shift B u: one inverse-iteration step of the
// shifted orbital map.
inline Vector shifted_orbit_update(const DiscreteProblem& p,
                                   const ShiftedFactorization& handle,
                                   const Vector& u) {
  if (u.size() != p.A.order())
    throw BadInput("shifted_orbit_update: vector size mismatch");
  return handle.solve(Vector(handle.shift() * (p.B.mat() * u)));
}

inline Vector shifted_orbit_update(const DiscreteProblem& p, double shift,
                                   const Vector& u,
                                   double pivot_tol = kDefaultPivotTol) {
  return shifted_orbit_update(p, ShiftedFactorization(p.A, p.B, shift, pivot_tol), u);
}

// Correction form of the same step: e solves (A - shift B) e = 2 shift B u - A u
// and u + e equals the shifted update exactly in real arithmetic.
struct ResidualUpdate {
  Vector e;
  Vector u_half;
};

inline ResidualUpdate residual_orbit_update(const DiscreteProblem& p,
                                            const ShiftedFactorization& handle,
                                            const Vector& u) {
  if (u.size() != p.A.order())
    throw BadInput("residual_orbit_update: vector size mismatch");
  const Vector rhs = 2.0 * handle.shift() * (p.B.mat() * u) - p.A.mat() * u;
  ResidualUpdate r;
  r.e = handle.solve(rhs);
  r.u_half = u + r.e;
  return r;
}

inline ResidualUpdate residual_orbit_update(const DiscreteProblem& p, double shift,
                                            const Vector& u,
                                            double pivot_tol = kDefaultPivotTol) {
  return residual_orbit_update(p, ShiftedFactorization(p.A, p.B, shift, pivot_tol), u);
}

struct RitzPairs {
  Vector values;   // ascending
  Matrix vectors;  // lifted, B-orthonormal
};

// Projects the pencil onto span(basis) and lifts the eigenvectors back.
inline RitzPairs rayleigh_ritz(const DiscreteProblem& p, const Matrix& basis,
                               double rank_tol = kDefaultRankTol) {
  if (basis.cols() == 0) throw BadInput("rayleigh_ritz: empty basis");
  if (basis.rows() != p.A.order())
    throw BadInput("rayleigh_ritz: basis rows do not match operator order");

  Matrix ga = basis.transpose() * (p.A.mat() * basis);
  ga = (0.5 * (ga + ga.transpose())).eval();
  Matrix gb = basis.transpose() * (p.B.mat() * basis);
  gb = (0.5 * (gb + gb.transpose())).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> ges(ga);
  if (ges.info() != Eigen::Success)
    throw NumericalError("rayleigh_ritz: Gram eigendecomposition failed");
  const double largest = ges.eigenvalues().maxCoeff();
  if (!(ges.eigenvalues().minCoeff() > rank_tol * largest))
    throw RankDeficient("rayleigh_ritz: basis columns are numerically dependent");

  EigDecomposition d;
  try {
    d = dense_generalized_eig(SymMatrix(ga), SymMatrix(gb, Definiteness::spd));
  } catch (const NotSpd&) {
    throw RankDeficient("rayleigh_ritz: projected mass matrix lost definiteness");
  }
  return {d.values, basis * d.vectors};
}

namespace detail {

inline double rayleigh_quotient(const DiscreteProblem& p, const Vector& v) {
  const double den = v.dot(p.B.mat() * v);
  if (!(den > 0.0)) throw ZeroVector("rayleigh_quotient: vector has no mass");
  return v.dot(p.A.mat() * v) / den;
}

}  // namespace detail

// Packs flat columns and value estimates into per-cluster blocks. Columns are
// normalized in the b metric; shifts start at the cluster means.
inline OrbitalBlocks make_blocks(const DiscreteProblem& p, const ClusterLayout& layout,
                                 const Matrix& columns, const Vector& values) {
  if (columns.rows() != p.A.order())
    throw BadInput("make_blocks: column size does not match operator order");
  if (columns.cols() != layout.total() || values.size() != layout.total())
    throw BadInput("make_blocks: column/value count does not match layout");
  const CtxPtr bctx = mass_context(p);
  OrbitalBlocks blocks;
  blocks.reserve(static_cast<size_t>(layout.q()));
  for (int i = 0; i < layout.q(); ++i) {
    OrbitalBlock blk;
    blk.cluster_index = i;
    const int off = layout.offset(i), d = layout.d()[static_cast<size_t>(i)];
    blk.vectors.resize(columns.rows(), d);
    blk.values.resize(d);
    std::vector<double> vals;
    for (int j = 0; j < d; ++j) {
      blk.vectors.col(j) = bctx->normalize(columns.col(off + j));
      blk.values[j] = values[off + j];
      vals.push_back(values[off + j]);
    }
    blk.shift = convex_shift(vals);
    blocks.push_back(std::move(blk));
  }
  return blocks;
}

// Reference eigenvectors rotated by an exact angle asin(eps0) toward seeded
// random a-orthogonal directions; value estimates are the Rayleigh quotients.
inline OrbitalBlocks make_perturbed_init(const DiscreteProblem& p,
                                         const ClusterLayout& layout,
                                         const EigDecomposition& oracle,
                                         double eps0, std::uint64_t seed) {
  if (!(eps0 >= 0.0 && eps0 < 1.0))
    throw BadInput("make_perturbed_init: eps0 must lie in [0, 1)");
  const int N = layout.total();
  if (oracle.vectors.rows() != p.A.order() || oracle.vectors.cols() < N)
    throw BadInput("make_perturbed_init: oracle does not cover the layout");
  const CtxPtr actx = energy_context(p);
  Rng rng(seed);
  const double theta = std::asin(eps0);
  Matrix cols(p.A.order(), N);
  Vector values(N);
  for (int k = 0; k < N; ++k) {
    const Vector u = actx->normalize(oracle.vectors.col(k));
    Vector col = u;
    if (eps0 > 0.0) {
      Vector w;
      double wn = 0.0;
      do {
        w = rng.normal_vector(p.A.order());
        w -= actx->inner(u, w) * u;
        wn = actx->norm(w);
      } while (!(wn > 1e-8));
      w /= wn;
      col = std::cos(theta) * u + std::sin(theta) * w;
    }
    cols.col(k) = col;
    values[k] = detail::rayleigh_quotient(p, col);
  }
  return make_blocks(p, layout, cols, values);
}

// Seeded random b-normalized starting vectors for robustness studies.
inline OrbitalBlocks make_random_init(const DiscreteProblem& p,
                                      const ClusterLayout& layout,
                                      std::uint64_t seed) {
  Rng rng(seed);
  Matrix cols = rng.normal_matrix(p.A.order(), layout.total());
  Vector values(layout.total());
  for (int k = 0; k < layout.total(); ++k)
    values[k] = detail::rayleigh_quotient(p, cols.col(k));
  return make_blocks(p, layout, cols, values);
}

namespace detail {

class ParoEngine {
 public:
  ParoEngine(const DiscreteProblem& p, const ClusterLayout& layout,
             const OrbitalBlocks& init, const ParoOptions& opts,
             const EigDecomposition* oracle)
      : p_(p), layout_(layout), opts_(opts), oracle_(oracle) {
    opts_.validate();
    n_ = static_cast<int>(p_.A.order());
    N_ = layout_.total();
    q_ = layout_.q();
    if (N_ > n_) throw BadInput("solver: layout requests more pairs than unknowns");
    if (static_cast<int>(init.size()) != q_)
      throw BadInput("solver: block count does not match layout");

    actx_ = energy_context(p_);
    bctx_ = mass_context(p_);

    U_.resize(n_, N_);
    values_.resize(N_);
    shifts_.resize(static_cast<size_t>(q_));
    locked_.assign(static_cast<size_t>(q_), 0);
    for (int i = 0; i < q_; ++i) {
      const OrbitalBlock& blk = init[static_cast<size_t>(i)];
      const int d = layout_.d()[static_cast<size_t>(i)];
      if (blk.cluster_index != i)
        throw BadInput("solver: blocks must arrive in cluster order");
      if (blk.vectors.rows() != n_ || blk.vectors.cols() != d ||
          blk.values.size() != d)
        throw BadInput("solver: block shape does not match layout");
      for (int j = 0; j < d; ++j) {
        U_.col(layout_.offset(i) + j) = bctx_->normalize(blk.vectors.col(j));
        values_[layout_.offset(i) + j] = blk.values[j];
      }
      shifts_[static_cast<size_t>(i)] = blk.shift;
      locked_[static_cast<size_t>(i)] = blk.locked ? 1 : 0;
    }

    if (oracle_) {
      if (oracle_->vectors.rows() != n_ || oracle_->vectors.cols() < N_ ||
          oracle_->values.size() < N_)
        throw BadInput("solver: oracle does not cover the layout");
      for (int i = 0; i < q_; ++i) {
        const int off = layout_.offset(i), d = layout_.d()[static_cast<size_t>(i)];
        oracle_cluster_.push_back(std::make_unique<Subspace>(
            Matrix(oracle_->vectors.middleCols(off, d)), actx_, opts_.rank_tol));
      }
      oracle_pool_ = std::make_unique<Subspace>(
          Matrix(oracle_->vectors.leftCols(N_)), actx_, opts_.rank_tol);
    }
  }

  ParoResult run() {
    record_state(0, shifts_);
    if (opts_.variant == Variant::simplified) {
      run_simplified();
    } else {
      run_ritz(opts_.variant == Variant::modified);
    }
    finalize();
    return std::move(result_);
  }

 private:
  void warn(const std::string& msg) { result_.warnings.push_back(msg); }

  std::shared_ptr<const ShiftedFactorization> try_factor(int i) {
    double& shift = shifts_[static_cast<size_t>(i)];
    for (int attempt = 0; attempt < 2; ++attempt) {
      try {
        return std::make_shared<const ShiftedFactorization>(p_.A, p_.B, shift,
                                                            opts_.pivot_tol);
      } catch (const NearSingular& e) {
        if (attempt == 0) {
          const double nudged = shift + kShiftNudge * (1.0 + std::abs(shift));
          warn("cluster " + std::to_string(i) + ": shift " + format_double(shift) +
               " is near an eigenvalue (pivot " + format_double(e.smallest_pivot) +
               "), nudged to " + format_double(nudged));
          shift = nudged;
        }
      }
    }
    warn("cluster " + std::to_string(i) + ": shift still near-singular after nudge");
    return nullptr;
  }

  void track_block_rank(const Matrix& pool) {
    for (int i = 0; i < q_; ++i) {
      const int d = layout_.d()[static_cast<size_t>(i)];
      if (d < 2) continue;
      const GramEig ge = gram_eig(*actx_, Matrix(pool.middleCols(layout_.offset(i), d)));
      const double largest = ge.values[ge.values.size() - 1];
      if (largest > 0.0)
        result_.min_update_gram = std::min(result_.min_update_gram, ge.values[0] / largest);
    }
  }

  void record_state(int iter, const std::vector<double>& used_shifts) {
    double eps = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < q_; ++i) {
      const int off = layout_.offset(i), d = layout_.d()[static_cast<size_t>(i)];
      double dist = std::numeric_limits<double>::quiet_NaN();
      if (oracle_) {
        const Subspace iterate(Matrix(U_.middleCols(off, d)), actx_, opts_.rank_tol);
        dist = subspace_dist(*oracle_cluster_[static_cast<size_t>(i)], iterate);
        if (std::isnan(eps) || dist > eps) eps = dist;
      }
      for (int j = 0; j < d; ++j)
        result_.trace.rows.push_back({iter, i, j, values_[off + j],
                                      used_shifts[static_cast<size_t>(i)], dist,
                                      locked_[static_cast<size_t>(i)] != 0});
    }
    if (!oracle_) return;

    result_.eps_hat.push_back(eps);
    const Subspace pool(U_, actx_, opts_.rank_tol);
    const double xi = subspace_dist(*oracle_pool_, pool);
    result_.xi.push_back(xi);

    double amax = 0.0;
    bool aligned_ok = true;
    for (int i = 0; i < q_ && aligned_ok; ++i) {
      const int off = layout_.offset(i), d = layout_.d()[static_cast<size_t>(i)];
      Matrix block(n_, d);
      for (int j = 0; j < d; ++j) block.col(j) = actx_->normalize(U_.col(off + j));
      try {
        const Matrix w = align_basis(block, *oracle_cluster_[static_cast<size_t>(i)],
                                     opts_.rank_tol);
        for (int j = 0; j < d; ++j)
          amax = std::max(amax,
                          vector_dist(Vector(w.col(j)), Vector(block.col(j)), *actx_));
      } catch (const NotIsomorphic&) {
        aligned_ok = false;  // iterate too far from the target for a pairing
      }
    }
    result_.aligned_dist.push_back(
        aligned_ok ? amax : std::numeric_limits<double>::quiet_NaN());
    if (aligned_ok && xi >= 1e-12)
      result_.c_tilde_estimate = std::max(result_.c_tilde_estimate, amax / xi);
  }

  void run_simplified() {
    std::vector<std::shared_ptr<const ShiftedFactorization>> facts(
        static_cast<size_t>(q_));
    for (int i = 0; i < q_; ++i) {
      if (locked_[static_cast<size_t>(i)]) continue;
      facts[static_cast<size_t>(i)] = try_factor(i);
      if (!facts[static_cast<size_t>(i)]) {
        locked_[static_cast<size_t>(i)] = 1;
        warn("cluster " + std::to_string(i) + ": locked at start, shift pinned");
      }
    }

    bool any_active = false;
    for (int i = 0; i < q_; ++i)
      if (!locked_[static_cast<size_t>(i)]) any_active = true;
    if (!any_active) {
      warn("all clusters locked; nothing to iterate");
      return;
    }

    for (int it = 1; it <= opts_.max_iter; ++it) {
      Matrix next = U_;
      std::vector<double> diff(static_cast<size_t>(N_), 0.0);
      parallel_for(N_, opts_.threads, [&](int k) {
        const auto [i, j] = layout_.pair(k);
        (void)j;
        if (locked_[static_cast<size_t>(i)]) return;
        Vector x = shifted_orbit_update(p_, *facts[static_cast<size_t>(i)],
                                        Vector(U_.col(k)));
        x = bctx_->normalize(x);
        const double sign = bctx_->inner(x, Vector(U_.col(k))) >= 0.0 ? 1.0 : -1.0;
        diff[static_cast<size_t>(k)] =
            bctx_->norm(sign * x - U_.col(k)) / bctx_->norm(Vector(U_.col(k)));
        next.col(k) = x;
      });
      U_ = std::move(next);
      for (int k = 0; k < N_; ++k) values_[k] = rayleigh_quotient(p_, U_.col(k));
      track_block_rank(U_);
      record_state(it, shifts_);
      result_.iterations = it;
      const double dmax = *std::max_element(diff.begin(), diff.end());
      if (dmax <= opts_.tol) {
        result_.converged = true;
        break;
      }
    }
  }

  void run_ritz(bool with_residual) {
    std::vector<double> prev_means = cluster_means(values_);
    std::vector<char> crossing_warned(static_cast<size_t>(q_), 0);

    for (int it = 1; it <= opts_.max_iter; ++it) {
      std::vector<std::shared_ptr<const ShiftedFactorization>> facts(
          static_cast<size_t>(q_));
      std::vector<char> pending_lock(static_cast<size_t>(q_), 0);
      for (int i = 0; i < q_; ++i) {
        if (locked_[static_cast<size_t>(i)]) continue;
        facts[static_cast<size_t>(i)] = try_factor(i);
        if (!facts[static_cast<size_t>(i)]) pending_lock[static_cast<size_t>(i)] = 1;
      }
      bool any_active = false;
      for (int i = 0; i < q_; ++i)
        if (facts[static_cast<size_t>(i)]) any_active = true;
      if (!any_active) {
        warn("no cluster could factor its shift; stopping");
        return;
      }
      const std::vector<double> used_shifts = shifts_;

      Matrix half = U_;
      Matrix corr(n_, N_);
      std::vector<char> has_corr(static_cast<size_t>(N_), 0);
      parallel_for(N_, opts_.threads, [&](int k) {
        const auto [i, j] = layout_.pair(k);
        (void)j;
        const auto& f = facts[static_cast<size_t>(i)];
        if (!f) return;  // locked or skipped cluster carries its column
        if (with_residual) {
          ResidualUpdate r = residual_orbit_update(p_, *f, Vector(U_.col(k)));
          half.col(k) = r.u_half;
          corr.col(k) = r.e;
          has_corr[static_cast<size_t>(k)] = 1;
        } else {
          half.col(k) = shifted_orbit_update(p_, *f, Vector(U_.col(k)));
        }
      });

      Matrix pool(n_, with_residual ? 2 * N_ : N_);
      int pc = 0;
      for (int k = 0; k < N_; ++k) pool.col(pc++) = bctx_->normalize(half.col(k));
      track_block_rank(pool.leftCols(N_));
      if (with_residual) {
        for (int k = 0; k < N_; ++k) {
          if (!has_corr[static_cast<size_t>(k)]) continue;
          try {
            pool.col(pc++) = bctx_->normalize(corr.col(k));
          } catch (const ZeroVector&) {
            // A vanishing correction carries no new direction.
          }
        }
      }

      Matrix rr_basis;
      if (with_residual) {
        const InnerProductContext::MgsResult mgs =
            bctx_->orthonormalize(pool.leftCols(pc), kAugmentedDropTol);
        if (static_cast<int>(mgs.kept.size()) < N_)
          throw RankDeficient("modified update: augmented basis rank fell below target count");
        rr_basis = mgs.q;
      } else {
        rr_basis = pool.leftCols(pc);
      }

      const RitzPairs rp = rayleigh_ritz(p_, rr_basis, opts_.rank_tol);
      const Vector new_values = rp.values.head(N_);
      const Matrix new_vectors = rp.vectors.leftCols(N_);

      const std::vector<double> means = cluster_means(new_values);
      for (int i = 0; i + 1 < q_; ++i) {
        const double mid = 0.5 * (prev_means[static_cast<size_t>(i)] +
                                  prev_means[static_cast<size_t>(i + 1)]);
        if (means[static_cast<size_t>(i)] > mid &&
            !crossing_warned[static_cast<size_t>(i)]) {
          crossing_warned[static_cast<size_t>(i)] = 1;
          warn("cluster " + std::to_string(i) + ": values crossed toward cluster " +
               std::to_string(i + 1));
        }
        if (means[static_cast<size_t>(i + 1)] < mid &&
            !crossing_warned[static_cast<size_t>(i + 1)]) {
          crossing_warned[static_cast<size_t>(i + 1)] = 1;
          warn("cluster " + std::to_string(i + 1) + ": values crossed toward cluster " +
               std::to_string(i));
        }
      }

      double total_change = 0.0;
      std::vector<double> cluster_change(static_cast<size_t>(q_), 0.0);
      for (int k = 0; k < N_; ++k) {
        const double c = std::abs(new_values[k] - values_[k]);
        total_change += c;
        const int i = layout_.pair(k).first;
        cluster_change[static_cast<size_t>(i)] =
            std::max(cluster_change[static_cast<size_t>(i)], c);
      }

      U_ = new_vectors;
      values_ = new_values;
      for (int i = 0; i < q_; ++i) {
        if (pending_lock[static_cast<size_t>(i)] &&
            cluster_change[static_cast<size_t>(i)] < opts_.effective_lock_tol()) {
          locked_[static_cast<size_t>(i)] = 1;
          warn("cluster " + std::to_string(i) + ": locked (stationary values, shift pinned)");
        }
      }
      record_state(it, used_shifts);
      result_.iterations = it;

      for (int i = 0; i < q_; ++i) {
        if (locked_[static_cast<size_t>(i)]) continue;
        std::vector<double> vals;
        const int off = layout_.offset(i), d = layout_.d()[static_cast<size_t>(i)];
        for (int j = 0; j < d; ++j) vals.push_back(values_[off + j]);
        shifts_[static_cast<size_t>(i)] = convex_shift(vals);
      }
      prev_means = means;

      if (total_change <= opts_.tol) {
        result_.converged = true;
        break;
      }
    }
  }

  std::vector<double> cluster_means(const Vector& vals) const {
    std::vector<double> means(static_cast<size_t>(q_), 0.0);
    for (int i = 0; i < q_; ++i) {
      const int off = layout_.offset(i), d = layout_.d()[static_cast<size_t>(i)];
      double s = 0.0;
      for (int j = 0; j < d; ++j) s += vals[off + j];
      means[static_cast<size_t>(i)] = s / d;
    }
    return means;
  }

  void finalize() {
    if (opts_.variant == Variant::simplified) {
      // The per-orbital iteration never couples columns of one cluster, so
      // restore orthonormality inside each block before reporting.
      for (int i = 0; i < q_; ++i) {
        const int off = layout_.offset(i), d = layout_.d()[static_cast<size_t>(i)];
        if (d < 2) continue;
        U_.middleCols(off, d) =
            bctx_->orthonormal_basis(Matrix(U_.middleCols(off, d)));
        for (int j = 0; j < d; ++j)
          values_[off + j] = rayleigh_quotient(p_, U_.col(off + j));
      }
    }
    result_.eigenvalues = values_;
    result_.eigenvectors = U_;
    result_.residuals.resize(static_cast<size_t>(N_));
    for (int k = 0; k < N_; ++k) {
      const Vector bu = p_.B.mat() * U_.col(k);
      const Vector r = p_.A.mat() * U_.col(k) - values_[k] * bu;
      const double den = std::abs(values_[k]) * bu.norm();
      result_.residuals[static_cast<size_t>(k)] =
          r.norm() / (den > 0.0 ? den : bu.norm());
    }
  }

  const DiscreteProblem& p_;
  const ClusterLayout& layout_;
  ParoOptions opts_;
  const EigDecomposition* oracle_;
  int n_ = 0, N_ = 0, q_ = 0;
  CtxPtr actx_, bctx_;
  Matrix U_;
  Vector values_;
  std::vector<double> shifts_;
  std::vector<char> locked_;
  std::vector<std::unique_ptr<Subspace>> oracle_cluster_;
  std::unique_ptr<Subspace> oracle_pool_;
  ParoResult result_;
};

}  // namespace detail

inline ParoResult paro_solve(const DiscreteProblem& p, const ClusterLayout& layout,
                             const OrbitalBlocks& init, const ParoOptions& opts,
                             const EigDecomposition* oracle = nullptr) {
  detail::ParoEngine engine(p, layout, init, opts, oracle);
  return engine.run();
}

inline ParoResult paro_simplified(const DiscreteProblem& p, const ClusterLayout& layout,
                                  const OrbitalBlocks& init, ParoOptions opts,
                                  const EigDecomposition* oracle = nullptr) {
  opts.variant = Variant::simplified;
  return paro_solve(p, layout, init, opts, oracle);
}

inline ParoResult paro_shifted(const DiscreteProblem& p, const ClusterLayout& layout,
                               const OrbitalBlocks& init, ParoOptions opts,
                               const EigDecomposition* oracle = nullptr) {
  opts.variant = Variant::shifted;
  return paro_solve(p, layout, init, opts, oracle);
}

inline ParoResult paro_modified(const DiscreteProblem& p, const ClusterLayout& layout,
                                const OrbitalBlocks& init, ParoOptions opts,
                                const EigDecomposition* oracle = nullptr) {
  opts.variant = Variant::modified;
  return paro_solve(p, layout, init, opts, oracle);
}

}  // namespace paro
