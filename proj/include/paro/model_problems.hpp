#pragma once

#include <algorithm>
#include <map>
#include <numbers>
#include <tuple>
#include <vector>

#include "paro/errors.hpp"
#include "paro/inner_product.hpp"
#include "paro/sym_matrix.hpp"

namespace paro {

// Discretized pencil: A carries the energy form, B the mass form; both SPD.
struct DiscreteProblem {
  SymMatrix A;
  SymMatrix B;
  Eigen::Index dimension() const { return A.order(); }
};

inline CtxPtr energy_context(const DiscreteProblem& p) { return make_context(p.A); }
inline CtxPtr mass_context(const DiscreteProblem& p) { return make_context(p.B); }

// Uniform-mesh P1 discretization of -div(a grad u) + c u on (0,1)^dim with
// homogeneous Dirichlet boundary. Coefficients are per element (single entry
// = constant): intervals in 1D; triangles in 2D, where each mesh square is
// split along its southwest-northeast diagonal, lower triangle first.
struct EllipticSpec {
  int dimension = 1;
  int mesh_n = 2;  // interior nodes per axis; h = 1/(mesh_n + 1)
  std::vector<double> coeff_a = {1.0};
  std::vector<double> coeff_c = {0.0};

  bool constant_coefficients() const {
    return coeff_a.size() == 1 && coeff_c.size() == 1;
  }
  int cell_count() const {
    const int per_axis = mesh_n + 1;
    return dimension == 1 ? per_axis : 2 * per_axis * per_axis;
  }
  double h() const { return 1.0 / (mesh_n + 1); }
};

namespace detail {

inline double cell_coeff(const std::vector<double>& c, int cell) {
  return c.size() == 1 ? c[0] : c[static_cast<size_t>(cell)];
}

inline void validate(const EllipticSpec& spec) {
  if (spec.dimension != 1 && spec.dimension != 2)
    throw BadInput("build_problem: dimension must be 1 or 2");
  if (spec.mesh_n < 2) throw BadInput("build_problem: mesh_n must be >= 2");
  const size_t cells = static_cast<size_t>(spec.cell_count());
  if (spec.coeff_a.size() != 1 && spec.coeff_a.size() != cells)
    throw BadInput("build_problem: coeff_a needs one value or one per cell");
  if (spec.coeff_c.size() != 1 && spec.coeff_c.size() != cells)
    throw BadInput("build_problem: coeff_c needs one value or one per cell");
  for (double a : spec.coeff_a)
    if (!(a > 0.0))
      throw BadCoefficient("build_problem: diffusion coefficient not positive definite on a cell");
  for (double c : spec.coeff_c)
    if (c < 0.0)
      throw BadCoefficient("build_problem: reaction coefficient negative on a cell");
}

}  // namespace detail

inline DiscreteProblem build_problem(const EllipticSpec& spec) {
  detail::validate(spec);
  const int n = spec.mesh_n;
  const double h = spec.h();
  std::vector<std::tuple<int, int, double>> a_trips, b_trips;

  if (spec.dimension == 1) {
    // Element [x_e, x_{e+1}]: stiffness (a_e/h)[[1,-1],[-1,1]], mass
    // (h/6)[[2,1],[1,2]]; end nodes are Dirichlet.
    for (int e = 0; e <= n; ++e) {
      const double ae = detail::cell_coeff(spec.coeff_a, e);
      const double ce = detail::cell_coeff(spec.coeff_c, e);
      const int nodes[2] = {e - 1, e};  // interior index of x_e, x_{e+1}
      const double ks = ae / h;
      const double ms = h / 6.0;
      const double kloc[2][2] = {{ks, -ks}, {-ks, ks}};
      const double mloc[2][2] = {{2.0 * ms, ms}, {ms, 2.0 * ms}};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j <= i; ++j) {
          const int r = nodes[i], c = nodes[j];
          if (r < 0 || r >= n || c < 0 || c >= n) continue;
          a_trips.emplace_back(r, c, kloc[i][j] + ce * mloc[i][j]);
          b_trips.emplace_back(r, c, mloc[i][j]);
        }
    }
    const Eigen::Index order = n;
    return {SymMatrix::from_triplets(order, a_trips, Definiteness::spd),
            SymMatrix::from_triplets(order, b_trips, Definiteness::spd)};
  }

  // 2D: grid node (ix,iy) sits at (ix*h, iy*h); interior nodes map to
  // (iy-1)*n + (ix-1). Each square (k,l) yields the lower triangle
  // (BL,BR,TR) and the upper triangle (BL,TR,TL).
  auto interior = [n](int ix, int iy) -> int {
    if (ix < 1 || ix > n || iy < 1 || iy > n) return -1;
    return (iy - 1) * n + (ix - 1);
  };
  int cell = 0;
  for (int l = 0; l <= n; ++l)
    for (int k = 0; k <= n; ++k) {
      const int corner_x[4] = {k, k + 1, k + 1, k};
      const int corner_y[4] = {l, l, l + 1, l + 1};
      const int tri_corners[2][3] = {{0, 1, 2}, {0, 2, 3}};
      for (int t = 0; t < 2; ++t, ++cell) {
        const double ae = detail::cell_coeff(spec.coeff_a, cell);
        const double ce = detail::cell_coeff(spec.coeff_c, cell);
        double x[3], y[3];
        int idx[3];
        for (int v = 0; v < 3; ++v) {
          const int cx = corner_x[tri_corners[t][v]];
          const int cy = corner_y[tri_corners[t][v]];
          x[v] = cx * h;
          y[v] = cy * h;
          idx[v] = interior(cx, cy);
        }
        // P1 gradients via edge differences; area is h^2/2 for every cell.
        const double b[3] = {y[1] - y[2], y[2] - y[0], y[0] - y[1]};
        const double cc[3] = {x[2] - x[1], x[0] - x[2], x[1] - x[0]};
        const double area = 0.5 * std::abs(b[0] * cc[1] - b[1] * cc[0]);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j <= i; ++j) {
            int r = idx[i], c = idx[j];
            if (r < 0 || c < 0) continue;
            if (r < c) std::swap(r, c);
            const double kij = ae * (b[i] * b[j] + cc[i] * cc[j]) / (4.0 * area);
            const double mij = (i == j ? area / 6.0 : area / 12.0);
            a_trips.emplace_back(r, c, kij + ce * mij);
            b_trips.emplace_back(r, c, mij);
          }
      }
    }
  const Eigen::Index order = static_cast<Eigen::Index>(n) * n;
  return {SymMatrix::from_triplets(order, a_trips, Definiteness::spd),
          SymMatrix::from_triplets(order, b_trips, Definiteness::spd)};
}

struct SpectralLine {
  double value = 0.0;
  int multiplicity = 0;
};

// First `count` eigenvalues of the continuous operator, grouped by value.
// Closed forms exist only for constant coefficients.
inline std::vector<SpectralLine> continuous_spectrum(const EllipticSpec& spec, int count) {
  if (!spec.constant_coefficients())
    throw Unsupported("continuous_spectrum: requires constant coefficients");
  if (count < 1) throw BadInput("continuous_spectrum: count must be >= 1");
  const double a = spec.coeff_a[0];
  const double c = spec.coeff_c[0];
  const double pi2 = std::numbers::pi * std::numbers::pi;
  std::vector<SpectralLine> lines;
  if (spec.dimension == 1) {
    for (int k = 1; k <= count; ++k)
      lines.push_back({a * pi2 * k * k + c, 1});
    return lines;
  }
  // Group pi^2 (p^2 + q^2) by the integer sum; sums up to limit^2 + 1 are
  // complete, far beyond any desk-scale request.
  constexpr long kLimit = 128;
  std::map<long, int> groups;
  for (long p = 1; p <= kLimit; ++p)
    for (long q = 1; q <= kLimit; ++q) groups[p * p + q * q] += 1;
  int taken = 0;
  for (const auto& [sum, mult] : groups) {
    if (taken >= count) break;
    if (sum > kLimit * kLimit + 1)
      throw BadInput("continuous_spectrum: count too large");
    const int m = std::min(mult, count - taken);
    lines.push_back({a * pi2 * static_cast<double>(sum) + c, m});
    taken += m;
  }
  return lines;
}

}  // namespace paro
