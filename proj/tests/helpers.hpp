#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/QR>
#include <paro/paro.hpp>

#ifndef _WIN32
#include <sys/wait.h>
#include <unistd.h>
#endif

namespace testutil {

// Well-conditioned random SPD matrix: Q diag(d) Q' with d in [0.5, 2].
inline paro::SymMatrix random_spd(paro::Rng& rng, Eigen::Index n) {
  const paro::Matrix g = rng.normal_matrix(n, n);
  Eigen::HouseholderQR<paro::Matrix> qr(g);
  const paro::Matrix q = qr.householderQ();
  paro::Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d[i] = rng.uniform(0.5, 2.0);
  paro::Matrix m = q * d.asDiagonal() * q.transpose();
  m = (0.5 * (m + m.transpose())).eval();
  return paro::SymMatrix(m, paro::Definiteness::spd);
}

inline paro::Matrix random_orthonormal(paro::Rng& rng,
                                       const paro::InnerProductContext& ctx,
                                       Eigen::Index k) {
  return ctx.orthonormal_basis(rng.normal_matrix(ctx.order(), k));
}

inline paro::DiscreteProblem problem_1d(int mesh_n) {
  paro::EllipticSpec spec;
  spec.dimension = 1;
  spec.mesh_n = mesh_n;
  return paro::build_problem(spec);
}

inline paro::DiscreteProblem problem_2d(int mesh_n) {
  paro::EllipticSpec spec;
  spec.dimension = 2;
  spec.mesh_n = mesh_n;
  return paro::build_problem(spec);
}

// Starting blocks for singleton layouts: reference vector j tilted by an
// exact angle asin(eps0) toward reference vector j+1, with prescribed value
// estimates (and hence shifts). Deterministic; used by the rate studies.
inline paro::OrbitalBlocks adjacent_mode_init(const paro::DiscreteProblem& p,
                                              const paro::EigDecomposition& oracle,
                                              const paro::ClusterLayout& layout,
                                              double eps0,
                                              const std::vector<double>& values) {
  const int N = layout.total();
  const paro::CtxPtr actx = paro::energy_context(p);
  const double theta = std::asin(eps0);
  paro::Matrix cols(p.dimension(), N);
  paro::Vector vals(N);
  for (int k = 0; k < N; ++k) {
    const paro::Vector u = actx->normalize(oracle.vectors.col(k));
    const paro::Vector w0 = oracle.vectors.col(k + 1);
    paro::Vector w = w0 - actx->inner(u, w0) * u;
    w = actx->normalize(w);
    cols.col(k) = std::cos(theta) * u + std::sin(theta) * w;
    vals[k] = values[static_cast<size_t>(k)];
  }
  return paro::make_blocks(p, layout, cols, vals);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Creates (or empties and recreates) a scratch directory unique to this
// process and call site.
inline std::string fresh_dir(const std::string& tag) {
  static int counter = 0;
  std::string dir = "paro_test_" + tag + "_" + std::to_string(counter++);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Runs the command with output captured; returns the exit status.
inline int run_cmd(const std::string& cmd, std::string* output = nullptr) {
  static int counter = 0;
#ifdef _WIN32
  const std::string log = "cmd_output_" + std::to_string(counter++) + ".log";
  const int rc = std::system((cmd + " > " + log + " 2>&1").c_str());
  if (output) *output = read_file(log);
  return rc;
#else
  const std::string log = "cmd_output_" + std::to_string(::getpid()) + "_" +
                          std::to_string(counter++) + ".log";
  const int rc = std::system((cmd + " > " + log + " 2>&1").c_str());
  if (output) *output = read_file(log);
  std::remove(log.c_str());
  return rc == -1 ? -1 : WEXITSTATUS(rc);
#endif
}

}  // namespace testutil
