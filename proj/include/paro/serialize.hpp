#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "paro/clustering.hpp"
#include "paro/diagnostics.hpp"
#include "paro/errors.hpp"
#include "paro/model_problems.hpp"
#include "paro/solver.hpp"

namespace paro {

// Insertion-ordered documents so identical runs serialize byte-identically.
using Json = nlohmann::ordered_json;

// Everything a run needs, in one document. Command-line flags override
// individual keys; anything absent keeps its default.
struct RunConfig {
  int dimension = 1;
  int mesh_n = 63;
  std::vector<double> coeff_a = {1.0};
  std::vector<double> coeff_c = {0.0};

  std::string variant = "shifted";
  int n_eigs = 5;
  std::vector<int> layout;  // empty: cluster the oracle values by gap
  double tol = 1e-10;
  int max_iter = 50;
  int threads = 1;
  std::uint64_t seed = 12345;
  double eps0 = 0.1;
  std::string init = "perturbed";  // or "random"
  double rel_gap = kDefaultRelGap;
  double pivot_tol = kDefaultPivotTol;
  double rank_tol = kDefaultRankTol;
  double lock_tol = 0.0;
  double c_tilde = 1.0;

  void validate() const {
    if (dimension != 1 && dimension != 2)
      throw BadInput("config: dimension must be 1 or 2");
    if (mesh_n < 2) throw BadInput("config: mesh_n must be >= 2");
    if (n_eigs < 1) throw BadInput("config: n_eigs must be >= 1");
    if (!(tol > 0.0)) throw BadInput("config: tol must be positive");
    if (max_iter < 1) throw BadInput("config: max_iter must be >= 1");
    if (threads < 1) throw BadInput("config: threads must be >= 1");
    if (!(eps0 >= 0.0 && eps0 < 1.0))
      throw BadInput("config: eps0 must lie in [0, 1)");
    if (!(rel_gap > 0.0)) throw BadInput("config: rel_gap must be positive");
    if (init != "perturbed" && init != "random")
      throw BadInput("config: init must be 'perturbed' or 'random'");
    variant_from_name(variant);
    int total = 0;
    for (int d : layout) {
      if (d < 1) throw BadInput("config: layout entries must be >= 1");
      total += d;
    }
    if (!layout.empty() && total != n_eigs)
      throw BadInput("config: layout must sum to n_eigs");
  }
};

namespace detail {

template <typename T>
T get_or(const Json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw BadInput("config: key '" + key + "' has the wrong type");
  }
}

}  // namespace detail

inline Json config_to_json(const RunConfig& c) {
  Json j;
  j["dimension"] = c.dimension;
  j["mesh_n"] = c.mesh_n;
  j["coeff_a"] = c.coeff_a;
  j["coeff_c"] = c.coeff_c;
  j["variant"] = c.variant;
  j["n_eigs"] = c.n_eigs;
  j["layout"] = c.layout;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["threads"] = c.threads;
  j["seed"] = c.seed;
  j["eps0"] = c.eps0;
  j["init"] = c.init;
  j["rel_gap"] = c.rel_gap;
  j["pivot_tol"] = c.pivot_tol;
  j["rank_tol"] = c.rank_tol;
  j["lock_tol"] = c.lock_tol;
  j["c_tilde"] = c.c_tilde;
  return j;
}

inline RunConfig config_from_json(const Json& j) {
  RunConfig c;
  c.dimension = detail::get_or(j, "dimension", c.dimension);
  c.mesh_n = detail::get_or(j, "mesh_n", c.mesh_n);
  c.coeff_a = detail::get_or(j, "coeff_a", c.coeff_a);
  c.coeff_c = detail::get_or(j, "coeff_c", c.coeff_c);
  c.variant = detail::get_or(j, "variant", c.variant);
  c.n_eigs = detail::get_or(j, "n_eigs", c.n_eigs);
  c.layout = detail::get_or(j, "layout", c.layout);
  c.tol = detail::get_or(j, "tol", c.tol);
  c.max_iter = detail::get_or(j, "max_iter", c.max_iter);
  c.threads = detail::get_or(j, "threads", c.threads);
  c.seed = detail::get_or(j, "seed", c.seed);
  c.eps0 = detail::get_or(j, "eps0", c.eps0);
  c.init = detail::get_or(j, "init", c.init);
  c.rel_gap = detail::get_or(j, "rel_gap", c.rel_gap);
  c.pivot_tol = detail::get_or(j, "pivot_tol", c.pivot_tol);
  c.rank_tol = detail::get_or(j, "rank_tol", c.rank_tol);
  c.lock_tol = detail::get_or(j, "lock_tol", c.lock_tol);
  c.c_tilde = detail::get_or(j, "c_tilde", c.c_tilde);
  return c;
}

inline EllipticSpec spec_from_config(const RunConfig& c) {
  EllipticSpec s;
  s.dimension = c.dimension;
  s.mesh_n = c.mesh_n;
  s.coeff_a = c.coeff_a;
  s.coeff_c = c.coeff_c;
  return s;
}

inline Json spec_to_json(const EllipticSpec& s) {
  Json j;
  j["dimension"] = s.dimension;
  j["mesh_n"] = s.mesh_n;
  j["coeff_a"] = s.coeff_a;
  j["coeff_c"] = s.coeff_c;
  return j;
}

inline EllipticSpec spec_from_json(const Json& j) {
  EllipticSpec s;
  s.dimension = detail::get_or(j, "dimension", s.dimension);
  s.mesh_n = detail::get_or(j, "mesh_n", s.mesh_n);
  s.coeff_a = detail::get_or(j, "coeff_a", s.coeff_a);
  s.coeff_c = detail::get_or(j, "coeff_c", s.coeff_c);
  return s;
}

inline Json lines_to_json(const std::vector<SpectralLine>& lines) {
  Json arr = Json::array();
  for (const SpectralLine& l : lines)
    arr.push_back(Json{{"value", l.value}, {"multiplicity", l.multiplicity}});
  return arr;
}

inline std::vector<SpectralLine> lines_from_json(const Json& arr) {
  std::vector<SpectralLine> lines;
  if (!arr.is_array()) throw BadInput("spectrum: expected an array");
  for (const Json& j : arr) {
    SpectralLine l;
    l.value = detail::get_or(j, "value", 0.0);
    l.multiplicity = detail::get_or(j, "multiplicity", 0);
    lines.push_back(l);
  }
  return lines;
}

// Excludes thread count and anything wall-clock so reruns at any parallelism
// serialize byte-identically.
inline Json result_to_json(const ParoResult& r, const RunConfig& c) {
  Json j;
  j["variant"] = c.variant;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["n_eigs"] = c.n_eigs;
  j["layout"] = c.layout;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["seed"] = c.seed;
  j["eps0"] = c.eps0;
  j["init"] = c.init;
  j["eigenvalues"] = std::vector<double>(r.eigenvalues.begin(), r.eigenvalues.end());
  j["residuals"] = r.residuals;
  j["warnings"] = r.warnings;
  j["min_update_gram"] = r.min_update_gram;
  if (!r.eps_hat.empty()) {
    j["eps_hat"] = r.eps_hat;
    j["xi"] = r.xi;
    j["aligned_dist"] = r.aligned_dist;
    j["c_tilde_estimate"] = r.c_tilde_estimate;
  }
  return j;
}

inline Json bound_to_json(const BoundSequence& b) {
  Json j;
  j["eps"] = b.eps;
  j["ratios"] = b.ratios;
  j["cubic_ratios"] = b.cubic_ratios;
  if (!b.zeta.empty()) j["zeta"] = b.zeta;
  j["limit_ratio"] = b.limit_ratio;
  j["limit_cubic"] = b.limit_cubic;
  return j;
}

inline Json stats_to_json(const GapStats& s) {
  Json j;
  j["g"] = s.g;
  j["gamma"] = s.gamma;
  j["D"] = s.D;
  j["delta0"] = s.delta0;
  j["zeta"] = s.zeta;
  j["lambda_next"] = s.lambda_next;
  j["delta0_ok"] = s.delta0_ok;
  j["gamma_over_g"] = s.gamma_over_g;
  j["zeta_over_g"] = s.zeta_over_g;
  return j;
}

inline Json report_to_json(const TraceReport& rep) {
  Json j;
  j["eps_hat"] = rep.eps_hat;
  j["ratios"] = rep.ratios;
  j["cubic_ratios"] = rep.cubic_ratios;
  j["fitted_order"] = rep.fitted_order;
  j["window_pairs"] = rep.window_pairs;
  j["gm_ratio"] = rep.gm_ratio;
  j["window"] = Json{{"lo", rep.window_lo}, {"hi", rep.window_hi}};
  j["c_tilde"] = rep.c_tilde;
  j["stats"] = stats_to_json(rep.stats);
  j["theory_simplified"] = bound_to_json(rep.theory_simplified);
  j["theory_shifted"] = bound_to_json(rep.theory_shifted);
  return j;
}

inline void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw BadInput("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw BadInput("write failed for " + path);
}

inline Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadInput("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw BadInput("malformed JSON in " + path + ": " + e.what());
  }
}

}  // namespace paro
