#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <paro/paro.hpp>

namespace fs = std::filesystem;

namespace {

paro::RunConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  return paro::config_from_json(paro::read_json(path));
}

paro::DiscreteProblem load_problem(const std::string& dir) {
  paro::DiscreteProblem p;
  p.A = paro::mm::read_symmetric(dir + "/A.mtx", paro::Definiteness::spd);
  p.B = paro::mm::read_symmetric(dir + "/B.mtx", paro::Definiteness::spd);
  if (p.A.order() != p.B.order())
    throw paro::BadInput("problem: A.mtx and B.mtx orders differ");
  return p;
}

paro::EigDecomposition load_oracle(const std::string& dir, bool need_vectors) {
  const paro::Json j = paro::read_json(dir + "/oracle.json");
  paro::EigDecomposition d;
  const auto vals = paro::detail::get_or<std::vector<double>>(j, "values", {});
  if (vals.empty()) throw paro::BadInput("oracle: no values in " + dir + "/oracle.json");
  d.values.resize(static_cast<Eigen::Index>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i)
    d.values[static_cast<Eigen::Index>(i)] = vals[i];
  if (need_vectors) {
    const auto vf = paro::detail::get_or<std::string>(j, "vectors_file",
                                                      "oracle_vectors.mtx");
    d.vectors = paro::mm::read_dense(dir + "/" + vf);
    if (d.vectors.cols() != d.values.size())
      throw paro::BadInput("oracle: vector count does not match value count");
  }
  return d;
}

int cmd_generate(const paro::RunConfig& cfg, const std::string& out) {
  cfg.validate();
  const paro::EllipticSpec spec = paro::spec_from_config(cfg);
  const paro::DiscreteProblem p = paro::build_problem(spec);
  fs::create_directories(out);
  paro::mm::write_symmetric(out + "/A.mtx", p.A);
  paro::mm::write_symmetric(out + "/B.mtx", p.B);

  paro::Json j;
  j["spec"] = paro::spec_to_json(spec);
  j["order"] = static_cast<long>(p.dimension());
  j["files"] = paro::Json{{"a", "A.mtx"}, {"b", "B.mtx"}};
  if (spec.constant_coefficients()) {
    const int count = std::min<int>(static_cast<int>(p.dimension()), 16);
    j["continuous_spectrum"] =
        paro::lines_to_json(paro::continuous_spectrum(spec, count));
  }
  paro::write_json(out + "/problem.json", j);
  std::cout << "wrote " << out << "/{A.mtx,B.mtx,problem.json}, order "
            << p.dimension() << "\n";
  return 0;
}

int cmd_oracle(const std::string& problem_dir, int count, const std::string& out) {
  const paro::DiscreteProblem p = load_problem(problem_dir);
  const paro::EigDecomposition d = paro::dense_generalized_eig(p.A, p.B);
  const int order = static_cast<int>(p.dimension());
  const int m = count >= 1 ? std::min(count, order) : order;

  fs::create_directories(out);
  paro::Json j;
  j["count"] = m;
  j["values"] = std::vector<double>(d.values.begin(), d.values.begin() + m);
  j["vectors_file"] = "oracle_vectors.mtx";
  paro::write_json(out + "/oracle.json", j);
  paro::mm::write_dense(out + "/oracle_vectors.mtx", d.vectors.leftCols(m));
  std::cout << "wrote " << out << "/{oracle.json,oracle_vectors.mtx}, " << m
            << " pairs\n";
  return 0;
}

int cmd_solve(paro::RunConfig cfg, const std::string& problem_dir,
              const std::string& oracle_dir, const std::string& out) {
  cfg.validate();
  const paro::DiscreteProblem p = load_problem(problem_dir);
  if (cfg.n_eigs > p.dimension())
    throw paro::BadInput("solve: n_eigs exceeds the matrix order");

  std::optional<paro::EigDecomposition> oracle;
  if (!oracle_dir.empty()) {
    oracle = load_oracle(oracle_dir, true);
    if (oracle->vectors.rows() != p.dimension())
      throw paro::BadInput("solve: oracle size does not match the problem");
  }

  std::vector<int> d = cfg.layout;
  if (d.empty()) {
    if (!oracle)
      throw paro::BadInput("solve: need --layout or an oracle to cluster values");
    if (oracle->values.size() < cfg.n_eigs)
      throw paro::BadInput("solve: oracle covers fewer values than n_eigs");
    const std::vector<double> head(oracle->values.begin(),
                                   oracle->values.begin() + cfg.n_eigs);
    d = paro::cluster_by_gap(head, cfg.rel_gap).d();
  }
  const paro::ClusterLayout layout(d);
  cfg.layout = d;

  paro::OrbitalBlocks init;
  if (cfg.init == "perturbed") {
    if (!oracle)
      throw paro::BadInput("solve: perturbed init requires --oracle");
    init = paro::make_perturbed_init(p, layout, *oracle, cfg.eps0, cfg.seed);
  } else {
    init = paro::make_random_init(p, layout, cfg.seed);
  }

  paro::ParoOptions opts;
  opts.variant = paro::variant_from_name(cfg.variant);
  opts.tol = cfg.tol;
  opts.max_iter = cfg.max_iter;
  opts.threads = cfg.threads;
  opts.pivot_tol = cfg.pivot_tol;
  opts.rank_tol = cfg.rank_tol;
  opts.lock_tol = cfg.lock_tol;

  const paro::ParoResult r =
      paro::paro_solve(p, layout, init, opts, oracle ? &*oracle : nullptr);

  fs::create_directories(out);
  paro::write_json(out + "/result.json", paro::result_to_json(r, cfg));
  paro::write_trace_csv(out + "/trace.csv", r.trace);
  paro::mm::write_dense(out + "/vectors.mtx", r.eigenvectors);

  std::cout << cfg.variant << ": " << (r.converged ? "converged" : "NOT converged")
            << " after " << r.iterations << " iteration(s)\n";
  for (Eigen::Index k = 0; k < r.eigenvalues.size(); ++k)
    std::cout << "  lambda[" << k << "] = " << paro::format_double(r.eigenvalues[k])
              << "\n";
  for (const std::string& w : r.warnings) std::cout << "  warning: " << w << "\n";
  return r.converged ? 0 : 2;
}

int cmd_diagnose(const paro::RunConfig& cfg, const std::string& trace_path,
                 const std::string& oracle_dir, const std::string& out) {
  const paro::IterationTrace trace = paro::read_trace_csv(trace_path);
  std::vector<int> d;
  for (const paro::TraceRow& r : trace.rows) {
    if (r.iter != 0) continue;
    if (r.cluster < 0) throw paro::BadInput("diagnose: negative cluster index");
    if (static_cast<int>(d.size()) <= r.cluster)
      d.resize(static_cast<size_t>(r.cluster) + 1, 0);
    d[static_cast<size_t>(r.cluster)] = std::max(d[static_cast<size_t>(r.cluster)], r.j + 1);
  }
  if (d.empty()) throw paro::BadInput("diagnose: trace has no initial state");
  const paro::ClusterLayout layout(d);

  const paro::EigDecomposition oracle = load_oracle(oracle_dir, false);
  const paro::TraceReport rep =
      paro::trace_analysis(trace, oracle, layout, cfg.c_tilde);

  fs::create_directories(out);
  paro::write_json(out + "/report.json", paro::report_to_json(rep));

  std::printf("%4s  %12s  %10s  %12s  %12s\n", "iter", "eps_hat", "ratio",
              "model:fixed", "model:shift");
  for (size_t n = 0; n < rep.eps_hat.size(); ++n) {
    std::printf("%4zu  %12.5e", n, rep.eps_hat[n]);
    if (n >= 1)
      std::printf("  %10.3e", rep.ratios[n - 1]);
    else
      std::printf("  %10s", "-");
    if (n < rep.theory_simplified.eps.size())
      std::printf("  %12.5e", rep.theory_simplified.eps[n]);
    else
      std::printf("  %12s", "-");
    if (n < rep.theory_shifted.eps.size())
      std::printf("  %12.5e\n", rep.theory_shifted.eps[n]);
    else
      std::printf("  %12s\n", "-");
  }
  std::printf("fitted order: %.3f over %d pair(s) in [%g, %g]\n", rep.fitted_order,
              rep.window_pairs, rep.window_lo, rep.window_hi);
  std::printf("gm ratio: %.6g (fixed-shift limit %.6g)\n", rep.gm_ratio,
              rep.theory_simplified.eps.empty()
                  ? std::numeric_limits<double>::quiet_NaN()
                  : rep.theory_simplified.limit_ratio);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustered shift-and-invert eigensolver workbench"};
  app.require_subcommand(1);

  std::string config_path, out_dir, problem_dir, oracle_dir, trace_path;

  int dim = 0, mesh_n = 0, n_eigs = 0, max_iter = 0, threads = 0;
  double tol = 0.0, eps0 = 0.0, rel_gap = 0.0, c_tilde = 0.0;
  std::uint64_t seed = 0;
  std::string variant, init_mode;
  std::vector<int> layout;

  CLI::App* gen = app.add_subcommand("generate", "Assemble a model problem");
  gen->add_option("--config", config_path, "JSON config; flags override");
  gen->add_option("--out", out_dir, "output directory")->required();
  CLI::Option* o_dim = gen->add_option("--dim", dim, "1 or 2");
  CLI::Option* o_mesh = gen->add_option("--mesh-n", mesh_n, "interior nodes per axis");

  CLI::App* orc = app.add_subcommand("oracle", "Dense reference eigendecomposition");
  orc->add_option("--problem", problem_dir, "directory with A.mtx/B.mtx")->required();
  orc->add_option("--out", out_dir, "output directory")->required();
  CLI::Option* o_count = orc->add_option("--n-eigs", n_eigs, "pairs to keep (default all)");

  CLI::App* sol = app.add_subcommand("solve", "Run a parallel orbital solver");
  sol->add_option("--config", config_path, "JSON config; flags override");
  sol->add_option("--problem", problem_dir, "directory with A.mtx/B.mtx")->required();
  sol->add_option("--oracle", oracle_dir, "directory with oracle.json");
  sol->add_option("--out", out_dir, "output directory")->required();
  CLI::Option* s_variant =
      sol->add_option("--variant", variant, "simplified|shifted|modified");
  CLI::Option* s_neigs = sol->add_option("--n-eigs", n_eigs, "pairs to compute");
  CLI::Option* s_layout =
      sol->add_option("--layout", layout, "cluster sizes, e.g. 1,2,1")->delimiter(',');
  CLI::Option* s_tol = sol->add_option("--tol", tol, "convergence tolerance");
  CLI::Option* s_maxit = sol->add_option("--max-iter", max_iter, "iteration cap");
  CLI::Option* s_threads = sol->add_option("--threads", threads, "solver workers");
  CLI::Option* s_seed = sol->add_option("--seed", seed, "rng seed for the init");
  CLI::Option* s_eps0 = sol->add_option("--eps0", eps0, "initial perturbation size");
  CLI::Option* s_init = sol->add_option("--init", init_mode, "perturbed|random");
  CLI::Option* s_relgap = sol->add_option("--rel-gap", rel_gap, "clustering gap");

  CLI::App* dia = app.add_subcommand("diagnose", "Convergence report from a trace");
  dia->add_option("--config", config_path, "JSON config; flags override");
  dia->add_option("--trace", trace_path, "trace.csv from a solve")->required();
  dia->add_option("--oracle", oracle_dir, "directory with oracle.json")->required();
  dia->add_option("--out", out_dir, "output directory")->required();
  CLI::Option* d_ctilde = dia->add_option("--c-tilde", c_tilde, "stability constant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    paro::RunConfig cfg = load_config(config_path);
    if (gen->parsed()) {
      if (o_dim->count()) cfg.dimension = dim;
      if (o_mesh->count()) cfg.mesh_n = mesh_n;
      return cmd_generate(cfg, out_dir);
    }
    if (orc->parsed()) {
      return cmd_oracle(problem_dir, o_count->count() ? n_eigs : 0, out_dir);
    }
    if (sol->parsed()) {
      if (s_variant->count()) cfg.variant = variant;
      if (s_neigs->count()) cfg.n_eigs = n_eigs;
      if (s_layout->count()) cfg.layout = layout;
      if (s_tol->count()) cfg.tol = tol;
      if (s_maxit->count()) cfg.max_iter = max_iter;
      if (s_threads->count()) cfg.threads = threads;
      if (s_seed->count()) cfg.seed = seed;
      if (s_eps0->count()) cfg.eps0 = eps0;
      if (s_init->count()) cfg.init = init_mode;
      if (s_relgap->count()) cfg.rel_gap = rel_gap;
      return cmd_solve(cfg, problem_dir, oracle_dir, out_dir);
    }
    if (d_ctilde->count()) cfg.c_tilde = c_tilde;
    return cmd_diagnose(cfg, trace_path, oracle_dir, out_dir);
  } catch (const paro::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.cli_exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
