#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <paro/paro.hpp>

#include "helpers.hpp"

using namespace paro;

namespace {

double lambda_1d(int k, int n) {
  const double h = 1.0 / (n + 1);
  const double c = std::cos(k * std::numbers::pi * h);
  return 6.0 / (h * h) * (1.0 - c) / (2.0 + c);
}

IterationTrace synthetic_trace(const std::vector<double>& dists, double shift) {
  IterationTrace t;
  for (size_t k = 0; k < dists.size(); ++k)
    t.rows.push_back({static_cast<int>(k), 0, 0, 1.0, shift, dists[k], false});
  return t;
}

}  // namespace

TEST_CASE("gap statistics of a clustered spectrum") {
  EigDecomposition oracle;
  oracle.values.resize(5);
  oracle.values << 1.0, 2.0, 2.2, 5.0, 9.0;
  const ClusterLayout layout({1, 2, 1});
  const std::vector<double> shifts = {1.0, 2.1, 5.0};

  const GapStats s = gap_stats(oracle, layout, shifts);
  CHECK(s.g == Catch::Approx(1.0).margin(1e-15));
  CHECK(s.gamma == Catch::Approx(0.2).margin(1e-12));
  CHECK(s.D == 2);
  CHECK(s.delta0 == Catch::Approx(0.1).margin(1e-12));
  CHECK(s.lambda_next == 9.0);
  CHECK(s.delta0_ok);
  REQUIRE(s.zeta.size() == 3);
  CHECK(s.zeta[1] == Catch::Approx(0.0).margin(1e-12));
  CHECK(s.gamma_over_g == Catch::Approx(0.2).margin(1e-12));

  SECTION("needs one value beyond the layout") {
    EigDecomposition shorter;
    shorter.values = oracle.values.head(4);
    CHECK_THROWS_AS(gap_stats(shorter, layout, shifts), InsufficientSpectrum);
  }
  SECTION("needs one shift per cluster") {
    CHECK_THROWS_AS(gap_stats(oracle, layout, {1.0, 2.1}), BadInput);
  }
}

TEST_CASE("gap statistics on the default mesh") {
  EigDecomposition oracle;
  oracle.values.resize(4);
  std::vector<double> shifts;
  for (int k = 1; k <= 4; ++k) oracle.values[k - 1] = lambda_1d(k, 63);
  for (int k = 1; k <= 3; ++k) shifts.push_back(lambda_1d(k, 63));

  const GapStats s = gap_stats(oracle, ClusterLayout({1, 1, 1}), shifts);
  CHECK(s.g == Catch::Approx(29.638550116880296).margin(1e-9));
  CHECK(s.delta0 == 0.0);
  CHECK(s.gamma == 0.0);
}

TEST_CASE("fixed-shift error recurrence") {
  const BoundSequence b = recurrence_simplified(0.5, 0.1, 1.0, 30);
  REQUIRE(b.eps.size() == 31);
  CHECK(b.eps[0] == 0.5);
  CHECK(b.eps[1] == Catch::Approx(0.06401843996644799).margin(1e-16));
  CHECK(b.limit_ratio == Catch::Approx(1.0 / 9.0).margin(1e-15));
  for (size_t k = 1; k < b.eps.size(); ++k) CHECK(b.eps[k] < b.eps[k - 1]);
  // Far down the sequence the contraction settles at its limit.
  CHECK(b.ratios.back() == Catch::Approx(b.limit_ratio).margin(1e-12));

  CHECK_THROWS_AS(recurrence_simplified(0.5, 0.5, 1.0, 5), HypothesisViolated);
  CHECK_THROWS_AS(recurrence_simplified(0.0, 0.1, 1.0, 5), BadInput);
  CHECK_THROWS_AS(recurrence_simplified(0.5, 0.1, 0.0, 5), BadInput);
}

TEST_CASE("shift-updating error recurrence") {
  const BoundSequence b = recurrence_shifted(0.1, 0.1, 0.0, 1.0, 1, 1, 1.0, 2.0, 3);
  REQUIRE(b.eps.size() == 4);
  CHECK(b.eps[1] == Catch::Approx(0.011166390612088836).margin(1e-16));
  REQUIRE(b.zeta.size() == 4);
  CHECK(b.zeta[1] == Catch::Approx(0.00024937655860349136).margin(1e-18));
  CHECK(b.limit_cubic == Catch::Approx(2.0).margin(1e-15));
  CHECK(b.limit_ratio == 0.0);  // gamma = 0: no linear floor

  SECTION("zero value error stops the iteration exactly") {
    const BoundSequence z = recurrence_shifted(0.1, 0.0, 0.0, 1.0, 1, 1, 1.0, 2.0, 2);
    CHECK(z.eps[1] == 0.0);
    CHECK(z.eps[2] == 0.0);
    CHECK(z.zeta[1] == 0.0);
  }
  SECTION("with regenerated value errors the decay is cubic") {
    const double e0 = 0.01;
    const BoundSequence c =
        recurrence_shifted(e0, 2.0 * e0 * e0, 0.0, 1.0, 1, 1, 1.0, 2.0, 1);
    CHECK(c.cubic_ratios[0] == Catch::Approx(2.0).epsilon(1e-3));
  }
  SECTION("parameter validation") {
    CHECK_THROWS_AS(recurrence_shifted(1.0, 0.1, 0.0, 1.0, 1, 1, 1.0, 2.0, 1), BadInput);
    CHECK_THROWS_AS(recurrence_shifted(0.1, -0.1, 0.0, 1.0, 1, 1, 1.0, 2.0, 1), BadInput);
    CHECK_THROWS_AS(recurrence_shifted(0.1, 0.1, 0.0, 0.0, 1, 1, 1.0, 2.0, 1), BadInput);
    CHECK_THROWS_AS(recurrence_shifted(0.1, 0.1, 0.0, 1.0, 0, 1, 1.0, 2.0, 1), BadInput);
    CHECK_THROWS_AS(recurrence_shifted(0.1, 0.1, 0.0, 1.0, 1, 1, 0.0, 2.0, 1), BadInput);
  }
}

TEST_CASE("admissible error and stability constants") {
  const std::vector<SpectralLine> lines = {{1.0, 1}, {2.0, 1}, {4.0, 1}};

  const KnyazevConstants k1 = knyazev_constants(lines, 0.5, 1);
  CHECK(k1.eps_star == Catch::Approx(0.3535533905932738).margin(1e-15));
  CHECK(k1.c_star == Catch::Approx(2.309401076758503).margin(1e-12));
  CHECK(k1.c_dstar == Catch::Approx(9.237604307034012).margin(1e-12));

  // Default q spans every listed gap.
  const KnyazevConstants k2 = knyazev_constants(lines, 0.5);
  CHECK(k2.eps_star == Catch::Approx(0.3535533905932738).margin(1e-15));
  CHECK(k2.c_star == Catch::Approx(2.8284271247461903).margin(1e-12));
  CHECK(k2.c_dstar == Catch::Approx(11.313708498984761).margin(1e-12));

  SECTION("validation") {
    CHECK_THROWS_AS(knyazev_constants(lines, 0.0), BadInput);
    CHECK_THROWS_AS(knyazev_constants(lines, 1.0), BadInput);
    CHECK_THROWS_AS(knyazev_constants({}, 0.5), Empty);
    CHECK_THROWS_AS(knyazev_constants(lines, 0.5, 3), BadInput);
    CHECK_THROWS_AS(knyazev_constants({{1.0, 1}, {1.0, 1}}, 0.5), DegenerateGap);
    CHECK_THROWS_AS(knyazev_constants({{-1.0, 1}, {2.0, 1}}, 0.5), BadInput);
    CHECK_THROWS_AS(knyazev_constants({{1.0, 0}, {2.0, 1}}, 0.5), BadInput);
  }
}

TEST_CASE("trace analysis measures the observed order") {
  const IterationTrace trace = synthetic_trace({1e-3, 1e-6, 1e-9}, 1.0);
  EigDecomposition oracle;
  oracle.values.resize(2);
  oracle.values << 1.0, 3.0;

  const TraceReport rep = trace_analysis(trace, oracle, ClusterLayout({1}));
  REQUIRE(rep.eps_hat.size() == 3);
  CHECK(rep.window_pairs == 2);
  CHECK(rep.fitted_order == Catch::Approx(1.0).margin(1e-12));
  CHECK(rep.gm_ratio == Catch::Approx(1e-3).epsilon(1e-12));
  CHECK(rep.stats.g == Catch::Approx(2.0).margin(1e-15));
  CHECK(rep.stats.lambda_next == 3.0);
  CHECK(rep.window_lo == 1e-12);
  CHECK(rep.window_hi == 1e-2);
  // Shifts equal the eigenvalue, so the fixed-shift model does not apply.
  CHECK(rep.theory_simplified.eps.empty());

  SECTION("fewer than two window pairs gives no order") {
    const IterationTrace t2 = synthetic_trace({0.5, 1e-13, 1e-14}, 1.0);
    const TraceReport r2 = trace_analysis(t2, oracle, ClusterLayout({1}));
    CHECK(r2.window_pairs == 0);
    CHECK(std::isnan(r2.fitted_order));
  }
  SECTION("traces without oracle distances are rejected") {
    IterationTrace bare = synthetic_trace({1e-3}, 1.0);
    bare.rows[0].dist_to_oracle = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(trace_analysis(bare, oracle, ClusterLayout({1})), BadInput);
    CHECK_THROWS_AS(trace_analysis(IterationTrace{}, oracle, ClusterLayout({1})),
                    BadInput);
  }
  SECTION("missing initial rows are rejected") {
    IterationTrace shifted_start = synthetic_trace({1e-3, 1e-4}, 1.0);
    for (TraceRow& r : shifted_start.rows) r.iter += 1;
    CHECK_THROWS_AS(trace_analysis(shifted_start, oracle, ClusterLayout({1})),
                    BadInput);
  }
}

TEST_CASE("trace csv format") {
  IterationTrace t;
  t.rows.push_back({0, 0, 0, 1.5, 1.25, std::numeric_limits<double>::quiet_NaN(), false});
  t.rows.push_back({1, 0, 0, 1.75, 1.25, 0.5, true});
  const std::string dir = testutil::fresh_dir("csv");
  const std::string path = dir + "/t.csv";
  write_trace_csv(path, t);

  const std::string text = testutil::read_file(path);
  CHECK(text.rfind("iter,cluster,j,ritz_value,shift,dist_to_oracle,locked\n", 0) == 0);
  CHECK(text.find("nan") != std::string::npos);
  CHECK(text.find(",1\n") != std::string::npos);

  const IterationTrace back = read_trace_csv(path);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[0].ritz_value == 1.5);
  CHECK(std::isnan(back.rows[0].dist_to_oracle));
  CHECK(back.rows[1].locked);
  CHECK(back.rows[1].dist_to_oracle == 0.5);

  const std::vector<double> series = eps_hat_series(back);
  REQUIRE(series.size() == 2);
  CHECK(std::isnan(series[0]));
  CHECK(series[1] == 0.5);

  SECTION("wrong header is rejected") {
    const std::string bad = dir + "/bad.csv";
    std::ofstream out(bad);
    out << "iteration,cluster\n0,0\n";
    out.close();
    CHECK_THROWS_AS(read_trace_csv(bad), BadInput);
  }
  SECTION("short rows are rejected") {
    const std::string bad = dir + "/short.csv";
    std::ofstream out(bad);
    out << "iter,cluster,j,ritz_value,shift,dist_to_oracle,locked\n0,0,0\n";
    out.close();
    CHECK_THROWS_AS(read_trace_csv(bad), BadInput);
  }
  SECTION("missing files are reported") {
    CHECK_THROWS_AS(read_trace_csv(dir + "/absent.csv"), BadInput);
  }
}
