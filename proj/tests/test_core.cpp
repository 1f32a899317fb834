#include <catch2/catch_amalgamated.hpp>

#include <Eigen/LU>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <vector>

#include <paro/paro.hpp>

#include "helpers.hpp"

using namespace paro;

TEST_CASE("symmetric storage mirrors the lower triangle") {
  Matrix m(3, 3);
  m << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  SymMatrix s(m);
  CHECK(s(0, 1) == s(1, 0));
  CHECK(s.mat() == s.mat().transpose());

  SECTION("triplets accumulate duplicates") {
    SymMatrix t = SymMatrix::from_triplets(2, {{1, 0, 0.5}, {0, 1, 0.25}, {0, 0, 1.0}});
    CHECK(t(1, 0) == 0.75);
    CHECK(t(0, 1) == 0.75);
    CHECK(t(0, 0) == 1.0);
    CHECK(t(1, 1) == 0.0);
  }
  SECTION("rejects non-square and out-of-range input") {
    CHECK_THROWS_AS(SymMatrix(Matrix::Zero(2, 3)), BadInput);
    CHECK_THROWS_AS(SymMatrix::from_triplets(2, {{2, 0, 1.0}}), BadInput);
  }
}

TEST_CASE("double formatting survives a round trip") {
  for (double x : {0.1, 1.0 / 3.0, 9.871586352449812, -2.5e-17, 0.0}) {
    const std::string s = format_double(x);
    CHECK(std::stod(s) == x);
  }
}

TEST_CASE("matrix market symmetric files round-trip bit-exactly") {
  const std::string dir = testutil::fresh_dir("mm_sym");
  Rng rng(11);
  const SymMatrix m = testutil::random_spd(rng, 7);
  const std::string path = dir + "/roundtrip_sym.mtx";
  mm::write_symmetric(path, m);
  const SymMatrix back = mm::read_symmetric(path);
  REQUIRE(back.order() == m.order());
  CHECK(back.mat() == m.mat());

  SECTION("upper-triangle entries are accepted") {
    std::ofstream out(dir + "/upper.mtx");
    out << "%%MatrixMarket matrix coordinate real symmetric\n"
        << "% comment line\n"
        << "2 2 3\n"
        << "1 1 2\n"
        << "1 2 -1\n"
        << "2 2 2\n";
    out.close();
    const SymMatrix u = mm::read_symmetric(dir + "/upper.mtx");
    CHECK(u(1, 0) == -1.0);
    CHECK(u(0, 0) == 2.0);
  }
  SECTION("malformed input is rejected") {
    std::ofstream out(dir + "/bad.mtx");
    out << "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n";
    out.close();
    CHECK_THROWS_AS(mm::read_symmetric(dir + "/bad.mtx"), BadInput);
    CHECK_THROWS_AS(mm::read_symmetric("no_such_file.mtx"), BadInput);
  }
}

TEST_CASE("matrix market dense files round-trip bit-exactly") {
  const std::string dir = testutil::fresh_dir("mm_dense");
  Rng rng(12);
  const Matrix m = rng.normal_matrix(5, 3);
  mm::write_dense(dir + "/roundtrip_dense.mtx", m);
  const Matrix back = mm::read_dense(dir + "/roundtrip_dense.mtx");
  CHECK(back == m);
}

TEST_CASE("inner-product context enforces positive definiteness") {
  Matrix bad(2, 2);
  bad << 1, 0, 0, -1;
  CHECK_THROWS_AS(InnerProductContext(SymMatrix(bad)), NotSpd);

  Rng rng(13);
  const SymMatrix m = testutil::random_spd(rng, 6);
  InnerProductContext ctx(m);
  const Vector v = rng.normal_vector(6);
  const Vector w = rng.normal_vector(6);
  CHECK(ctx.inner(v, w) == Catch::Approx(v.dot(m.mat() * w)));
  CHECK(ctx.norm(v) == Catch::Approx(std::sqrt(ctx.inner(v, v))));

  SECTION("normalize rejects vanishing vectors") {
    CHECK_THROWS_AS(ctx.normalize(Vector::Zero(6)), ZeroVector);
    const Vector u = ctx.normalize(v);
    CHECK(ctx.norm(u) == Catch::Approx(1.0).margin(1e-14));
  }
  SECTION("orthonormalize reports dependent columns") {
    Matrix basis(6, 3);
    basis.col(0) = v;
    basis.col(1) = w;
    basis.col(2) = 2.0 * v - 3.0 * w;
    const auto r = ctx.orthonormalize(basis, 1e-10);
    REQUIRE(r.kept.size() == 2);
    REQUIRE(r.dropped == std::vector<int>{2});
    const Matrix g = r.q.transpose() * m.mat() * r.q;
    CHECK((g - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK_THROWS_AS(ctx.orthonormal_basis(basis), RankDeficient);
  }
}

TEST_CASE("shifted factorization solves against an independent method") {
  Rng rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng.uniform(0.0, 6.0));
    const Matrix raw = rng.normal_matrix(n, n);
    const Matrix a = 0.5 * (raw + raw.transpose());  // indefinite in general
    const SymMatrix A(a);
    const SymMatrix B = testutil::random_spd(rng, n);
    const double shift = rng.uniform(-1.0, 1.0);
    const Vector rhs = rng.normal_vector(n);

    const Matrix s = a - shift * B.mat();
    if (std::abs(s.determinant()) < 1e-6) continue;  // stay away from singular draws
    const ShiftedFactorization f(A, B, shift);
    const Vector x = f.solve(rhs);
    const Vector ref = s.fullPivLu().solve(rhs);
    CHECK((x - ref).norm() <= 1e-9 * (1.0 + ref.norm()));
  }
}

TEST_CASE("shifted solve matches the eigen-expansion of the resolvent") {
  const DiscreteProblem p = testutil::problem_1d(31);
  const EigDecomposition d = dense_generalized_eig(p.A, p.B);
  const double shift = 0.5 * (d.values[0] + d.values[1]);

  // u expanded in B-orthonormal eigenvectors: alpha_r = u_r' B u, and
  // (A - shift B)^{-1} shift B u = sum shift/(lambda_r - shift) alpha_r u_r.
  Rng rng(19);
  const Vector u = rng.normal_vector(p.dimension());
  const Vector alpha = d.vectors.transpose() * (p.B.mat() * u);
  Vector expected = Vector::Zero(p.dimension());
  for (Eigen::Index r = 0; r < d.values.size(); ++r)
    expected += shift / (d.values[r] - shift) * alpha[r] * d.vectors.col(r);

  const ShiftedFactorization f(p.A, p.B, shift);
  const Vector x = f.solve(Vector(shift * (p.B.mat() * u)));
  CHECK((x - expected).norm() <= 1e-8 * expected.norm());

  SECTION("matrix right-hand sides solve column by column") {
    const Matrix rhs = rng.normal_matrix(p.dimension(), 3);
    const Matrix xs = f.solve(rhs);
    for (int j = 0; j < 3; ++j)
      CHECK((xs.col(j) - f.solve(Vector(rhs.col(j)))).norm() == 0.0);
  }
}

TEST_CASE("a shift on an eigenvalue is reported as near-singular") {
  const DiscreteProblem p = testutil::problem_1d(31);
  const EigDecomposition d = dense_generalized_eig(p.A, p.B);
  try {
    ShiftedFactorization f(p.A, p.B, d.values[0]);
    FAIL("expected NearSingular");
  } catch (const NearSingular& e) {
    CHECK(e.shift == d.values[0]);
    CHECK(e.smallest_pivot >= 0.0);
    CHECK(e.smallest_pivot < 1e-6);
  }
  // A shift safely inside the first gap factors fine.
  CHECK_NOTHROW(ShiftedFactorization(p.A, p.B, 0.5 * (d.values[0] + d.values[1])));
}

TEST_CASE("factorization results are deterministic") {
  Rng rng(23);
  const SymMatrix B = testutil::random_spd(rng, 8);
  const Matrix raw = rng.normal_matrix(8, 8);
  const Matrix a = 0.5 * (raw + raw.transpose());
  const SymMatrix A(a);
  const Vector rhs = rng.normal_vector(8);
  const Vector x1 = ShiftedFactorization(A, B, 0.3).solve(rhs);
  const Vector x2 = ShiftedFactorization(A, B, 0.3).solve(rhs);
  CHECK(x1 == x2);
}

TEST_CASE("dense generalized eigensolver basics") {
  const DiscreteProblem p = testutil::problem_1d(15);
  const EigDecomposition d = dense_generalized_eig(p.A, p.B);
  REQUIRE(d.values.size() == 15);
  for (Eigen::Index k = 1; k < d.values.size(); ++k)
    CHECK(d.values[k - 1] <= d.values[k]);
  const Matrix g = d.vectors.transpose() * p.B.mat() * d.vectors;
  CHECK((g - Matrix::Identity(15, 15)).cwiseAbs().maxCoeff() < 1e-12);

  SECTION("operand checks") {
    CHECK_THROWS_AS(dense_generalized_eig(p.A, SymMatrix::identity(3)), BadInput);
    Matrix indef(2, 2);
    indef << 1, 0, 0, -1;
    CHECK_THROWS_AS(dense_generalized_eig(SymMatrix::identity(2), SymMatrix(indef)),
                    NotSpd);
  }
}

TEST_CASE("random stream is deterministic and well-behaved") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());

  Rng r(101);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = r.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    sum += x;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.01);
  sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
}

TEST_CASE("parallel loop covers every index exactly once") {
  const int count = 1000;
  std::vector<int> hits(count, 0);
  parallel_for(count, 4, [&](int i) { hits[static_cast<size_t>(i)] += 1; });
  for (int h : hits) CHECK(h == 1);

  SECTION("serial and parallel results agree") {
    std::vector<double> serial(count), parallel(count);
    auto work = [](int i) { return std::sin(static_cast<double>(i)) * 1.5; };
    parallel_for(count, 1, [&](int i) { serial[static_cast<size_t>(i)] = work(i); });
    parallel_for(count, 4, [&](int i) { parallel[static_cast<size_t>(i)] = work(i); });
    CHECK(serial == parallel);
  }
  SECTION("exceptions propagate to the caller") {
    CHECK_THROWS_AS(parallel_for(100, 4,
                                 [](int i) {
                                   if (i == 57) throw NumericalError("boom");
                                 }),
                    NumericalError);
    CHECK_THROWS_AS(parallel_for(10, 0, [](int) {}), BadInput);
  }
}
