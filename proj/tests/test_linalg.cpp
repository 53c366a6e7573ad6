#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "tdaf/errors.hpp"
#include "tdaf/linalg.hpp"

using namespace tdaf;

TEST_CASE("duplicate triplets are summed") {
  const std::vector<Triplet> t = {{0, 0, 1.0}, {0, 0, 2.0}};
  const SparseMatrix a = from_triplets(1, 1, t);
  CHECK(a.nonZeros() == 1);
  CHECK(a.coeff(0, 0) == 3.0);
}

TEST_CASE("identity triplets") {
  std::vector<Triplet> t;
  for (int i = 0; i < 7; ++i) t.emplace_back(i, i, 1.0);
  const SparseMatrix a = from_triplets(7, 7, t);
  const Vector x = Vector::LinSpaced(7, -1.0, 2.0);
  CHECK((a * x - x).norm() == 0.0);
}

TEST_CASE("random triplets agree with dense accumulation") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> idx(0, 49);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<Triplet> t;
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(50, 50);
  for (int k = 0; k < 600; ++k) {
    const int i = idx(rng), j = idx(rng);
    const double v = val(rng);
    t.emplace_back(i, j, v);
    dense(i, j) += v;
  }
  const Eigen::MatrixXd got = Eigen::MatrixXd(from_triplets(50, 50, t));
  CHECK((got - dense).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("out-of-range triplets") {
  const std::vector<Triplet> t = {{2, 0, 1.0}};
  CHECK_THROWS_AS(from_triplets(2, 2, t), StructuralError);
}

TEST_CASE("identity solve") {
  std::vector<Triplet> t;
  for (int i = 0; i < 5; ++i) t.emplace_back(i, i, 1.0);
  Vector b(5);
  b << 1, -2, 3, 0.5, 7;
  const auto [x, rep] = lu_solve(from_triplets(5, 5, t), b);
  CHECK((x - b).norm() < 1e-15);
  CHECK(rep.factor_ok);
}

TEST_CASE("saddle permutation system") {
  const std::vector<Triplet> t = {{0, 1, 1.0}, {1, 0, 1.0}};
  Vector b(2);
  b << 1, 2;
  const auto [x, rep] = lu_solve(from_triplets(2, 2, t), b);
  CHECK(x[0] == doctest::Approx(2.0));
  CHECK(x[1] == doctest::Approx(1.0));
}

TEST_CASE("random SPD system matches a dense oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::uniform_int_distribution<int> idx(0, 99);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(100, 100);
  for (int k = 0; k < 300; ++k) r(idx(rng), idx(rng)) = val(rng);
  const Eigen::MatrixXd spd = r.transpose() * r + Eigen::MatrixXd::Identity(100, 100);
  std::vector<Triplet> t;
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      if (spd(i, j) != 0.0) t.emplace_back(i, j, spd(i, j));
    }
  }
  Vector b(100);
  for (auto& v : b) v = val(rng);
  const Vector oracle = spd.partialPivLu().solve(b);
  const auto [x, rep] = lu_solve(from_triplets(100, 100, t), b);
  CHECK((x - oracle).norm() <= 1e-9 * oracle.norm());
  CHECK(rep.residual_norm <= 1e-10 * (1.0 + b.norm()));
}

TEST_CASE("singular matrix reports the pivot") {
  // Second row duplicates the first, third unknown is free.
  const std::vector<Triplet> t = {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 1.0}, {1, 1, 2.0}, {2, 2, 1.0}};
  Vector b = Vector::Ones(3);
  try {
    lu_solve(from_triplets(3, 3, t), b);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.pivot() >= 0);
    CHECK(e.pivot() <= 1);
    CHECK(std::string(e.what()).find("singular") != std::string::npos);
  }
}

TEST_CASE("zero matrix is singular") {
  const std::vector<Triplet> t = {{0, 0, 0.0}, {1, 1, 0.0}};
  CHECK_THROWS_AS(lu_solve(from_triplets(2, 2, t), Vector::Ones(2)), SolverError);
}

TEST_CASE("non-square and mismatched inputs") {
  const std::vector<Triplet> t = {{0, 0, 1.0}};
  CHECK_THROWS_AS(lu_solve(from_triplets(1, 2, t), Vector::Ones(1)), StructuralError);
  CHECK_THROWS_AS(lu_solve(from_triplets(1, 1, t), Vector::Ones(2)), StructuralError);
  SparseLu lu;
  CHECK_THROWS_AS(lu.solve(Vector::Ones(1)), SolverError);
}

TEST_CASE("symbolic analysis is reused for an unchanged pattern") {
  std::vector<Triplet> t = {{0, 0, 4.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 3.0}};
  SparseLu lu;
  lu.factorize(from_triplets(2, 2, t));
  t[0] = Triplet(0, 0, 5.0);
  lu.factorize(from_triplets(2, 2, t));
  CHECK(lu.analyses() == 1);
  const auto [x, rep] = lu.solve(Vector::Ones(2));
  CHECK(5 * x[0] + x[1] == doctest::Approx(1.0));
  const std::vector<Triplet> diag = {{0, 0, 2.0}, {1, 1, 3.0}};
  lu.factorize(from_triplets(2, 2, diag));
  CHECK(lu.analyses() == 2);
}

TEST_CASE("nested dissection order is a permutation with separators last") {
  std::vector<Eigen::Vector2d> pts;
  const int n = 16;
  for (int j = 0; j <= 2 * n; ++j) {
    for (int i = 0; i <= 2 * n; ++i) pts.emplace_back(i * 0.5 / n, j * 0.5 / n);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  pts.emplace_back(nan, nan);
  const std::vector<int> order = nested_dissection_order(pts, 0.0, 0.0, 1.0 / n, 1.0 / n, n, n);
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> iota(pts.size());
  std::iota(iota.begin(), iota.end(), 0);
  CHECK(sorted == iota);
  CHECK(order.back() == static_cast<int>(pts.size()) - 1);
  // The top-level separator x = 1/2 is eliminated just before the last point.
  const Eigen::Vector2d& before = pts[order[order.size() - 2]];
  CHECK(before.x() == doctest::Approx(0.5));
}

TEST_CASE("ordered and unordered factorizations agree") {
  // 2D Laplacian on a 12x12 grid plus a nonsymmetric perturbation.
  const int m = 12;
  std::vector<Triplet> t;
  std::vector<Eigen::Vector2d> pts;
  auto id = [&](int i, int j) { return j * m + i; };
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      pts.emplace_back((i + 0.5) / m, (j + 0.5) / m);
      t.emplace_back(id(i, j), id(i, j), 4.0);
      if (i > 0) t.emplace_back(id(i, j), id(i - 1, j), -1.2);
      if (i < m - 1) t.emplace_back(id(i, j), id(i + 1, j), -0.8);
      if (j > 0) t.emplace_back(id(i, j), id(i, j - 1), -1.0);
      if (j < m - 1) t.emplace_back(id(i, j), id(i, j + 1), -1.0);
    }
  }
  const SparseMatrix a = from_triplets(m * m, m * m, t);
  const Vector b = Vector::LinSpaced(m * m, -1.0, 1.0);
  const auto order = nested_dissection_order(pts, 0.0, 0.0, 1.0 / m, 1.0 / m, m, m);
  const auto [x0, r0] = lu_solve(a, b);
  const auto [x1, r1] = lu_solve(a, b, order);
  CHECK((x0 - x1).norm() <= 1e-12 * x0.norm());
  std::vector<int> bad(order.begin(), order.end() - 1);
  CHECK_THROWS_AS(lu_solve(a, b, bad), StructuralError);
  bad.push_back(bad.front());
  CHECK_THROWS_AS(lu_solve(a, b, bad), StructuralError);
}
