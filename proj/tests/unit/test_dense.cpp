#include <doctest.h>

#include <cmath>

#include "pdls/dense.hpp"
#include "pdls/fixtures.hpp"
#include "pdls/ingest.hpp"

using namespace pdls;

namespace {

DenseMatrix random_matrix(std::uint64_t seed, std::size_t r, std::size_t c) {
  Rng rng(seed);
  DenseMatrix m(r, c);
  for (std::size_t j = 0; j < c; ++j)
    for (std::size_t i = 0; i < r; ++i) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

}  // namespace

TEST_CASE("matvec basics") {
  const DenseMatrix diag = DenseMatrix::from_rows({{2, 0}, {0, 1}});
  CHECK(matvec(diag, Vec{1, 1}) == Vec{2, 1});
  CHECK(matvec(DenseMatrix::identity(3), Vec{4, 5, 6}) == Vec{4, 5, 6});
  // hand expansion of the row sums
  CHECK(matvec(DenseMatrix::from_rows({{1, 2}, {3, 4}}), Vec{1, 1}) == Vec{3, 7});
  CHECK_THROWS_AS(matvec(diag, Vec{1, 2, 3}), DimensionError);
}

TEST_CASE("transpose_matvec basics and transpose oracle") {
  const DenseMatrix diag = DenseMatrix::from_rows({{2, 0}, {0, 1}});
  CHECK(transpose_matvec(diag, Vec{2, 1}) == Vec{4, 1});
  CHECK(transpose_matvec(DenseMatrix::from_rows({{1, 2}, {3, 4}}), Vec{1, 0}) == Vec{1, 2});
  CHECK_THROWS_AS(transpose_matvec(diag, Vec{1, 2, 3}), DimensionError);

  const DenseMatrix m = random_matrix(11, 5, 3);
  Rng rng(12);
  Vec v(5);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  const Vec via_transpose = matvec(transpose(m), v);
  const Vec direct = transpose_matvec(m, v);
  CHECK(max_abs_diff(direct, via_transpose) <= 1e-15);
}

TEST_CASE("matmul basics") {
  const DenseMatrix m = random_matrix(21, 4, 4);
  CHECK(matmul(DenseMatrix::identity(4), m) == m);

  const DenseMatrix d1 = DenseMatrix::from_rows({{4, 0}, {0, 1}});
  const DenseMatrix d2 = DenseMatrix::from_rows({{0.2, 0}, {0, 0.5}});
  const DenseMatrix prod = matmul(d1, d2);
  CHECK(prod(0, 0) == doctest::Approx(0.8));
  CHECK(prod(1, 1) == doctest::Approx(0.5));
  CHECK(prod(0, 1) == 0.0);

  // rank-one expansion: (e1 e2^T)(e2 e1^T) = e1 e1^T
  const DenseMatrix e12 = DenseMatrix::from_rows({{0, 1}, {0, 0}});
  const DenseMatrix e21 = DenseMatrix::from_rows({{0, 0}, {1, 0}});
  CHECK(matmul(e12, e21) == DenseMatrix::from_rows({{1, 0}, {0, 0}}));

  CHECK_THROWS_AS(matmul(random_matrix(1, 2, 3), random_matrix(2, 2, 3)), DimensionError);
}

TEST_CASE("matmul is blocked but keeps the ascending summation order") {
  const DenseMatrix a = random_matrix(31, 9, 7);
  const DenseMatrix b = random_matrix(32, 7, 11);
  const DenseMatrix fast = matmul(a, b);
  DenseMatrix naive(9, 11, 0.0);
  for (std::size_t j = 0; j < 11; ++j)
    for (std::size_t r = 0; r < 9; ++r) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 7; ++k) acc += a(r, k) * b(k, j);
      naive(r, j) = acc;
    }
  CHECK(fast == naive);  // bitwise
}

TEST_CASE("sym_eig diagonal and hand-computed 2x2") {
  const auto d = sym_eig(DenseMatrix::from_rows({{4, 0}, {0, 1}}));
  CHECK(d.values[0] == doctest::Approx(1.0));
  CHECK(d.values[1] == doctest::Approx(4.0));

  // characteristic polynomial of [[2,1],[1,2]]: (2-x)^2 - 1 -> x in {1,3}
  const auto e = sym_eig(DenseMatrix::from_rows({{2, 1}, {1, 2}}));
  CHECK(e.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.values[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("sym_eig invariants on random symmetric matrices") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const DenseMatrix s = gram(random_matrix(seed, 12, 8));
    const auto eig = sym_eig(s);
    const double fro = frobenius_norm(s);
    // ascending
    for (std::size_t k = 1; k < eig.values.size(); ++k)
      CHECK(eig.values[k] >= eig.values[k - 1]);
    // residual per pair
    for (std::size_t k = 0; k < eig.values.size(); ++k) {
      const Vec v = eig.vectors.col_copy(k);
      const Vec resid = sub(matvec(s, v), scaled(v, eig.values[k]));
      CHECK(norm2(resid) <= 1e-8 * fro);
    }
    // orthonormal columns
    const DenseMatrix vtv = matmul(transpose(eig.vectors), eig.vectors);
    CHECK(max_abs_diff(vtv, DenseMatrix::identity(8)) <= 1e-10);
  }
}

TEST_CASE("sym_eig on graded and clustered spectra") {
  // graded: eigenvalues spanning ten decades, rotated by Householders;
  // Jacobi should recover the small end with high relative accuracy
  const std::size_t n = 24;
  DenseMatrix graded(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    graded(i, i) = std::pow(10.0, -10.0 + 10.0 * double(i) / double(n - 1));
  Rng rng(99);
  for (int rep = 0; rep < 2; ++rep) {
    Vec v(n);
    double s2 = 0.0;
    for (auto& x : v) {
      x = rng.uniform(-1.0, 1.0);
      s2 += x * x;
    }
    for (auto& x : v) x /= std::sqrt(s2);
    Vec w = matvec(graded, v);
    const double vmv = dot(v, w);
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t r = 0; r < n; ++r)
        graded(r, c) += -2.0 * v[r] * w[c] - 2.0 * w[r] * v[c] + 4.0 * vmv * v[r] * v[c];
  }
  const auto ge = sym_eig(graded);
  CHECK(ge.values.front() == doctest::Approx(1e-10).epsilon(1e-6));
  CHECK(ge.values.back() == doctest::Approx(1.0).epsilon(1e-10));

  // clustered: a triple eigenvalue among separated ones
  DenseMatrix clustered = DenseMatrix::from_rows({{2, 0, 0, 0, 0},
                                                  {0, 2, 0, 0, 0},
                                                  {0, 0, 2, 0, 0},
                                                  {0, 0, 0, 7, 0},
                                                  {0, 0, 0, 0, 1}});
  Vec u{0.5, 0.5, 0.5, 0.5, 0.0};
  Vec w = matvec(clustered, u);
  const double umu = dot(u, w);
  for (std::size_t c = 0; c < 5; ++c)
    for (std::size_t r = 0; r < 5; ++r)
      clustered(r, c) += -2.0 * u[r] * w[c] - 2.0 * w[r] * u[c] + 4.0 * umu * u[r] * u[c];
  const auto ce = sym_eig(clustered);
  CHECK(ce.values[0] == doctest::Approx(1.0));
  CHECK(ce.values[1] == doctest::Approx(2.0));
  CHECK(ce.values[2] == doctest::Approx(2.0));
  CHECK(ce.values[3] == doctest::Approx(2.0));
  CHECK(ce.values[4] == doctest::Approx(7.0));
  const DenseMatrix vtv = matmul(transpose(ce.vectors), ce.vectors);
  CHECK(max_abs_diff(vtv, DenseMatrix::identity(5)) <= 1e-10);
}

TEST_CASE("sym_eig handles the zero matrix and 1x1 input") {
  const auto z = sym_eig(DenseMatrix(3, 3, 0.0));
  CHECK(z.values == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(z.vectors == DenseMatrix::identity(3));
  const auto one = sym_eig(DenseMatrix::from_rows({{-4.5}}));
  CHECK(one.values == std::vector<double>{-4.5});
}

TEST_CASE("sym_eig rejects bad input") {
  CHECK_THROWS_AS(sym_eig(random_matrix(5, 3, 2)), DimensionError);
  CHECK_THROWS_AS(sym_eig(DenseMatrix::from_rows({{1, 2}, {3, 4}})), InvalidArgument);
}

TEST_CASE("solve_spd examples") {
  const DenseMatrix inv = solve_spd(DenseMatrix::from_rows({{5, 0}, {0, 2}}),
                                    DenseMatrix::identity(2));
  CHECK(inv(0, 0) == doctest::Approx(0.2));
  CHECK(inv(1, 1) == doctest::Approx(0.5));

  const Vec b{3, -1, 2};
  CHECK(solve_spd(DenseMatrix::identity(3), b) == b);

  CHECK_THROWS_AS(solve_spd(DenseMatrix::from_rows({{1, 0}, {0, -1}}), DenseMatrix::identity(2)),
                  NotPositiveDefinite);
}

TEST_CASE("solve_spd residual on random SPD") {
  for (std::uint64_t seed : {4ull, 5ull}) {
    const DenseMatrix s = add_scaled_identity(gram(random_matrix(seed, 10, 10)), 1.0);
    const DenseMatrix x = solve_spd(s, DenseMatrix::identity(10));
    const DenseMatrix resid = sub(matmul(s, x), DenseMatrix::identity(10));
    CHECK(frobenius_norm(resid) <= 1e-8 * frobenius_norm(s));
  }
}

TEST_CASE("norms") {
  CHECK(norm2(Vec{3, 4}) == doctest::Approx(5.0));
  CHECK(frobenius_norm(DenseMatrix::identity(2)) == doctest::Approx(std::sqrt(2.0)));
  const DenseMatrix kstar = DenseMatrix::from_rows({{0.2, 0}, {0, 0.5}});
  CHECK(frobenius_norm(kstar) == doctest::Approx(std::sqrt(0.29)));
  CHECK(frobenius_norm(kstar) == doctest::Approx(0.538516).epsilon(1e-6));
}

TEST_CASE("eigenvalue shift property") {
  for (std::uint64_t seed : {6ull, 7ull}) {
    const DenseMatrix s = gram(random_matrix(seed, 9, 6));
    const double beta = 0.75;
    const auto base = sym_eig(s);
    const auto shifted = sym_eig(add_scaled_identity(s, beta));
    for (std::size_t k = 0; k < 6; ++k)
      CHECK(shifted.values[k] ==
            doctest::Approx(base.values[k] + beta).epsilon(1e-8));
  }
}

TEST_CASE("operations are deterministic across reruns") {
  const DenseMatrix a = random_matrix(8, 6, 6);
  const DenseMatrix b = random_matrix(9, 6, 6);
  Rng rng(10);
  Vec v(6);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  CHECK(matvec(a, v) == matvec(a, v));
  CHECK(transpose_matvec(a, v) == transpose_matvec(a, v));
  CHECK(matmul(a, b) == matmul(a, b));
  CHECK(sym_eig(gram(a)).values == sym_eig(gram(a)).values);
}

TEST_CASE("outputs stay finite") {
  const DenseMatrix s = gram(random_matrix(13, 8, 5));
  CHECK(all_finite(s));
  CHECK(all_finite(sym_eig(s).vectors));
  CHECK(all_finite(solve_spd(add_scaled_identity(s, 1.0), DenseMatrix::identity(5))));
}
