#include "pdls/fixtures.hpp"

#include <cmath>

#include "pdls/analysis.hpp"

namespace pdls {

Problem oracle2x2() {
  return synthesize_rhs(DenseMatrix::from_rows({{2.0, 0.0}, {0.0, 1.0}}), Vec{1.0, 1.0});
}

Problem random_problem(std::uint64_t seed, std::size_t n_rows, std::size_t n_cols) {
  Rng rng(seed);
  DenseMatrix a(n_rows, n_cols);
  for (std::size_t c = 0; c < n_cols; ++c)
    for (std::size_t r = 0; r < n_rows; ++r) a(r, c) = rng.uniform(-1.0, 1.0);
  Vec x_star(n_cols);
  for (std::size_t i = 0; i < n_cols; ++i) x_star[i] = rng.uniform(-1.0, 1.0);
  return synthesize_rhs(a, x_star);
}

Problem rank_deficient_fixture() {
  DenseMatrix a(4, 3);
  Rng rng(7);
  for (std::size_t r = 0; r < 4; ++r) {
    a(r, 0) = rng.uniform(-1.0, 1.0);
    a(r, 1) = rng.uniform(-1.0, 1.0);
    a(r, 2) = a(r, 0);
  }
  Problem p;
  p.A = a;
  p.b = matvec(a, Vec{1.0, 1.0, 1.0});
  return p;
}

namespace {

// v normalized to a Householder direction; applies H = I - 2 v v^T on both
// sides, preserving symmetry and the spectrum.
void apply_householder_similarity(DenseMatrix& m, const Vec& v) {
  const std::size_t n = m.rows();
  // w = M v
  Vec w = matvec(m, v);
  const double vMv = dot(v, w);
  // M <- M - 2 v w^T - 2 w v^T + 4 (v^T M v) v v^T
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = 0; r < n; ++r)
      m(r, c) += -2.0 * v[r] * w[c] - 2.0 * w[r] * v[c] + 4.0 * vMv * v[r] * v[c];
}

}  // namespace

Problem ill_conditioned(std::size_t n, double top_eigenvalue, double cond_ata,
                        std::uint64_t seed) {
  // Eigenvalues of A log-spaced so cond(A^T A) = cond(A)^2 = cond_ata.
  const double hi = top_eigenvalue;
  const double lo = hi / std::sqrt(cond_ata);
  DenseMatrix a(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(n - 1);
    a(i, i) = lo * std::pow(hi / lo, f);
  }
  Rng rng(seed);
  for (int rep = 0; rep < 3; ++rep) {
    Vec v(n);
    double nrm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = rng.uniform(-1.0, 1.0);
      nrm2 += v[i] * v[i];
    }
    const double inv = 1.0 / std::sqrt(nrm2);
    for (std::size_t i = 0; i < n; ++i) v[i] *= inv;
    apply_householder_similarity(a, v);
  }
  return synthesize_rhs(a, Vec(n, 1.0));
}

Problem ill_conditioned_420(std::uint64_t seed) {
  return ill_conditioned(420, 2511.8, 5.8e7, seed);
}

std::vector<Instance> property_instances(std::uint64_t seed, std::size_t count) {
  std::vector<Instance> out;
  out.reserve(count + 1);
  out.push_back({oracle2x2(), 1.0});
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(seed + 1000003ull * (i + 1));
    const auto n = static_cast<std::size_t>(2 + rng.bits() % 19);  // 2..20
    const auto extra = static_cast<std::size_t>(rng.bits() % (2 * n + 1));
    const std::size_t n_rows = n + extra;
    const double beta = std::pow(10.0, rng.uniform(-1.0, 1.0));
    // skip (deterministically re-seed) in the vanishingly unlikely event
    // of a rank-deficient draw
    for (std::uint64_t attempt = 0;; ++attempt) {
      Problem p = random_problem(seed ^ (0x9e3779b97f4a7c15ull * (i + 1 + attempt)), n_rows, n);
      try {
        spectral_extremes(gram(p.A));
      } catch (const AssumptionViolated&) {
        continue;
      }
      out.push_back({std::move(p), beta});
      break;
    }
  }
  return out;
}

}  // namespace pdls
