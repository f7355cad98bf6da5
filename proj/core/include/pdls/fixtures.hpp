#pragma once

#include <cstdint>
#include <random>

#include "pdls/ingest.hpp"

namespace pdls {

/// Seeded generator with a platform-independent uniform double, so
/// fixtures are identical everywhere (std distributions are not portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// A = [[2,0],[0,1]], x* = (1,1), b = (2,1). A^T A = diag(4,1), so with
/// beta = 1: K* = diag(1/5, 1/2), rho_gd = 0.6, rho*_K = 3/7,
/// rho*_beta = 3/13. Every hand-checked expectation in the tests comes
/// from this instance.
Problem oracle2x2();

/// Dense A with uniform[-1,1) entries and a synthesized right-hand side.
Problem random_problem(std::uint64_t seed, std::size_t n_rows, std::size_t n_cols);

/// 3-column problem whose third column duplicates the first; A^T A is
/// rank deficient.
Problem rank_deficient_fixture();

/// Symmetric positive definite n x n instance built from Householder
/// reflections around a log-spaced spectrum: the eigenvalues of A run
/// from top_eigenvalue down so that cond(A^T A) = cond_ata. x* = ones.
Problem ill_conditioned(std::size_t n, double top_eigenvalue, double cond_ata,
                        std::uint64_t seed);

/// The 420x420 instance with cond(A^T A) = 5.8e7 and the benchmark-like
/// top eigenvalue 2511.8. Scale-testing stand-in; not the benchmark
/// matrix.
Problem ill_conditioned_420(std::uint64_t seed = 420);

/// One property-suite instance: a full-column-rank problem plus a beta.
struct Instance {
  Problem problem;
  double beta = 1.0;
};

/// The 2x2 oracle followed by `count` seeded random instances with
/// n <= 20 and beta log-uniform in [0.1, 10].
std::vector<Instance> property_instances(std::uint64_t seed, std::size_t count);

}  // namespace pdls
