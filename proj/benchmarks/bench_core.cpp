#include <benchmark/benchmark.h>

#include "pdls/fixtures.hpp"
#include "pdls/solvers.hpp"

using namespace pdls;

namespace {

DenseMatrix random_square(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  DenseMatrix m(n, n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = 0; r < n; ++r) m(r, c) = rng.uniform(-1.0, 1.0);
  return m;
}

void bm_matvec(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DenseMatrix m = random_square(1, n);
  Rng rng(2);
  Vec v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(matvec(m, v));
  state.SetItemsProcessed(state.iterations() * n * n);
}

void bm_matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DenseMatrix a = random_square(3, n);
  const DenseMatrix b = random_square(4, n);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
  state.SetItemsProcessed(state.iterations() * n * n * n);
}

void bm_sym_eig(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DenseMatrix s = gram(random_square(5, n));
  for (auto _ : state) benchmark::DoNotOptimize(sym_eig(s));
}

void bm_cholesky_inverse(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DenseMatrix s = add_scaled_identity(gram(random_square(6, n)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_spd(s, DenseMatrix::identity(n)));
}

// One protocol round at bcsstm07 scale (420x420, m = 10).
void bm_round(benchmark::State& state) {
  const bool fast = state.range(0) != 0;
  const Problem p = ill_conditioned_420();
  auto shards = partition(p, 10);
  attach_gram(shards);
  const SpectralInfo s = spectral_extremes(gram(p.A));
  RoundParams params;
  params.beta = 5.0;
  params.alpha = optimal_alpha(s, params.beta);
  params.delta = optimal_delta_ipg(s, params.beta);
  params.fast_mode = fast;
  const FastContext ctx = FastContext::build(shards, params.beta);

  ServerState st{Vec(420, 0.0), DenseMatrix(420, 420, 0.0), 0};
  FlopCounter flops;
  for (auto _ : state) {
    auto out = run_round(st, shards, params, flops, fast ? &ctx : nullptr);
    benchmark::DoNotOptimize(out.state.x.data());
    st = std::move(out.state);
  }
}

}  // namespace

BENCHMARK(bm_matvec)->Arg(128)->Arg(420);
BENCHMARK(bm_matmul)->Arg(128)->Arg(420)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_sym_eig)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_cholesky_inverse)->Arg(128)->Arg(420)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_round)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
