// Rehearses the benchmark-reproduction code paths (long stride-thinned
// runs, reach_iteration at the stopping crossing, the crossover scan, the
// slow-DGD window) on a 100x100 surrogate whose Gram spectrum has the
// benchmark extremes (lambda = 6.31e6, gamma = 0.109, kappa = 5.8e7).
// The iteration scale is set by the extremes, not by n, so this covers
// the same dynamics at a fraction of the wall clock. Bands are frozen
// regression values from this implementation, not external truths.

#include <doctest.h>

#include "pdls/fixtures.hpp"
#include "pdls/solvers.hpp"

using namespace pdls;

namespace {

Problem surrogate100() { return ill_conditioned(100, 2511.8, 5.8e7, 7); }

}  // namespace

TEST_CASE("stride-thinned long IPG run stops exactly at the tolerance crossing") {
  const Problem p = surrogate100();
  const SpectralInfo s = spectral_extremes(gram(p.A));
  CHECK(s.kappa == doctest::Approx(5.8e7).epsilon(1e-6));

  auto shards = partition(p, 10);
  attach_gram(shards);

  SolverConfig cfg;
  cfg.method = Method::IPG;
  cfg.beta = 5.0;
  cfg.alpha = 1.0 / (s.lambda + cfg.beta);  // no-overshoot schedule
  cfg.delta = optimal_delta_ipg(s, cfg.beta);
  cfg.max_iters = 60000;
  cfg.stop = {StopKind::relative_error, 1e-4};
  cfg.fast_mode = true;
  cfg.record_stride = 100;
  const Trace tr = run_ipg(p, shards, cfg);

  CHECK(tr.stop_reason == "converged");
  CHECK(tr.iterations_run >= 19000);
  CHECK(tr.iterations_run <= 22000);
  // the thinned trace still carries the exact stopping crossing
  const auto reached = reach_iteration(tr, 1e-4);
  REQUIRE(reached.has_value());
  CHECK(*reached == tr.iterations_run);
  CHECK(*tr.records.back().rel_err <= 1e-4);
}

TEST_CASE("DGD at the benchmark step size crawls at this conditioning") {
  const Problem p = surrogate100();
  SolverConfig dgd;
  dgd.method = Method::DGD;
  dgd.delta = 3.17e-7;
  dgd.max_iters = 30000;
  dgd.stop = {StopKind::relative_error, 1e-4};
  dgd.record_stride = 500;
  const Trace tr = run_dgd(p, partition(p, 10), dgd);
  CHECK(tr.stop_reason == "iteration_cap");
  CHECK_FALSE(reach_iteration(tr, 1e-4).has_value());
  CHECK(*tr.records.back().rel_err > 0.5);
}

TEST_CASE("crossover scan on aligned long traces") {
  const Problem p = surrogate100();
  const SpectralInfo s = spectral_extremes(gram(p.A));
  auto shards = partition(p, 10);
  attach_gram(shards);

  SolverConfig ipg;
  ipg.method = Method::IPG;
  ipg.beta = 5.0;
  ipg.alpha = 1.0 / (s.lambda + ipg.beta);
  ipg.delta = optimal_delta_ipg(s, ipg.beta);
  ipg.max_iters = 4000;
  ipg.stop = {StopKind::iteration_cap, 0.0};
  ipg.fast_mode = true;
  const Trace a = run_ipg(p, shards, ipg);

  SolverConfig dgd;
  dgd.method = Method::DGD;
  dgd.delta = 3.17e-7;
  dgd.max_iters = 4000;
  dgd.stop = {StopKind::iteration_cap, 0.0};
  const Trace b = run_dgd(p, partition(p, 10), dgd);

  REQUIRE(a.records.size() == b.records.size());
  std::optional<std::size_t> crossover;
  for (std::size_t k = a.records.size(); k-- > 0;) {
    if (*a.records[k].err_norm < *b.records[k].err_norm)
      crossover = a.records[k].t;
    else
      break;
  }
  // without an overshoot transient the pre-conditioned run leads almost
  // immediately and stays ahead through the horizon
  REQUIRE(crossover.has_value());
  CHECK(*crossover <= 50);
}
