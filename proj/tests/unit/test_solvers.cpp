#include <doctest.h>

#include <cmath>

#include "pdls/fixtures.hpp"
#include "pdls/solvers.hpp"

using namespace pdls;

namespace {

SolverConfig oracle_ipg_config() {
  SolverConfig cfg;
  cfg.method = Method::IPG;
  cfg.beta = 1.0;
  cfg.alpha = 2.0 / 7.0;
  cfg.delta = 20.0 / 13.0;
  cfg.max_iters = 200;
  cfg.stop = {StopKind::relative_error, 1e-8};
  return cfg;
}

}  // namespace

TEST_CASE("DGD on the oracle contracts by exactly rho_gd per step") {
  const Problem p = oracle2x2();
  SolverConfig cfg;
  cfg.method = Method::DGD;
  cfg.delta = 0.4;  // 2/(lambda+gamma)
  cfg.max_iters = 30;
  const Trace tr = run_dgd(p, partition(p, 1), cfg);
  REQUIRE(tr.records.size() == 31);
  for (std::size_t k = 1; k < tr.records.size(); ++k) {
    const double prev = *tr.records[k - 1].err_norm;
    const double next = *tr.records[k].err_norm;
    if (prev <= 1e-6 * (*tr.records[0].err_norm)) break;
    CHECK(next / prev == doctest::Approx(0.6).epsilon(1e-9));
  }
}

TEST_CASE("DGD with delta = 0 freezes x and stops at the cap") {
  const Problem p = oracle2x2();
  SolverConfig cfg;
  cfg.method = Method::DGD;
  cfg.delta = 0.0;
  cfg.max_iters = 5;
  cfg.x0 = Vec{0.3, -0.2};
  const Trace tr = run_dgd(p, partition(p, 1), cfg);
  CHECK(tr.stop_reason == "iteration_cap");
  CHECK(tr.iterations_run == 5);
  CHECK(tr.final_state.x == Vec{0.3, -0.2});
}

TEST_CASE("IPG on the oracle converges below 1e-8 within 200 iterations") {
  const Problem p = oracle2x2();
  const Trace tr = run_ipg(p, partition(p, 1), oracle_ipg_config());
  CHECK(tr.stop_reason == "converged");
  CHECK(tr.iterations_run <= 200);
  CHECK(*tr.records.back().rel_err <= 1e-8);
  CHECK(max_abs_diff(tr.final_state.x, Vec{1, 1}) <= 1e-8 * std::sqrt(2.0));
}

TEST_CASE("IPG started at K(-1) = K* contracts at rho*_beta from t = 0") {
  const Problem p = oracle2x2();
  SolverConfig cfg = oracle_ipg_config();
  cfg.stop = {StopKind::iteration_cap, 0.0};
  cfg.max_iters = 25;
  cfg.K_init = kstar_oracle(gram(p.A), cfg.beta);  // sigma_0 = 0
  const Trace tr = run_ipg(p, partition(p, 1), cfg);
  const double rho_beta = 3.0 / 13.0;
  for (std::size_t k = 1; k < tr.records.size(); ++k) {
    const double prev = *tr.records[k - 1].err_norm;
    const double next = *tr.records[k].err_norm;
    if (prev <= 1e-6 * (*tr.records[0].err_norm)) break;
    CHECK(next / prev == doctest::Approx(rho_beta).epsilon(1e-9));
  }
}

TEST_CASE("error norm decreases monotonically from t = 1 with optimal parameters") {
  const Problem p = oracle2x2();
  SolverConfig cfg = oracle_ipg_config();
  cfg.stop = {StopKind::iteration_cap, 0.0};
  cfg.max_iters = 40;
  const Trace tr = run_ipg(p, partition(p, 1), cfg);
  for (std::size_t k = 2; k < tr.records.size(); ++k) {
    const double prev = *tr.records[k - 1].err_norm;
    const double next = *tr.records[k].err_norm;
    if (prev <= 1e-13 * (*tr.records[0].err_norm)) break;
    CHECK(next < prev);
  }
}

TEST_CASE("divergence guard") {
  const Problem p = oracle2x2();
  SolverConfig cfg;
  cfg.method = Method::DGD;
  cfg.delta = 10.0;  // way past 2/lambda
  cfg.max_iters = 100000;
  const Trace tr = run_dgd(p, partition(p, 1), cfg);
  CHECK(tr.stop_reason == "diverged");
  CHECK(tr.iterations_run < 100000);

  SolverConfig ipg = oracle_ipg_config();
  ipg.stop = {StopKind::iteration_cap, 0.0};
  ipg.alpha = 3.0;  // outside (0, 2/(lambda+beta))
  ipg.max_iters = 100000;
  const Trace tr2 = run_ipg(p, partition(p, 1), ipg);
  CHECK(tr2.stop_reason == "diverged");
}

TEST_CASE("gradient_norm stopping rule") {
  const Problem p = oracle2x2();
  SolverConfig cfg = oracle_ipg_config();
  cfg.stop = {StopKind::gradient_norm, 1e-10};
  const Trace tr = run_ipg(p, partition(p, 1), cfg);
  CHECK(tr.stop_reason == "converged");
  CHECK(tr.records.back().grad_norm <= 1e-10);
}

TEST_CASE("relative_error stopping needs a known x*") {
  Problem p = oracle2x2();
  p.x_star.reset();
  SolverConfig cfg = oracle_ipg_config();
  CHECK_THROWS_AS(run_ipg(p, partition(p, 1), cfg), InvalidArgument);
}

TEST_CASE("reach_iteration") {
  // already at x* at t = 0
  Problem p = oracle2x2();
  SolverConfig cfg = oracle_ipg_config();
  cfg.x0 = *p.x_star;
  cfg.stop = {StopKind::relative_error, 1e-6};
  const Trace tr = run_ipg(p, partition(p, 1), cfg);
  CHECK(reach_iteration(tr, 1e-6) == 0);
  CHECK(tr.iterations_run == 0);

  // first-crossing definition on a hand-made monotone trace
  Trace hand;
  for (std::size_t t = 0; t <= 10; ++t) {
    TraceRecord r;
    r.t = t;
    r.rel_err = t < 8 ? 0.5 : 1e-5;  // crosses between 7 and 8
    hand.records.push_back(r);
  }
  CHECK(reach_iteration(hand, 1e-4) == 8);
  CHECK_FALSE(reach_iteration(hand, 1e-9).has_value());

  Trace no_err;
  no_err.records.push_back({});
  CHECK_THROWS_AS(reach_iteration(no_err, 1e-4), InvalidArgument);
}

TEST_CASE("run_ipg with alpha=0 and K=I reproduces run_dgd bit for bit") {
  const Problem p = random_problem(77, 28, 6);
  const auto shards = partition(p, 4);

  SolverConfig dgd;
  dgd.method = Method::DGD;
  dgd.delta = 0.01;
  dgd.max_iters = 120;
  const Trace a = run_dgd(p, shards, dgd);

  SolverConfig ipg = dgd;
  ipg.method = Method::IPG;
  ipg.alpha = 0.0;
  ipg.beta = 2.5;  // irrelevant once alpha = 0, K = I
  ipg.K_init = DenseMatrix::identity(6);
  const Trace b = run_ipg(p, shards, ipg);

  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    CHECK(*a.records[k].err_norm == *b.records[k].err_norm);
    CHECK(a.records[k].grad_norm == b.records[k].grad_norm);
  }
  CHECK(a.final_state.x == b.final_state.x);
  CHECK(a.stop_reason == b.stop_reason);
}

TEST_CASE("trace record bookkeeping") {
  const Problem p = oracle2x2();
  SolverConfig cfg = oracle_ipg_config();
  cfg.stop = {StopKind::iteration_cap, 0.0};
  cfg.max_iters = 17;
  const Trace tr = run_ipg(p, partition(p, 1), cfg);
  // stride 1: one record per iteration including t = 0
  CHECK(tr.records.size() == tr.iterations_run + 1);
  CHECK(tr.records.front().t == 0);
  CHECK(tr.records.front().flops == 0);
  CHECK(tr.records.back().t == 17);
  for (std::size_t k = 1; k < tr.records.size(); ++k)
    CHECK(tr.records[k].flops > tr.records[k - 1].flops);

  // stride thins the middle but keeps t=0 and the final row
  SolverConfig thin = cfg;
  thin.record_stride = 5;
  const Trace tt = run_ipg(p, partition(p, 1), thin);
  REQUIRE(tt.records.size() == 5);  // t = 0,5,10,15,17
  CHECK(tt.records.back().t == 17);
  CHECK(tt.records.front().t == 0);
}

TEST_CASE("k_err oracle records decay to zero") {
  const Problem p = oracle2x2();
  SolverConfig cfg = oracle_ipg_config();
  cfg.stop = {StopKind::iteration_cap, 0.0};
  cfg.max_iters = 60;
  cfg.with_k_oracle = true;
  const Trace tr = run_ipg(p, partition(p, 1), cfg);
  REQUIRE(tr.records.front().k_err.has_value());
  // row t holds ||K(t-1) - K*||_F; starts at ||K*||_F and contracts by rho*_K
  CHECK(*tr.records.front().k_err == doctest::Approx(std::sqrt(0.29)));
  const double rho_k = 3.0 / 7.0;
  for (std::size_t k = 1; k < tr.records.size(); ++k) {
    const double prev = *tr.records[k - 1].k_err;
    const double next = *tr.records[k].k_err;
    if (prev <= 1e-6 * std::sqrt(0.29)) break;
    CHECK(next <= prev * rho_k * (1.0 + 1e-8));
  }
}

TEST_CASE("fast mode matches the strict protocol on a longer run") {
  const Problem p = random_problem(55, 40, 8);
  const SpectralInfo s = spectral_extremes(gram(p.A));
  auto shards = partition(p, 5);

  SolverConfig cfg;
  cfg.method = Method::IPG;
  cfg.beta = 2.0;
  cfg.alpha = optimal_alpha(s, cfg.beta);
  cfg.delta = optimal_delta_ipg(s, cfg.beta);
  cfg.max_iters = 200;
  cfg.stop = {StopKind::iteration_cap, 0.0};
  const Trace slow = run_ipg(p, shards, cfg);

  cfg.fast_mode = true;
  auto cached = shards;
  attach_gram(cached);
  const Trace fast = run_ipg(p, cached, cfg);

  REQUIRE(slow.records.size() == fast.records.size());
  for (std::size_t k = 0; k < slow.records.size(); ++k) {
    const double a = *slow.records[k].err_norm;
    const double b = *fast.records[k].err_norm;
    CHECK(std::abs(a - b) <= 1e-10 * std::max({std::abs(a), std::abs(b), 1e-30}) + 1e-13);
  }
}
