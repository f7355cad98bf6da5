#include "pdls/solvers.hpp"

#include <cmath>

namespace pdls {

namespace {

constexpr double kDivergenceFactor = 1e12;

void validate_common(const SolverConfig& cfg) {
  if (cfg.max_iters < 1) throw InvalidArgument("solver: max_iters must be >= 1");
  if (cfg.delta < 0.0) throw InvalidArgument("solver: delta must be nonnegative");
  if (cfg.record_stride < 1) throw InvalidArgument("solver: record_stride must be >= 1");
  if (cfg.stop.kind != StopKind::iteration_cap && !(cfg.stop.tolerance > 0.0))
    throw InvalidArgument("solver: stopping tolerance must be positive");
}

Vec initial_x(const SolverConfig& cfg, std::size_t n) {
  if (cfg.x0.empty()) return Vec(n, 0.0);
  if (cfg.x0.size() != n) throw DimensionError("solver: x0 has wrong length");
  return cfg.x0;
}

struct ErrTracker {
  const Vec* x_star;
  double x_star_norm = 0.0;

  explicit ErrTracker(const Problem& p) : x_star(p.x_star ? &*p.x_star : nullptr) {
    if (x_star) x_star_norm = norm2(*x_star);
  }
  std::optional<double> err(const Vec& x) const {
    if (!x_star) return std::nullopt;
    return norm2(sub(x, *x_star));
  }
  std::optional<double> rel(std::optional<double> e) const {
    if (!e || x_star_norm == 0.0) return std::nullopt;
    return *e / x_star_norm;
  }
};

bool stop_hit(const StoppingRule& stop, const std::optional<double>& rel_err, double grad_norm,
              bool has_x_star) {
  switch (stop.kind) {
    case StopKind::relative_error:
      if (!has_x_star)
        throw InvalidArgument("solver: relative_error stopping rule needs a known x*");
      return rel_err && *rel_err <= stop.tolerance;
    case StopKind::gradient_norm:
      return grad_norm <= stop.tolerance;
    case StopKind::iteration_cap:
      return false;
  }
  return false;
}

}  // namespace

Trace run_dgd(const Problem& p, const std::vector<AgentShard>& shards, const SolverConfig& cfg) {
  if (cfg.method != Method::DGD) throw InvalidArgument("run_dgd: config.method must be DGD");
  validate_common(cfg);
  if (shards.empty()) throw ProtocolError("run_dgd: no agents");

  const std::size_t n = p.A.cols();
  const std::size_t m = shards.size();
  Trace trace;
  trace.flops.ensure_agents(m);
  ErrTracker err(p);

  Vec x = initial_x(cfg, n);
  const double diverge_limit = kDivergenceFactor * (1.0 + norm2(x));
  bool diverged = false;

  std::size_t t = 0;
  for (;; ++t) {
    // agent pass at x(t)
    const std::uint64_t flops_before = trace.flops.total();
    Vec g_sum(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      Vec g = agent_gradient(shards[i], x);
      for (std::size_t k = 0; k < n; ++k) g_sum[k] += g[k];
      trace.flops.per_agent[i] += gradient_flops(shards[i].A_i.rows(), n);
    }
    const double grad_norm = norm2(g_sum);
    const auto e = err.err(x);
    const auto rel = err.rel(e);

    const bool record = (t % cfg.record_stride) == 0;
    const bool stopping = diverged || t == cfg.max_iters ||
                          stop_hit(cfg.stop, rel, grad_norm, p.x_star.has_value());
    if (record || stopping)
      trace.records.push_back({t, e, rel, grad_norm, flops_before, std::nullopt});
    if (stopping) {
      trace.stop_reason = diverged ? "diverged" : (t == cfg.max_iters ? "iteration_cap" : "converged");
      break;
    }

    for (std::size_t k = 0; k < n; ++k) x[k] -= cfg.delta * g_sum[k];
    if (norm2(x) > diverge_limit) diverged = true;
  }

  trace.iterations_run = t;
  trace.final_state.x = std::move(x);
  trace.final_state.iteration = t;
  return trace;
}

Trace run_ipg(const Problem& p, const std::vector<AgentShard>& shards, const SolverConfig& cfg) {
  if (cfg.method != Method::IPG) throw InvalidArgument("run_ipg: config.method must be IPG");
  validate_common(cfg);
  if (shards.empty()) throw ProtocolError("run_ipg: no agents");
  if (!(cfg.beta > 0.0)) throw InvalidArgument("run_ipg: beta must be positive");
  if (cfg.alpha < 0.0) throw InvalidArgument("run_ipg: alpha must be nonnegative");

  const std::size_t n = p.A.cols();
  Trace trace;
  trace.flops.ensure_agents(shards.size());
  ErrTracker err(p);

  ServerState state;
  state.x = initial_x(cfg, n);
  if (cfg.K_init.empty()) {
    state.K = DenseMatrix(n, n, 0.0);
  } else {
    if (cfg.K_init.rows() != n || cfg.K_init.cols() != n)
      throw DimensionError("run_ipg: K_init must be n x n");
    state.K = cfg.K_init;
  }

  RoundParams params;
  params.alpha = cfg.alpha;
  params.delta = cfg.delta;
  params.beta = cfg.beta;
  params.fast_mode = cfg.fast_mode;
  params.threads = cfg.threads;

  std::optional<FastContext> fast;
  if (cfg.fast_mode) fast = FastContext::build(shards, cfg.beta);

  std::optional<DenseMatrix> k_star;
  if (cfg.with_k_oracle) k_star = kstar_oracle(sum_of_grams(shards), cfg.beta);

  const double diverge_limit = kDivergenceFactor * (1.0 + norm2(state.x));
  bool diverged = false;

  std::size_t t = 0;
  for (;; ++t) {
    const std::uint64_t flops_before = trace.flops.total();
    RoundResult round = run_round(state, shards, params, trace.flops, fast ? &*fast : nullptr);
    const double grad_norm = norm2(round.gradient_sum);
    const auto e = err.err(state.x);
    const auto rel = err.rel(e);

    const bool record = (t % cfg.record_stride) == 0;
    const bool stopping = diverged || t == cfg.max_iters ||
                          stop_hit(cfg.stop, rel, grad_norm, p.x_star.has_value());
    if (record || stopping) {
      TraceRecord rec{t, e, rel, grad_norm, flops_before, std::nullopt};
      if (k_star) rec.k_err = frobenius_norm(sub(state.K, *k_star));
      trace.records.push_back(std::move(rec));
    }
    if (stopping) {
      trace.stop_reason = diverged ? "diverged" : (t == cfg.max_iters ? "iteration_cap" : "converged");
      break;
    }

    state = std::move(round.state);
    if (norm2(state.x) > diverge_limit) diverged = true;
  }

  trace.iterations_run = t;
  trace.final_state = std::move(state);
  trace.final_state.iteration = t;
  return trace;
}

std::optional<std::size_t> reach_iteration(const Trace& trace, double tolerance) {
  bool any = false;
  for (const auto& rec : trace.records) {
    if (!rec.rel_err) continue;
    any = true;
    if (*rec.rel_err <= tolerance) return rec.t;
  }
  if (!any) throw InvalidArgument("reach_iteration: trace has no relative-error records");
  return std::nullopt;
}

}  // namespace pdls
