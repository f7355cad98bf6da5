#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdls/analysis.hpp"
#include "pdls/federated.hpp"

namespace pdls {

enum class Method { IPG, DGD };

enum class StopKind { relative_error, gradient_norm, iteration_cap };

/// relative_error needs Problem.x_star; gradient_norm stops on
/// ||sum_i g^i(t)||; iteration_cap just runs max_iters rounds.
struct StoppingRule {
  StopKind kind = StopKind::iteration_cap;
  double tolerance = 0.0;
};

struct SolverConfig {
  Method method = Method::IPG;
  double alpha = 0.0;  // IPG only; alpha == 0 freezes K (DGD-equivalence)
  double delta = 0.0;
  double beta = 0.0;  // IPG only, must be > 0
  std::size_t max_iters = 1000;
  StoppingRule stop;
  /// Empty x0 / K_init mean x(0) = 0 and K(-1) = 0, the defaults used in
  /// the experiments; both are overridable.
  Vec x0;
  DenseMatrix K_init;
  std::size_t record_stride = 1;
  bool fast_mode = false;
  unsigned threads = 0;
  /// Record ||K(t-1) - K*||_F per iteration (IPG; costs one solve upfront).
  bool with_k_oracle = false;
};

/// One recorded iteration. err_norm/rel_err are present when x* is known;
/// flops is the cumulative counter at the moment x(t) became current, so
/// the t=0 record reads 0.
struct TraceRecord {
  std::size_t t = 0;
  std::optional<double> err_norm;
  std::optional<double> rel_err;
  double grad_norm = 0.0;
  std::uint64_t flops = 0;
  std::optional<double> k_err;
};

struct Trace {
  std::vector<TraceRecord> records;
  ServerState final_state;
  std::size_t iterations_run = 0;
  std::string stop_reason;  // "converged" | "iteration_cap" | "diverged"
  FlopCounter flops;
};

/// Plain distributed gradient descent, x(t+1) = x(t) - delta sum_i g^i(t).
Trace run_dgd(const Problem& p, const std::vector<AgentShard>& shards, const SolverConfig& cfg);

/// Algorithm rounds with the iteratively updated pre-conditioner.
Trace run_ipg(const Problem& p, const std::vector<AgentShard>& shards, const SolverConfig& cfg);

/// Smallest recorded t with rel_err <= tolerance; nullopt when never
/// reached. Throws when the trace has no relative-error records.
std::optional<std::size_t> reach_iteration(const Trace& trace, double tolerance);

}  // namespace pdls
