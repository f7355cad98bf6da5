#pragma once

#include <cstdint>
#include <vector>

#include "pdls/ingest.hpp"

namespace pdls {

/// Server-side state between rounds: the estimate x(t) and the
/// pre-conditioner K(t-1) it will broadcast next.
struct ServerState {
  Vec x;
  DenseMatrix K;
  std::size_t iteration = 0;
};

/// One agent's upload for a round: the local gradient g^i(t) and the n
/// residual columns R^i_j(t-1), j = 1..n.
struct AgentReply {
  std::size_t agent_id = 0;
  Vec gradient;
  DenseMatrix residuals;
};

/// Multiplication counts for the protocol's named products: the two matrix-vector
/// products per gradient and per residual column, and the server's
/// K(t) * sum-of-gradients product. Scalar stepsize scalings are not
/// counted.
struct FlopCounter {
  std::vector<std::uint64_t> per_agent;
  std::uint64_t server = 0;

  void ensure_agents(std::size_t m) {
    if (per_agent.size() < m) per_agent.resize(m, 0);
  }
  std::uint64_t total() const {
    std::uint64_t t = server;
    for (auto v : per_agent) t += v;
    return t;
  }
};

constexpr std::uint64_t gradient_flops(std::size_t n_i, std::size_t n) {
  return 2ull * n_i * n;
}
constexpr std::uint64_t residual_column_flops(std::size_t n_i, std::size_t n) {
  return 2ull * n_i * n + n;
}
constexpr std::uint64_t residual_all_columns_flops(std::size_t n_i, std::size_t n) {
  return static_cast<std::uint64_t>(n) * residual_column_flops(n_i, n);
}
constexpr std::uint64_t server_xupdate_flops(std::size_t n) {
  return static_cast<std::uint64_t>(n) * n;
}

struct RoundParams {
  double alpha = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  /// Fast mode folds the K update into one Gram-matrix product per round;
  /// mathematically identical, wall-clock only. Flop reporting always
  /// follows the two-matvec accounting.
  bool fast_mode = false;
  /// Worker cap for the per-agent computations; 0 or 1 means sequential.
  /// Replies are reduced in ascending agent order either way, so results
  /// are identical.
  unsigned threads = 0;
};

/// g^i(t) = (A^i)^T (A^i x - b^i), computed as the two matrix-vector
/// products in that order.
Vec agent_gradient(const AgentShard& shard, const Vec& x);

/// R^i_j = ((A^i)^T A^i + (beta/m) I) k_j - (1/m) e_j. Uses the cached
/// Gram matrix when the shard carries one, else the two-matvec path.
Vec agent_residual(const AgentShard& shard, const Vec& k_j, std::size_t j, double beta,
                   std::size_t m);

/// Gradient plus all n residual columns for one agent; adds the agent's
/// per-round flops to the counter.
AgentReply agent_compute_reply(const AgentShard& shard, const Vec& x, const DenseMatrix& k_prev,
                               double beta, std::size_t m, FlopCounter& flops);

/// k_j(t) = k_j(t-1) - alpha * sum_i R^i_j(t-1), agents folded in
/// ascending agent_id order. Throws ProtocolError unless replies carry
/// exactly the ids 0..m-1.
DenseMatrix server_update_K(const DenseMatrix& k_prev, const std::vector<AgentReply>& replies,
                            double alpha);

/// x(t+1) = x(t) - delta * K(t) * sum_i g^i(t); K is the freshly updated
/// K(t).
Vec server_update_x(const Vec& x, const DenseMatrix& k, const std::vector<AgentReply>& replies,
                    double delta, FlopCounter& flops);

/// Context for fast mode, built once per run: H = A^T A + beta I
/// assembled from per-shard Gram matrices in ascending agent order.
struct FastContext {
  DenseMatrix H;
  static FastContext build(const std::vector<AgentShard>& shards, double beta);
};

struct RoundResult {
  ServerState state;
  /// Per-agent uploads; left empty in fast mode, where the aggregate is
  /// formed directly.
  std::vector<AgentReply> replies;
  /// sum_i g^i(t) at the pre-round estimate x(t).
  Vec gradient_sum;
};

/// One synchronous round of the protocol: broadcast, agent computations,
/// K update, then x update. Deterministic for identical inputs.
RoundResult run_round(const ServerState& server, const std::vector<AgentShard>& shards,
                      const RoundParams& params, FlopCounter& flops,
                      const FastContext* fast = nullptr);

}  // namespace pdls
