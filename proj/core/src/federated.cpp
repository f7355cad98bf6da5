#include "pdls/federated.hpp"

#include <atomic>
#include <string>
#include <thread>

namespace pdls {

Vec agent_gradient(const AgentShard& shard, const Vec& x) {
  if (shard.A_i.cols() != x.size())
    throw DimensionError("agent_gradient: x has length " + std::to_string(x.size()) +
                         ", shard has " + std::to_string(shard.A_i.cols()) + " columns");
  Vec r = matvec(shard.A_i, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= shard.b_i[i];
  return transpose_matvec(shard.A_i, r);
}

Vec agent_residual(const AgentShard& shard, const Vec& k_j, std::size_t j, double beta,
                   std::size_t m) {
  const std::size_t n = shard.A_i.cols();
  if (k_j.size() != n)
    throw DimensionError("agent_residual: k_j has length " + std::to_string(k_j.size()) +
                         ", expected " + std::to_string(n));
  if (j >= n) throw InvalidArgument("agent_residual: column index out of range");
  if (!(beta > 0.0)) throw InvalidArgument("agent_residual: beta must be positive");
  if (m < 1) throw InvalidArgument("agent_residual: m must be at least 1");

  Vec out;
  if (shard.gram) {
    out = matvec(*shard.gram, k_j);
  } else {
    out = transpose_matvec(shard.A_i, matvec(shard.A_i, k_j));
  }
  const double bm = beta / static_cast<double>(m);
  for (std::size_t i = 0; i < n; ++i) out[i] += bm * k_j[i];
  out[j] -= 1.0 / static_cast<double>(m);
  return out;
}

AgentReply agent_compute_reply(const AgentShard& shard, const Vec& x, const DenseMatrix& k_prev,
                               double beta, std::size_t m, FlopCounter& flops) {
  const std::size_t n = shard.A_i.cols();
  const std::size_t n_i = shard.A_i.rows();
  AgentReply reply;
  reply.agent_id = shard.agent_id;
  reply.gradient = agent_gradient(shard, x);
  reply.residuals = DenseMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j)
    reply.residuals.set_col(j, agent_residual(shard, k_prev.col_copy(j), j, beta, m));
  flops.ensure_agents(shard.agent_id + 1);
  flops.per_agent[shard.agent_id] += gradient_flops(n_i, n) + residual_all_columns_flops(n_i, n);
  return reply;
}

namespace {

void check_replies(const std::vector<AgentReply>& replies) {
  const std::size_t m = replies.size();
  if (m == 0) throw ProtocolError("server update: no agent replies");
  std::vector<bool> seen(m, false);
  for (const auto& r : replies) {
    if (r.agent_id >= m || seen[r.agent_id])
      throw ProtocolError("server update: missing or duplicated agent reply (id " +
                          std::to_string(r.agent_id) + ")");
    seen[r.agent_id] = true;
  }
}

// Folds replies in ascending agent_id order regardless of vector order.
std::vector<const AgentReply*> by_id(const std::vector<AgentReply>& replies) {
  std::vector<const AgentReply*> ordered(replies.size(), nullptr);
  for (const auto& r : replies) ordered[r.agent_id] = &r;
  return ordered;
}

}  // namespace

DenseMatrix server_update_K(const DenseMatrix& k_prev, const std::vector<AgentReply>& replies,
                            double alpha) {
  check_replies(replies);
  const auto ordered = by_id(replies);
  const std::size_t n = k_prev.rows();
  for (const auto* r : ordered)
    if (r->residuals.rows() != n || r->residuals.cols() != n)
      throw DimensionError("server_update_K: residual block shape mismatch");

  DenseMatrix k_next(n, n);
  Vec acc(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) acc[i] = 0.0;
    for (const auto* r : ordered) {
      const double* col = r->residuals.col(j);
      for (std::size_t i = 0; i < n; ++i) acc[i] += col[i];
    }
    const double* prev = k_prev.col(j);
    double* next = k_next.col(j);
    for (std::size_t i = 0; i < n; ++i) next[i] = prev[i] - alpha * acc[i];
  }
  return k_next;
}

Vec server_update_x(const Vec& x, const DenseMatrix& k, const std::vector<AgentReply>& replies,
                    double delta, FlopCounter& flops) {
  check_replies(replies);
  const auto ordered = by_id(replies);
  Vec g_sum(x.size(), 0.0);
  for (const auto* r : ordered) {
    if (r->gradient.size() != x.size())
      throw DimensionError("server_update_x: gradient length mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) g_sum[i] += r->gradient[i];
  }
  Vec step = matvec(k, g_sum);
  flops.server += server_xupdate_flops(x.size());
  Vec out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= delta * step[i];
  return out;
}

FastContext FastContext::build(const std::vector<AgentShard>& shards, double beta) {
  if (!(beta > 0.0)) throw InvalidArgument("FastContext: beta must be positive");
  FastContext ctx;
  ctx.H = add_scaled_identity(sum_of_grams(shards), beta);
  return ctx;
}

namespace {

std::vector<AgentReply> compute_all_replies(const std::vector<AgentShard>& shards, const Vec& x,
                                            const DenseMatrix& k_prev, double beta,
                                            const RoundParams& params, FlopCounter& flops) {
  const std::size_t m = shards.size();
  std::vector<AgentReply> replies(m);
  const unsigned workers =
      params.threads > 1 ? std::min<unsigned>(params.threads, static_cast<unsigned>(m)) : 0;
  if (workers == 0) {
    for (std::size_t i = 0; i < m; ++i)
      replies[i] = agent_compute_reply(shards[i], x, k_prev, beta, m, flops);
    return replies;
  }
  // Agents are pure and independent; each thread fills its own slots and
  // its own flop cell, the fold stays sequential in the caller.
  flops.ensure_agents(m);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= m) return;
        FlopCounter local;
        replies[i] = agent_compute_reply(shards[i], x, k_prev, beta, m, local);
        flops.per_agent[i] += local.per_agent[i];
      }
    });
  }
  for (auto& t : pool) t.join();
  return replies;
}

Vec fold_gradients(const std::vector<AgentReply>& replies, std::size_t n) {
  Vec g_sum(n, 0.0);
  for (const auto* r : by_id(replies)) {
    for (std::size_t i = 0; i < n; ++i) g_sum[i] += r->gradient[i];
  }
  return g_sum;
}

}  // namespace

RoundResult run_round(const ServerState& server, const std::vector<AgentShard>& shards,
                      const RoundParams& params, FlopCounter& flops, const FastContext* fast) {
  if (shards.empty()) throw ProtocolError("run_round: no agents");
  const std::size_t m = shards.size();
  const std::size_t n = server.x.size();
  if (server.K.rows() != n || server.K.cols() != n)
    throw DimensionError("run_round: K must be n x n");

  RoundResult out;
  if (params.fast_mode) {
    if (fast == nullptr) throw InvalidArgument("run_round: fast mode needs a FastContext");
    // Per-agent gradients stay on the protocol path; the aggregated
    // residual sum_i R^i_j collapses to H K - I with H = A^T A + beta I.
    Vec g_sum(n, 0.0);
    flops.ensure_agents(m);
    for (std::size_t i = 0; i < m; ++i) {
      Vec g = agent_gradient(shards[i], server.x);
      for (std::size_t k = 0; k < n; ++k) g_sum[k] += g[k];
      const std::size_t n_i = shards[i].A_i.rows();
      flops.per_agent[i] += gradient_flops(n_i, n) + residual_all_columns_flops(n_i, n);
    }
    DenseMatrix residual_sum = matmul(fast->H, server.K);
    for (std::size_t j = 0; j < n; ++j) residual_sum(j, j) -= 1.0;

    out.state.K = DenseMatrix(n, n);
    for (std::size_t idx = 0; idx < out.state.K.values().size(); ++idx)
      out.state.K.values()[idx] = server.K.values()[idx] - params.alpha * residual_sum.values()[idx];

    Vec step = matvec(out.state.K, g_sum);
    flops.server += server_xupdate_flops(n);
    out.state.x = server.x;
    for (std::size_t i = 0; i < n; ++i) out.state.x[i] -= params.delta * step[i];
    out.state.iteration = server.iteration + 1;
    out.gradient_sum = std::move(g_sum);
    return out;
  }

  out.replies = compute_all_replies(shards, server.x, server.K, params.beta, params, flops);
  out.gradient_sum = fold_gradients(out.replies, n);
  out.state.K = server_update_K(server.K, out.replies, params.alpha);
  out.state.x = server_update_x(server.x, out.state.K, out.replies, params.delta, flops);
  out.state.iteration = server.iteration + 1;
  return out;
}

}  // namespace pdls
