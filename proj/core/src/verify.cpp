#include "pdls/verify.hpp"

#include <cmath>
#include <sstream>

#include "pdls/solvers.hpp"

namespace pdls {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

PropertyResult pass(std::string name, std::string detail = "") {
  return {std::move(name), true, std::move(detail)};
}
PropertyResult fail(std::string name, std::string detail) {
  return {std::move(name), false, std::move(detail)};
}

double wrong_rho_star_k(const SpectralInfo& s, double beta) {
  // deliberately corrupted closed form (sign of the 2*beta term flipped)
  return (s.lambda - s.gamma) / (s.lambda + s.gamma - 2.0 * beta);
}

struct IpgRun {
  SpectralInfo spectral;
  RateReport rates;
  Trace trace;
};

IpgRun run_optimal_ipg(const Instance& inst, std::size_t max_iters) {
  IpgRun out;
  const DenseMatrix ata = gram(inst.problem.A);
  out.spectral = spectral_extremes(ata);
  const DenseMatrix k_star = kstar_oracle(ata, inst.beta);
  const std::size_t n = inst.problem.A.cols();

  SolverConfig cfg;
  cfg.method = Method::IPG;
  cfg.beta = inst.beta;
  cfg.alpha = optimal_alpha(out.spectral, inst.beta);
  cfg.delta = optimal_delta_ipg(out.spectral, inst.beta);
  cfg.max_iters = max_iters;
  cfg.stop = {StopKind::relative_error, 1e-13};
  out.rates = compute_rates(out.spectral, inst.beta, cfg.delta, DenseMatrix(n, n, 0.0), k_star);
  out.trace = run_ipg(inst.problem, partition(inst.problem, 1), cfg);
  return out;
}

}  // namespace

PropertyResult check_preconditioned_spectrum(const std::vector<Instance>& set) {
  const char* name = "preconditioned-spectrum";
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto rep = verify_preconditioned_spectrum(gram(set[i].problem.A), set[i].beta);
    if (!rep.ok)
      return fail(name, "instance " + std::to_string(i) + ": " + rep.message);
  }
  return pass(name, std::to_string(set.size()) + " instances");
}

PropertyResult check_k_contraction_property(const std::vector<Instance>& set) {
  const char* name = "K-iteration-contraction";
  for (std::size_t i = 0; i < set.size(); ++i) {
    const DenseMatrix ata = gram(set[i].problem.A);
    const SpectralInfo s = spectral_extremes(ata);
    const auto rep =
        verify_k_contraction(ata, set[i].beta, optimal_alpha(s, set[i].beta), /*iters=*/40);
    if (!rep.ok)
      return fail(name, "instance " + std::to_string(i) + ": " + rep.message);
  }
  return pass(name, std::to_string(set.size()) + " instances, 40 iterations each");
}

PropertyResult check_per_step_error_bound(const std::vector<Instance>& set) {
  const char* name = "per-step-error-bound";
  const double slack = 1.0 + 1e-8;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const IpgRun run = run_optimal_ipg(set[i], 120);
    const auto& recs = run.trace.records;
    for (std::size_t k = 0; k + 1 < recs.size(); ++k) {
      if (!recs[k].err_norm || !recs[k + 1].err_norm) continue;
      const double prev = *recs[k].err_norm;
      const double next = *recs[k + 1].err_norm;
      if (prev <= 1e-6 * (*recs[0].err_norm)) break;  // below numerical resolvability
      const double bound =
          run.rates.rho_star_beta +
          run.rates.sigma_0 * std::pow(run.rates.rho_star_k, static_cast<double>(recs[k].t) + 1.0);
      if (next > bound * prev * slack)
        return fail(name, "instance " + std::to_string(i) + ", t=" + std::to_string(recs[k].t) +
                              ": factor " + fmt(next / prev) + " > bound " + fmt(bound));
    }
  }
  return pass(name, std::to_string(set.size()) + " instances");
}

PropertyResult check_rate_ordering(const std::vector<Instance>& set, bool inject_wrong_rho_k) {
  const char* name = "rate-ordering";
  for (std::size_t i = 0; i < set.size(); ++i) {
    const DenseMatrix ata = gram(set[i].problem.A);
    const SpectralInfo s = spectral_extremes(ata);
    const DenseMatrix k_star = kstar_oracle(ata, set[i].beta);
    const std::size_t n = ata.rows();
    RateReport r = compute_rates(s, set[i].beta, optimal_delta_ipg(s, set[i].beta),
                                 DenseMatrix(n, n, 0.0), k_star);
    if (inject_wrong_rho_k) r.rho_star_k = wrong_rho_star_k(s, set[i].beta);
    const bool ordered = r.rho_star_beta < r.rho_gd && r.rho_gd < 1.0 && r.rho_star_beta > 0.0;
    const bool k_rate_ok = r.rho_star_k > 0.0 && r.rho_star_k < 1.0;
    if (!(ordered && k_rate_ok))
      return fail(name, "instance " + std::to_string(i) + ": rho*_beta=" + fmt(r.rho_star_beta) +
                            ", rho_gd=" + fmt(r.rho_gd) + ", rho*_K=" + fmt(r.rho_star_k));
  }
  return pass(name, "0 < rho*_beta < rho_gd < 1 and 0 < rho*_K < 1 on all instances");
}

PropertyResult check_bound_crossover(const std::vector<Instance>& set) {
  const char* name = "bound-crossover";
  for (std::size_t i = 0; i < set.size(); ++i) {
    const DenseMatrix ata = gram(set[i].problem.A);
    const SpectralInfo s = spectral_extremes(ata);
    const DenseMatrix k_star = kstar_oracle(ata, set[i].beta);
    const std::size_t n = ata.rows();
    const double delta = optimal_delta_ipg(s, set[i].beta);
    const RateReport r = compute_rates(s, set[i].beta, delta, DenseMatrix(n, n, 0.0), k_star);
    const auto& p = set[i].problem;
    const double z0 = p.x_star ? norm2(*p.x_star) : 1.0;  // x(0) = 0
    const auto b = bound_sequences(r, z0, default_horizon(r));
    if (!b.t_sw)
      return fail(name, "instance " + std::to_string(i) + ": no crossover within horizon " +
                            std::to_string(b.log_E1.size() - 1));
    for (std::size_t t = *b.t_sw + 1; t < b.log_E1.size(); ++t)
      if (!(b.log_E1[t] < b.log_E2[t]))
        return fail(name, "instance " + std::to_string(i) + ": E1 >= E2 at t=" +
                              std::to_string(t) + " past t_sw=" + std::to_string(*b.t_sw));
  }
  return pass(name, "finite t_sw with E1 < E2 beyond it on all instances");
}

PropertyResult check_rate_consistency_rho_k(const std::vector<Instance>& set,
                                            bool inject_wrong_rho_k) {
  const char* name = "rates-rhoK-vs-kappa-form";
  for (std::size_t i = 0; i < set.size(); ++i) {
    const SpectralInfo s = spectral_extremes(gram(set[i].problem.A));
    const double beta = set[i].beta;
    double rho_k = (s.lambda - s.gamma) / (s.lambda + s.gamma + 2.0 * beta);
    if (inject_wrong_rho_k) rho_k = wrong_rho_star_k(s, beta);
    const double kappa_shift = (s.lambda + beta) / (s.gamma + beta);
    const double via_kappa = (kappa_shift - 1.0) / (kappa_shift + 1.0);
    const double denom = std::max(std::abs(via_kappa), 1e-300);
    if (std::abs(rho_k - via_kappa) / denom > 1e-12)
      return fail(name, "instance " + std::to_string(i) + ": " + fmt(rho_k) + " vs " +
                            fmt(via_kappa));
  }
  return pass(name, "closed form matches (kappa(AtA+betaI)-1)/(kappa+1) to 1e-12");
}

PropertyResult check_rate_consistency_rho_beta(const std::vector<Instance>& set) {
  const char* name = "rates-rhoBeta-vs-preconditioned-kappa";
  for (std::size_t i = 0; i < set.size(); ++i) {
    const SpectralInfo s = spectral_extremes(gram(set[i].problem.A));
    const double beta = set[i].beta;
    const double rho_beta =
        (s.lambda - s.gamma) * beta / ((s.lambda + s.gamma) * beta + 2.0 * s.lambda * s.gamma);
    const double hi = s.lambda / (s.lambda + beta);
    const double lo = s.gamma / (s.gamma + beta);
    const double kappa_pre = hi / lo;
    const double via_kappa = (kappa_pre - 1.0) / (kappa_pre + 1.0);
    const double denom = std::max(std::abs(via_kappa), 1e-300);
    if (std::abs(rho_beta - via_kappa) / denom > 1e-12)
      return fail(name, "instance " + std::to_string(i) + ": " + fmt(rho_beta) + " vs " +
                            fmt(via_kappa));
  }
  return pass(name, "closed form matches (kappa(K*AtA)-1)/(kappa(K*AtA)+1) to 1e-12");
}

PropertyResult check_beta_monotonicity(const std::vector<Instance>& set) {
  const char* name = "rates-beta-monotonicity";
  for (std::size_t i = 0; i < set.size(); ++i) {
    const SpectralInfo s = spectral_extremes(gram(set[i].problem.A));
    if (!(s.lambda > s.gamma)) continue;
    auto rho_k_at = [&](double beta) {
      return (s.lambda - s.gamma) / (s.lambda + s.gamma + 2.0 * beta);
    };
    auto rho_beta_at = [&](double beta) {
      return (s.lambda - s.gamma) * beta / ((s.lambda + s.gamma) * beta + 2.0 * s.lambda * s.gamma);
    };
    const double limit = (s.lambda - s.gamma) / (s.lambda + s.gamma);
    double prev_rb = -1.0;
    for (double beta : {0.5 * set[i].beta, set[i].beta, 2.0 * set[i].beta, 8.0 * set[i].beta}) {
      const double h = 1e-6 * beta;
      const double d = (rho_k_at(beta + h) - rho_k_at(beta - h)) / (2.0 * h);
      if (!(d < 0.0))
        return fail(name, "instance " + std::to_string(i) + ": d rho*_K/d beta = " + fmt(d) +
                              " at beta=" + fmt(beta));
      const double rb = rho_beta_at(beta);
      if (!(rb > prev_rb) || !(rb < limit))
        return fail(name, "instance " + std::to_string(i) +
                              ": rho*_beta not increasing toward (lambda-gamma)/(lambda+gamma)");
      prev_rb = rb;
    }
  }
  return pass(name, "d rho*_K/d beta < 0; rho*_beta increases toward its limit");
}

PropertyResult check_aggregation_identities(std::uint64_t seed) {
  const char* name = "aggregation-identities";
  const Problem p = random_problem(seed, 40, 8);
  const DenseMatrix ata = gram(p.A);
  const Vec atb = transpose_matvec(p.A, p.b);
  Rng rng(seed ^ 0xabcdef);
  for (std::size_t m : {1u, 2u, 5u, 10u}) {
    auto shards = partition(p, m);
    // sum_i g^i(x) == AtA x - At b
    Vec x(8);
    for (auto& v : x) v = rng.uniform(-2.0, 2.0);
    Vec g_sum(8, 0.0);
    for (const auto& s : shards) {
      Vec g = agent_gradient(s, x);
      for (std::size_t k = 0; k < 8; ++k) g_sum[k] += g[k];
    }
    const Vec expected_g = sub(matvec(ata, x), atb);
    const double scale_g = std::max(1.0, norm2(expected_g));
    if (norm2(sub(g_sum, expected_g)) > 1e-10 * scale_g)
      return fail(name, "gradient aggregation off at m=" + std::to_string(m));

    // sum_i R^i_j(k) == (AtA + beta I) k - e_j
    const double beta = 3.0;
    for (std::size_t j : {std::size_t{0}, std::size_t{5}}) {
      Vec k_j(8);
      for (auto& v : k_j) v = rng.uniform(-1.0, 1.0);
      Vec r_sum(8, 0.0);
      for (const auto& s : shards) {
        Vec r = agent_residual(s, k_j, j, beta, m);
        for (std::size_t k = 0; k < 8; ++k) r_sum[k] += r[k];
      }
      Vec expected_r = matvec(add_scaled_identity(ata, beta), k_j);
      expected_r[j] -= 1.0;
      const double scale_r = std::max(1.0, norm2(expected_r));
      if (norm2(sub(r_sum, expected_r)) > 1e-10 * scale_r)
        return fail(name, "residual aggregation off at m=" + std::to_string(m) +
                              ", j=" + std::to_string(j));
    }
  }
  return pass(name, "sum_i R^i_j == (AtA+betaI)k - e_j and sum_i g^i == AtA x - At b, m in {1,2,5,10}");
}

PropertyResult check_partition_invariance(std::uint64_t seed) {
  const char* name = "partition-invariance";
  for (const auto& [p, iters] :
       {std::pair{oracle2x2(), std::size_t{80}}, std::pair{random_problem(seed, 20, 5), std::size_t{120}},
        std::pair{random_problem(seed + 1, 40, 8), std::size_t{150}}}) {
    const std::size_t n = p.A.cols();
    const SpectralInfo s = spectral_extremes(gram(p.A));
    RoundParams params;
    params.beta = 2.0;
    params.alpha = optimal_alpha(s, params.beta);
    params.delta = optimal_delta_ipg(s, params.beta);

    // step the protocol directly so x(t) and K(t) compare per iteration
    std::vector<std::size_t> agent_counts;
    for (std::size_t m : {1u, 2u, 5u, 10u})
      if (m <= p.A.rows()) agent_counts.push_back(m);
    std::vector<std::vector<AgentShard>> sharded;
    std::vector<ServerState> states;
    for (std::size_t m : agent_counts) {
      sharded.push_back(partition(p, m));
      states.push_back({Vec(n, 0.0), DenseMatrix(n, n, 0.0), 0});
    }
    for (std::size_t t = 0; t < iters; ++t) {
      for (std::size_t i = 0; i < states.size(); ++i) {
        FlopCounter flops;
        states[i] = run_round(states[i], sharded[i], params, flops).state;
      }
      const double xscale = std::max(1.0, norm2(states[0].x));
      const double kscale = std::max(1.0, frobenius_norm(states[0].K));
      for (std::size_t i = 1; i < states.size(); ++i) {
        if (max_abs_diff(states[i].x, states[0].x) > 1e-12 * xscale ||
            max_abs_diff(states[i].K, states[0].K) > 1e-12 * kscale)
          return fail(name, "m=" + std::to_string(agent_counts[i]) + " deviates from m=1 at t=" +
                                std::to_string(t) + " (n=" + std::to_string(n) + ")");
      }
    }
  }
  return pass(name, "x(t), K(t) for m in {1,2,5,10} agree with m=1 to 1e-12 relative per iteration");
}

PropertyResult check_fast_mode_equivalence(std::uint64_t seed) {
  const char* name = "fast-vs-default-mode";
  const Problem p = random_problem(seed + 17, 30, 6);
  const SpectralInfo s = spectral_extremes(gram(p.A));
  auto shards = partition(p, 5);

  SolverConfig cfg;
  cfg.method = Method::IPG;
  cfg.beta = 1.5;
  cfg.alpha = optimal_alpha(s, cfg.beta);
  cfg.delta = optimal_delta_ipg(s, cfg.beta);
  cfg.max_iters = 120;
  cfg.stop = {StopKind::iteration_cap, 0.0};

  Trace slow = run_ipg(p, shards, cfg);
  cfg.fast_mode = true;
  auto cached = shards;
  attach_gram(cached);
  Trace fast = run_ipg(p, cached, cfg);

  if (slow.records.size() != fast.records.size()) return fail(name, "record count mismatch");
  for (std::size_t k = 0; k < slow.records.size(); ++k) {
    const double a = *slow.records[k].err_norm;
    const double b = *fast.records[k].err_norm;
    const double scale = std::max({std::abs(a), std::abs(b), 1e-30});
    if (std::abs(a - b) / scale > 1e-10 && std::abs(a - b) > 1e-12)
      return fail(name, "trajectories deviate at t=" + std::to_string(slow.records[k].t));
  }
  if (slow.flops.total() != fast.flops.total())
    return fail(name, "flop reporting differs between modes");
  return pass(name, "trajectories agree to 1e-10; flop reporting identical");
}

PropertyResult check_dgd_ipg_equivalence() {
  const char* name = "dgd-equals-ipg-with-identity-K";
  const Problem p = random_problem(99, 20, 5);
  const SpectralInfo s = spectral_extremes(gram(p.A));
  auto shards = partition(p, 4);

  SolverConfig dgd;
  dgd.method = Method::DGD;
  dgd.delta = optimal_delta_dgd(s);
  dgd.max_iters = 80;
  dgd.stop = {StopKind::iteration_cap, 0.0};
  const Trace a = run_dgd(p, shards, dgd);

  SolverConfig ipg = dgd;
  ipg.method = Method::IPG;
  ipg.alpha = 0.0;
  ipg.beta = 1.0;
  ipg.K_init = DenseMatrix::identity(5);
  const Trace b = run_ipg(p, shards, ipg);

  if (a.records.size() != b.records.size()) return fail(name, "record count mismatch");
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    if (*a.records[k].err_norm != *b.records[k].err_norm ||
        a.records[k].grad_norm != b.records[k].grad_norm)
      return fail(name, "bitwise mismatch at t=" + std::to_string(a.records[k].t));
  }
  if (!(a.final_state.x == b.final_state.x)) return fail(name, "final x differs bitwise");
  return pass(name, "x trajectory and recorded norms bit-identical over 80 iterations");
}

PropertyResult check_eig_shift_property(std::uint64_t seed) {
  const char* name = "eig-shift-property";
  Rng rng(seed + 5);
  for (int rep = 0; rep < 6; ++rep) {
    const std::size_t n = 2 + rng.bits() % 9;
    DenseMatrix m(n + 2, n);
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t r = 0; r < n + 2; ++r) m(r, c) = rng.uniform(-1.0, 1.0);
    const DenseMatrix spd = gram(m);
    const double beta = std::pow(10.0, rng.uniform(-1.0, 1.0));
    const auto base = sym_eig(spd);
    const auto shifted = sym_eig(add_scaled_identity(spd, beta));
    const double scale = std::abs(base.values.back()) + beta;
    for (std::size_t k = 0; k < n; ++k)
      if (std::abs(shifted.values[k] - (base.values[k] + beta)) > 1e-8 * scale)
        return fail(name, "shift mismatch at k=" + std::to_string(k));
  }
  return pass(name, "eig(S + beta I) == eig(S) + beta within 1e-8");
}

PropertyResult check_solve_eig_agreement(std::uint64_t seed) {
  const char* name = "cholesky-vs-eig-inverse";
  Rng rng(seed + 11);
  for (int rep = 0; rep < 6; ++rep) {
    const std::size_t n = 2 + rng.bits() % 7;
    DenseMatrix m(n, n);
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t r = 0; r < n; ++r) m(r, c) = rng.uniform(-1.0, 1.0);
    const DenseMatrix spd = add_scaled_identity(gram(m), 1.0);
    const DenseMatrix direct = solve_spd(spd, DenseMatrix::identity(n));
    const auto eig = sym_eig(spd);
    DenseMatrix weighted(n, n);
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t r = 0; r < n; ++r)
        weighted(r, c) = eig.vectors(r, c) / eig.values[c];
    const DenseMatrix via_eig = matmul(weighted, transpose(eig.vectors));
    const double scale = max_abs(direct);
    if (max_abs_diff(direct, via_eig) > 1e-7 * scale)
      return fail(name, "entrywise mismatch, rep " + std::to_string(rep));
  }
  return pass(name, "S^{-1} from Cholesky matches eigendecomposition to 1e-7 relative");
}

PropertyResult check_rerun_determinism() {
  const char* name = "rerun-determinism";
  const Problem p = random_problem(3, 24, 6);
  const SpectralInfo s = spectral_extremes(gram(p.A));
  auto shards = partition(p, 3);
  SolverConfig cfg;
  cfg.method = Method::IPG;
  cfg.beta = 1.0;
  cfg.alpha = optimal_alpha(s, cfg.beta);
  cfg.delta = optimal_delta_ipg(s, cfg.beta);
  cfg.max_iters = 60;
  cfg.stop = {StopKind::iteration_cap, 0.0};
  const Trace a = run_ipg(p, shards, cfg);
  const Trace b = run_ipg(p, shards, cfg);
  if (!(a.final_state.x == b.final_state.x) || !(a.final_state.K == b.final_state.K))
    return fail(name, "reruns differ bitwise");
  for (std::size_t k = 0; k < a.records.size(); ++k)
    if (*a.records[k].err_norm != *b.records[k].err_norm)
      return fail(name, "recorded norms differ bitwise");
  return pass(name, "identical inputs give bit-identical traces");
}

std::vector<PropertyResult> run_property_suite(const VerifyOptions& opt) {
  const auto set = property_instances(opt.seed, opt.instances);
  std::vector<PropertyResult> out;
  out.push_back(check_preconditioned_spectrum(set));
  out.push_back(check_k_contraction_property(set));
  out.push_back(check_per_step_error_bound(set));
  out.push_back(check_rate_ordering(set, opt.inject_wrong_rho_k));
  out.push_back(check_bound_crossover(set));
  out.push_back(check_rate_consistency_rho_k(set, opt.inject_wrong_rho_k));
  out.push_back(check_rate_consistency_rho_beta(set));
  out.push_back(check_beta_monotonicity(set));
  out.push_back(check_aggregation_identities(opt.seed));
  out.push_back(check_partition_invariance(opt.seed));
  out.push_back(check_fast_mode_equivalence(opt.seed));
  out.push_back(check_dgd_ipg_equivalence());
  out.push_back(check_eig_shift_property(opt.seed));
  out.push_back(check_solve_eig_agreement(opt.seed));
  out.push_back(check_rerun_determinism());
  return out;
}

}  // namespace pdls
