#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdls/fixtures.hpp"

namespace pdls {

struct PropertyResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  /// Number of random instances on top of the 2x2 oracle.
  std::size_t instances = 50;
  /// Test-only hook: corrupts the rho*_K closed form so the suite's
  /// sensitivity can be demonstrated.
  bool inject_wrong_rho_k = false;
};

/// The full property suite over the builtin fixtures plus seeded random
/// instances: the spectrum/contraction/bound checks, the aggregation and
/// partition identities, equivalence and determinism properties, and the
/// closed-form rate consistency checks.
std::vector<PropertyResult> run_property_suite(const VerifyOptions& opt);

// Individual checks, reused by the acceptance suite. The spectrum check.s
// positive-definiteness assertion is part of check_preconditioned_spectrum.
PropertyResult check_preconditioned_spectrum(const std::vector<Instance>& set);
PropertyResult check_k_contraction_property(const std::vector<Instance>& set);
PropertyResult check_per_step_error_bound(const std::vector<Instance>& set);
PropertyResult check_rate_ordering(const std::vector<Instance>& set, bool inject_wrong_rho_k);
PropertyResult check_bound_crossover(const std::vector<Instance>& set);
PropertyResult check_rate_consistency_rho_k(const std::vector<Instance>& set,
                                            bool inject_wrong_rho_k);
PropertyResult check_rate_consistency_rho_beta(const std::vector<Instance>& set);
PropertyResult check_beta_monotonicity(const std::vector<Instance>& set);
PropertyResult check_aggregation_identities(std::uint64_t seed);
PropertyResult check_partition_invariance(std::uint64_t seed);
PropertyResult check_fast_mode_equivalence(std::uint64_t seed);
PropertyResult check_dgd_ipg_equivalence();
PropertyResult check_eig_shift_property(std::uint64_t seed);
PropertyResult check_solve_eig_agreement(std::uint64_t seed);
PropertyResult check_rerun_determinism();

}  // namespace pdls
