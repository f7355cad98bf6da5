#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pdls/dense.hpp"

namespace pdls {

/// Extremes of the Gram spectrum. lambda is the largest eigenvalue of
/// A^T A, gamma the smallest, kappa their ratio.
struct SpectralInfo {
  double lambda = 0.0;
  double gamma = 0.0;
  double kappa = 0.0;
};

/// Closed-form convergence rates plus the transient amplitude sigma_0,
/// with the (beta, delta) they were computed under. sigma_0 binds the
/// delta of the run being analyzed.
struct RateReport {
  double rho_gd = 0.0;
  double rho_star_k = 0.0;
  double rho_star_beta = 0.0;
  double sigma_0 = 0.0;
  double beta = 0.0;
  double delta = 0.0;
};

/// Error-bound sequences: E1 for the pre-conditioned iteration (product of
/// per-step factors), E2 for plain gradient descent (geometric), and the
/// first index after which E1 stays strictly below E2. The log arrays are
/// the authoritative values; E1/E2 are exp() of them and saturate to inf
/// for ill-conditioned instances.
struct BoundSequences {
  std::vector<double> E1, E2;
  std::vector<double> log_E1, log_E2;
  std::optional<std::size_t> t_sw;
};

struct PreconditionedSpectrumReport {
  bool ok = false;
  bool positive_definite = false;
  double largest = 0.0, smallest = 0.0;
  double expected_largest = 0.0, expected_smallest = 0.0;
  double max_rel_mismatch = 0.0;
  std::string message;
};

struct KContractionReport {
  bool ok = false;
  bool already_converged = false;
  bool per_column_ok = false;
  bool frobenius_ok = false;
  /// max over steps/columns of (measured factor) / (rho_star_k bound)
  double worst_factor_ratio = 0.0;
  std::size_t violation_t = 0, violation_j = 0;
  std::string message;
};

/// Largest/smallest eigenvalue of A^T A via sym_eig. Throws
/// AssumptionViolated when the smallest eigenvalue is <= 1e-12 times the
/// largest (rank deficiency).
SpectralInfo spectral_extremes(const DenseMatrix& ata);

/// K* = (A^T A + beta I)^{-1}, via the direct solver. Verification oracle
/// only; the protocol never forms it.
DenseMatrix kstar_oracle(const DenseMatrix& ata, double beta);

/// rho_gd = (kappa-1)/(kappa+1); rho*_K = (lambda-gamma)/(lambda+gamma+2beta);
/// rho*_beta = (lambda-gamma)beta/((lambda+gamma)beta + 2 lambda gamma);
/// sigma_0 = delta * lambda * ||K_init - K_star||_F.
RateReport compute_rates(const SpectralInfo& s, double beta, double delta,
                         const DenseMatrix& k_init, const DenseMatrix& k_star);

/// Checks that the spectrum of K* A^T A matches lambda/(lambda+beta),
/// gamma/(gamma+beta) and is positive, via the symmetric similarity
/// (A^T A + beta I)^{-1/2} A^T A (A^T A + beta I)^{-1/2}.
PreconditionedSpectrumReport verify_preconditioned_spectrum(const DenseMatrix& ata, double beta, double rel_tol = 1e-8);

/// Runs the K iteration K(t) = K(t-1) - alpha [(A^T A + beta I) K(t-1) - I]
/// and checks the per-column contraction factor against rho*_K and the
/// Frobenius envelope (rho*_K)^{t+1} ||K(-1) - K*||_F. The bounds are
/// guaranteed for alpha = 2/(lambda+gamma+2beta); other alpha values are
/// measured and reported.
KContractionReport verify_k_contraction(const DenseMatrix& ata, double beta, double alpha,
                                        std::size_t iters,
                                        const DenseMatrix* k_init = nullptr);

/// E1[0] = E2[0] = z0_norm; E2[t] = rho_gd^t z0; E1[t+1] = (rho*_beta +
/// sigma_0 (rho*_K)^{t+1}) E1[t]. t_sw is the first t with E1 < E2 that
/// holds through the horizon.
BoundSequences bound_sequences(const RateReport& r, double z0_norm, std::size_t horizon);

/// 10x the iteration count at which E2 falls below 1e-12 of E2[0],
/// capped at 1e6.
std::size_t default_horizon(const RateReport& r);

/// Optimal constant steps for the two quadratic iterations:
/// alpha* = 2/(lambda+gamma+2beta) for the K iteration (Hessian
/// A^T A + beta I), delta* = 2/(lambda/(lambda+beta) + gamma/(gamma+beta))
/// for the ideally pre-conditioned x iteration, and the plain-GD
/// delta* = 2/(lambda+gamma).
double optimal_alpha(const SpectralInfo& s, double beta);
double optimal_delta_ipg(const SpectralInfo& s, double beta);
double optimal_delta_dgd(const SpectralInfo& s);

/// JSON report with fixed keys: lambda, gamma, kappa, rho_gd, rho_star_k,
/// rho_star_beta, sigma0, t_sw (number, or "none within horizon").
std::string rates_to_json(const SpectralInfo& s, const RateReport& r,
                          const std::optional<std::size_t>& t_sw);

}  // namespace pdls
