#include "pdls/analysis.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace pdls {

SpectralInfo spectral_extremes(const DenseMatrix& ata) {
  const EigenResult eig = sym_eig(ata);
  SpectralInfo s;
  s.lambda = eig.values.back();
  s.gamma = eig.values.front();
  if (!(s.lambda > 0.0) || s.gamma <= 1e-12 * s.lambda)
    throw AssumptionViolated("Assumption 1 violated: A^T A rank deficient");
  s.kappa = s.lambda / s.gamma;
  return s;
}

DenseMatrix kstar_oracle(const DenseMatrix& ata, double beta) {
  if (!(beta > 0.0)) throw InvalidArgument("kstar_oracle: beta must be positive");
  return solve_spd(add_scaled_identity(ata, beta), DenseMatrix::identity(ata.rows()));
}

RateReport compute_rates(const SpectralInfo& s, double beta, double delta,
                         const DenseMatrix& k_init, const DenseMatrix& k_star) {
  if (!(beta > 0.0)) throw InvalidArgument("compute_rates: beta must be positive");
  if (!(delta > 0.0)) throw InvalidArgument("compute_rates: delta must be positive");
  RateReport r;
  r.beta = beta;
  r.delta = delta;
  r.rho_gd = (s.kappa - 1.0) / (s.kappa + 1.0);
  r.rho_star_k = (s.lambda - s.gamma) / (s.lambda + s.gamma + 2.0 * beta);
  r.rho_star_beta =
      (s.lambda - s.gamma) * beta / ((s.lambda + s.gamma) * beta + 2.0 * s.lambda * s.gamma);
  r.sigma_0 = delta * s.lambda * frobenius_norm(sub(k_init, k_star));
  if (s.lambda > s.gamma &&
      !(r.rho_star_beta > 0.0 && r.rho_star_beta < r.rho_gd && r.rho_gd < 1.0))
    throw Error("compute_rates: rate ordering violated (internal)");
  return r;
}

PreconditionedSpectrumReport verify_preconditioned_spectrum(const DenseMatrix& ata, double beta, double rel_tol) {
  if (!(beta > 0.0)) throw InvalidArgument("verify_preconditioned_spectrum: beta must be positive");
  const SpectralInfo s = spectral_extremes(ata);
  const std::size_t n = ata.rows();

  // K* A^T A is similar to B^{-1/2} A^T A B^{-1/2} with B = A^T A + beta I,
  // which is symmetric; its spectrum is computed exactly by sym_eig.
  // In B's eigenbasis that is D^{-1/2} (U^T A^T A U) D^{-1/2}.
  const EigenResult be = sym_eig(add_scaled_identity(ata, beta));
  DenseMatrix similar = matmul(transpose(be.vectors), matmul(ata, be.vectors));
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = 0; r < n; ++r)
      similar(r, c) /= std::sqrt(be.values[r] * be.values[c]);
  // symmetric in exact arithmetic; average out roundoff asymmetry
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = 0; r < c; ++r) {
      const double v = 0.5 * (similar(r, c) + similar(c, r));
      similar(r, c) = v;
      similar(c, r) = v;
    }
  const EigenResult ce = sym_eig(similar);

  PreconditionedSpectrumReport rep;
  rep.largest = ce.values.back();
  rep.smallest = ce.values.front();
  rep.expected_largest = s.lambda / (s.lambda + beta);
  rep.expected_smallest = s.gamma / (s.gamma + beta);
  rep.positive_definite = ce.values.front() > 0.0;
  const double mis_hi = std::abs(rep.largest - rep.expected_largest) / rep.expected_largest;
  const double mis_lo = std::abs(rep.smallest - rep.expected_smallest) / rep.expected_smallest;
  rep.max_rel_mismatch = std::max(mis_hi, mis_lo);
  rep.ok = rep.positive_definite && rep.max_rel_mismatch <= rel_tol;
  std::ostringstream msg;
  if (rep.ok) {
    msg << "extremes of K*A^TA match lambda/(lambda+beta), gamma/(gamma+beta) to "
        << rep.max_rel_mismatch;
  } else {
    msg << "mismatch: got [" << rep.smallest << ", " << rep.largest << "], expected ["
        << rep.expected_smallest << ", " << rep.expected_largest << "], rel "
        << rep.max_rel_mismatch << (rep.positive_definite ? "" : ", not positive definite");
  }
  rep.message = msg.str();
  return rep;
}

KContractionReport verify_k_contraction(const DenseMatrix& ata, double beta, double alpha,
                                        std::size_t iters, const DenseMatrix* k_init) {
  if (!(beta > 0.0)) throw InvalidArgument("verify_k_contraction: beta must be positive");
  if (!(alpha > 0.0)) throw InvalidArgument("verify_k_contraction: alpha must be positive");
  const SpectralInfo s = spectral_extremes(ata);
  const std::size_t n = ata.rows();
  const DenseMatrix k_star = kstar_oracle(ata, beta);
  const DenseMatrix h = add_scaled_identity(ata, beta);
  const double rho = compute_rates(s, beta, /*delta=*/1.0, DenseMatrix(n, n), k_star).rho_star_k;
  const double alpha_max = 2.0 / (s.lambda + beta);
  const double slack = 1.0 + 1e-8;

  KContractionReport rep;
  DenseMatrix k = k_init ? *k_init : DenseMatrix(n, n, 0.0);
  if (k.rows() != n || k.cols() != n)
    throw DimensionError("verify_k_contraction: K(-1) must be n x n");

  const double init_err = frobenius_norm(sub(k, k_star));
  if (init_err <= 1e-14 * frobenius_norm(k_star)) {
    rep.ok = true;
    rep.already_converged = true;
    rep.per_column_ok = true;
    rep.frobenius_ok = true;
    rep.message = "already converged: K(-1) == K*";
    return rep;
  }

  std::vector<double> col_err_prev(n);
  for (std::size_t j = 0; j < n; ++j)
    col_err_prev[j] = norm2(sub(k.col_copy(j), k_star.col_copy(j)));

  rep.per_column_ok = true;
  rep.frobenius_ok = true;
  rep.worst_factor_ratio = 0.0;
  // Factors are only measurable while the error is numerically resolvable.
  // The iteration's own roundoff plateaus near 1e-15 * scale / (1 - rho),
  // so each column is checked down to 1e-6 of its initial error, scaled by
  // 1/(1-rho); past that the measured ratio is cancellation noise.
  const double window = 1e-6 / std::max(1.0 - rho, 1e-6);
  std::vector<double> col_floor(n);
  for (std::size_t j = 0; j < n; ++j) col_floor[j] = window * col_err_prev[j];
  const double fro_floor = window * init_err;

  for (std::size_t t = 0; t < iters; ++t) {
    DenseMatrix residual = matmul(h, k);
    for (std::size_t j = 0; j < n; ++j) residual(j, j) -= 1.0;
    for (std::size_t idx = 0; idx < k.values().size(); ++idx)
      k.values()[idx] -= alpha * residual.values()[idx];

    for (std::size_t j = 0; j < n; ++j) {
      const double err = norm2(sub(k.col_copy(j), k_star.col_copy(j)));
      if (col_err_prev[j] > col_floor[j]) {
        const double factor = err / col_err_prev[j];
        const double ratio = factor / rho;
        if (ratio > rep.worst_factor_ratio) rep.worst_factor_ratio = ratio;
        if (factor > rho * slack && rep.per_column_ok) {
          rep.per_column_ok = false;
          rep.violation_t = t;
          rep.violation_j = j;
        }
      }
      col_err_prev[j] = err;
    }
    const double fro_err = frobenius_norm(sub(k, k_star));
    const double envelope = std::pow(rho, static_cast<double>(t) + 1.0) * init_err;
    if (fro_err > fro_floor && fro_err > envelope * slack) rep.frobenius_ok = false;
  }

  rep.ok = rep.per_column_ok && rep.frobenius_ok;
  std::ostringstream msg;
  if (rep.ok) {
    msg << "per-column factor <= rho*_K and Frobenius envelope hold over " << iters
        << " iterations (worst factor/rho = " << rep.worst_factor_ratio << ")";
  } else {
    msg << "contraction violated";
    if (!rep.per_column_ok)
      msg << " at (t=" << rep.violation_t << ", j=" << rep.violation_j << ")";
    if (!(alpha < alpha_max))
      msg << "; alpha=" << alpha << " outside convergent range (0, " << alpha_max << ")";
    msg << "; worst factor/rho = " << rep.worst_factor_ratio;
  }
  rep.message = msg.str();
  return rep;
}

BoundSequences bound_sequences(const RateReport& r, double z0_norm, std::size_t horizon) {
  if (horizon < 1) throw InvalidArgument("bound_sequences: horizon must be >= 1");
  if (!(z0_norm >= 0.0)) throw InvalidArgument("bound_sequences: z0_norm must be >= 0");

  BoundSequences b;
  b.log_E1.resize(horizon + 1);
  b.log_E2.resize(horizon + 1);
  b.E1.resize(horizon + 1);
  b.E2.resize(horizon + 1);

  const double log_z0 = std::log(z0_norm);  // -inf for z0 == 0
  const double log_rho_gd = std::log(r.rho_gd);
  b.log_E1[0] = log_z0;
  b.log_E2[0] = log_z0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const double s_prev =
        r.rho_star_beta + r.sigma_0 * std::pow(r.rho_star_k, static_cast<double>(t));
    b.log_E1[t] = b.log_E1[t - 1] + std::log(s_prev);
    b.log_E2[t] = log_z0 + static_cast<double>(t) * log_rho_gd;
  }
  for (std::size_t t = 0; t <= horizon; ++t) {
    b.E1[t] = std::exp(b.log_E1[t]);
    b.E2[t] = std::exp(b.log_E2[t]);
  }

  // first index from which E1 < E2 holds through the horizon
  std::optional<std::size_t> first;
  for (std::size_t t = horizon + 1; t-- > 0;) {
    if (b.log_E1[t] < b.log_E2[t])
      first = t;
    else
      break;
  }
  b.t_sw = first;
  return b;
}

std::size_t default_horizon(const RateReport& r) {
  constexpr std::size_t cap = 1000000;
  if (!(r.rho_gd > 0.0) || r.rho_gd >= 1.0) return 10;
  const double t12 = std::ceil(std::log(1e-12) / std::log(r.rho_gd));
  const double h = 10.0 * std::max(1.0, t12);
  return h > static_cast<double>(cap) ? cap : static_cast<std::size_t>(h);
}

double optimal_alpha(const SpectralInfo& s, double beta) {
  if (!(beta > 0.0)) throw InvalidArgument("optimal_alpha: beta must be positive");
  return 2.0 / (s.lambda + s.gamma + 2.0 * beta);
}

double optimal_delta_ipg(const SpectralInfo& s, double beta) {
  if (!(beta > 0.0)) throw InvalidArgument("optimal_delta_ipg: beta must be positive");
  return 2.0 / (s.lambda / (s.lambda + beta) + s.gamma / (s.gamma + beta));
}

double optimal_delta_dgd(const SpectralInfo& s) { return 2.0 / (s.lambda + s.gamma); }

std::string rates_to_json(const SpectralInfo& s, const RateReport& r,
                          const std::optional<std::size_t>& t_sw) {
  nlohmann::json j;
  j["lambda"] = s.lambda;
  j["gamma"] = s.gamma;
  j["kappa"] = s.kappa;
  j["rho_gd"] = r.rho_gd;
  j["rho_star_k"] = r.rho_star_k;
  j["rho_star_beta"] = r.rho_star_beta;
  j["sigma0"] = r.sigma_0;
  if (t_sw)
    j["t_sw"] = *t_sw;
  else
    j["t_sw"] = "none within horizon";
  return j.dump(2);
}

}  // namespace pdls
