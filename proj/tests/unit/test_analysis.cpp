#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "pdls/analysis.hpp"
#include "pdls/fixtures.hpp"

using namespace pdls;

TEST_CASE("spectral_extremes") {
  const SpectralInfo s = spectral_extremes(DenseMatrix::from_rows({{4, 0}, {0, 1}}));
  CHECK(s.lambda == doctest::Approx(4.0));
  CHECK(s.gamma == doctest::Approx(1.0));
  CHECK(s.kappa == doctest::Approx(4.0));

  const SpectralInfo id = spectral_extremes(DenseMatrix::identity(5));
  CHECK(id.lambda == doctest::Approx(1.0));
  CHECK(id.gamma == doctest::Approx(1.0));
  CHECK(id.kappa == doctest::Approx(1.0));

  CHECK_THROWS_AS(spectral_extremes(gram(rank_deficient_fixture().A)), AssumptionViolated);
}

TEST_CASE("compute_rates closed forms") {
  const SpectralInfo s{4.0, 1.0, 4.0};
  const DenseMatrix zeros(2, 2, 0.0);
  const DenseMatrix k_star = DenseMatrix::from_rows({{0.2, 0}, {0, 0.5}});
  const RateReport r = compute_rates(s, 1.0, 1.0, zeros, k_star);
  CHECK(r.rho_gd == doctest::Approx(0.6));
  CHECK(r.rho_star_k == doctest::Approx(3.0 / 7.0));
  CHECK(r.rho_star_beta == doctest::Approx(3.0 / 13.0));
  CHECK(r.sigma_0 == doctest::Approx(4.0 * std::sqrt(0.29)));  // delta=1
  CHECK(r.beta == 1.0);
  CHECK(r.delta == 1.0);

  // perfectly conditioned: all rates zero
  const SpectralInfo flat{2.0, 2.0, 1.0};
  const DenseMatrix ks = scaled(DenseMatrix::identity(2), 1.0 / 3.0);
  const RateReport r0 = compute_rates(flat, 1.0, 1.0, ks, ks);
  CHECK(r0.rho_gd == 0.0);
  CHECK(r0.rho_star_k == 0.0);
  CHECK(r0.rho_star_beta == 0.0);
  CHECK(r0.sigma_0 == 0.0);
}

TEST_CASE("kstar_oracle") {
  const DenseMatrix k = kstar_oracle(DenseMatrix::from_rows({{4, 0}, {0, 1}}), 1.0);
  CHECK(k(0, 0) == doctest::Approx(0.2));
  CHECK(k(1, 1) == doctest::Approx(0.5));
  CHECK(k(0, 1) == 0.0);

  // pure shift: AtA = 0, beta = 2 gives (1/2) I
  const DenseMatrix half = kstar_oracle(DenseMatrix(2, 2, 0.0), 2.0);
  CHECK(max_abs_diff(half, scaled(DenseMatrix::identity(2), 0.5)) <= 1e-15);

  // residual oracle on random SPD
  const Problem p = random_problem(9, 14, 6);
  const DenseMatrix ata = gram(p.A);
  const DenseMatrix ks = kstar_oracle(ata, 0.8);
  const DenseMatrix resid = sub(matmul(add_scaled_identity(ata, 0.8), ks),
                                DenseMatrix::identity(6));
  CHECK(frobenius_norm(resid) <= 1e-8 * frobenius_norm(add_scaled_identity(ata, 0.8)));
}

TEST_CASE("verify_preconditioned_spectrum on the oracle and in the large-beta limit") {
  const auto rep = verify_preconditioned_spectrum(DenseMatrix::from_rows({{4, 0}, {0, 1}}), 1.0);
  CHECK(rep.ok);
  CHECK(rep.smallest == doctest::Approx(0.5));
  CHECK(rep.largest == doctest::Approx(0.8));
  CHECK(rep.positive_definite);

  // beta >> lambda: extremes approach lambda/beta, gamma/beta, so their
  // ratio approaches kappa
  const DenseMatrix ata = DenseMatrix::from_rows({{2, 0}, {0, 0.5}});
  const auto lim = verify_preconditioned_spectrum(ata, 1e6);
  CHECK(lim.ok);
  CHECK(lim.largest / lim.smallest == doctest::Approx(4.0).epsilon(1e-4));

  // all eigenvalues of K* AtA sit in (0, 1) for beta > 0
  const Problem p = random_problem(19, 16, 7);
  const auto rnd = verify_preconditioned_spectrum(gram(p.A), 5.0);
  CHECK(rnd.ok);
  CHECK(rnd.largest < 1.0);
  CHECK(rnd.smallest > 0.0);
}

TEST_CASE("bound_sequences: transient-free case") {
  RateReport r;
  r.rho_gd = 0.6;
  r.rho_star_k = 3.0 / 7.0;
  r.rho_star_beta = 3.0 / 13.0;
  r.sigma_0 = 0.0;
  const BoundSequences b = bound_sequences(r, 2.0, 30);
  REQUIRE(b.t_sw.has_value());
  CHECK(*b.t_sw == 1);
  CHECK(b.E1[0] == doctest::Approx(2.0));
  for (std::size_t t = 1; t <= 30; ++t) {
    CHECK(b.E1[t] == doctest::Approx(2.0 * std::pow(r.rho_star_beta, double(t))));
    CHECK(b.E1[t] < b.E2[t]);
  }
}

TEST_CASE("bound_sequences on the 2x2 oracle matches direct evaluation") {
  // delta = 1, K(-1) = 0: sigma_0 = 1 * 4 * ||K*||_F = 2.1541
  const SpectralInfo s{4.0, 1.0, 4.0};
  const DenseMatrix k_star = DenseMatrix::from_rows({{0.2, 0}, {0, 0.5}});
  const RateReport r = compute_rates(s, 1.0, 1.0, DenseMatrix(2, 2, 0.0), k_star);
  CHECK(r.sigma_0 == doctest::Approx(2.154066).epsilon(1e-6));

  const double z0 = std::sqrt(2.0);
  const BoundSequences b = bound_sequences(r, z0, 50);

  // independent direct evaluation of both sequences
  double e1 = z0;
  std::size_t expected_t_sw = 0;
  for (std::size_t t = 1; t <= 50; ++t) {
    e1 *= r.rho_star_beta + r.sigma_0 * std::pow(r.rho_star_k, double(t));
    const double e2 = z0 * std::pow(r.rho_gd, double(t));
    CHECK(b.E1[t] == doctest::Approx(e1).epsilon(1e-12));
    CHECK(b.E2[t] == doctest::Approx(e2).epsilon(1e-12));
    if (expected_t_sw == 0 && e1 < e2) expected_t_sw = t;  // monotone ratio afterward
  }
  REQUIRE(b.t_sw.has_value());
  CHECK(*b.t_sw == expected_t_sw);
  CHECK(*b.t_sw == 4);  // frozen from the direct evaluation
}

TEST_CASE("bound_sequences survives ill-conditioned scales in log space") {
  RateReport r;
  r.rho_gd = 1.0 - 3.4e-8;
  r.rho_star_k = 1.0 - 1.6e-6;
  r.rho_star_beta = 0.9583;
  r.sigma_0 = 5.0e7;
  const BoundSequences b = bound_sequences(r, 20.0, 200000);
  // E1 grows far past double range; values saturate but logs stay finite
  CHECK(std::isinf(b.E1[100000]));
  CHECK(std::isfinite(b.log_E1[100000]));
  CHECK_FALSE(b.t_sw.has_value());  // crossover far beyond this horizon
  // bit-exact reproducibility
  const BoundSequences c = bound_sequences(r, 20.0, 200000);
  CHECK(b.log_E1 == c.log_E1);
  CHECK(b.log_E2 == c.log_E2);
}

TEST_CASE("default_horizon") {
  RateReport fast;
  fast.rho_gd = 0.5;
  CHECK(default_horizon(fast) == 10 * 40);  // ceil(ln 1e-12 / ln 0.5) = 40
  RateReport slow;
  slow.rho_gd = 1.0 - 3.4e-8;
  CHECK(default_horizon(slow) == 1000000);  // capped
}

TEST_CASE("verify_k_contraction") {
  const DenseMatrix ata = DenseMatrix::from_rows({{4, 0}, {0, 1}});

  const auto ok = verify_k_contraction(ata, 1.0, 2.0 / 7.0, 30);
  CHECK(ok.ok);
  CHECK(ok.worst_factor_ratio <= 1.0 + 1e-8);

  // K(-1) = K* is the fixed point
  const DenseMatrix k_star = kstar_oracle(ata, 1.0);
  const auto conv = verify_k_contraction(ata, 1.0, 2.0 / 7.0, 10, &k_star);
  CHECK(conv.ok);
  CHECK(conv.already_converged);

  // alpha outside (0, 2/(lambda+beta)) = (0, 0.4) diverges
  const auto bad = verify_k_contraction(ata, 1.0, 0.5, 30);
  CHECK_FALSE(bad.ok);
  CHECK(bad.message.find("outside convergent range") != std::string::npos);
}

TEST_CASE("optimal parameters on the oracle") {
  const SpectralInfo s{4.0, 1.0, 4.0};
  CHECK(optimal_alpha(s, 1.0) == doctest::Approx(2.0 / 7.0));
  CHECK(optimal_delta_ipg(s, 1.0) == doctest::Approx(20.0 / 13.0));
  CHECK(optimal_delta_dgd(s) == doctest::Approx(0.4));
}

TEST_CASE("rates JSON carries the fixed key set") {
  const SpectralInfo s{4.0, 1.0, 4.0};
  const DenseMatrix k_star = DenseMatrix::from_rows({{0.2, 0}, {0, 0.5}});
  const RateReport r = compute_rates(s, 1.0, 1.0, DenseMatrix(2, 2, 0.0), k_star);

  const auto j = nlohmann::json::parse(rates_to_json(s, r, 4));
  for (const char* key :
       {"lambda", "gamma", "kappa", "rho_gd", "rho_star_k", "rho_star_beta", "sigma0", "t_sw"})
    CHECK(j.contains(key));
  CHECK(j["t_sw"] == 4);
  CHECK(j["rho_gd"] == doctest::Approx(0.6));

  const auto none = nlohmann::json::parse(rates_to_json(s, r, std::nullopt));
  CHECK(none["t_sw"] == "none within horizon");
}
