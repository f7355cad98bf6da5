#include <doctest.h>

#include <set>

#include "pdls/verify.hpp"

using namespace pdls;

TEST_CASE("property suite passes on the default seed") {
  VerifyOptions opt;
  opt.seed = 1;
  opt.instances = 20;
  for (const auto& res : run_property_suite(opt)) {
    INFO(res.name, ": ", res.detail);
    CHECK(res.pass);
  }
}

TEST_CASE("property suite passes across ten seeds") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    VerifyOptions opt;
    opt.seed = seed;
    opt.instances = 6;
    for (const auto& res : run_property_suite(opt)) {
      INFO("seed ", seed, " ", res.name, ": ", res.detail);
      CHECK(res.pass);
    }
  }
}

TEST_CASE("a corrupted rho*_K formula trips exactly the named properties") {
  VerifyOptions opt;
  opt.seed = 1;
  opt.instances = 6;
  opt.inject_wrong_rho_k = true;
  std::set<std::string> failed;
  for (const auto& res : run_property_suite(opt))
    if (!res.pass) failed.insert(res.name);
  CHECK(failed == std::set<std::string>{"rate-ordering", "rates-rhoK-vs-kappa-form"});
}

TEST_CASE("instance set is deterministic and within the size contract") {
  const auto a = property_instances(5, 12);
  const auto b = property_instances(5, 12);
  REQUIRE(a.size() == 13);  // oracle + 12
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].beta == b[i].beta);
    CHECK(a[i].problem.A == b[i].problem.A);
    CHECK(a[i].problem.A.cols() <= 20);
    CHECK(a[i].problem.A.rows() >= a[i].problem.A.cols());
    CHECK(a[i].beta > 0.0);
  }
}
