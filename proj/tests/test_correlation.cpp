#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"

using namespace eprb;
using testing_support::random_disc;
using testing_support::random_unit;

namespace {

constexpr std::size_t kN = 100000;

const LambdaSampler& sphere() {
  static const LambdaSampler s = LambdaSampler::uniform_sphere(2024);
  return s;
}

}  // namespace

TEST_CASE("dichotomic estimates with zero spread") {
  const UnitVector3 a(0, 0, 1);
  const auto c = estimate_correlation(constant_model(+1, -1), a, UnitVector3(1, 0, 0), sphere(), 1000);
  CHECK(c.value == -1.0);
  CHECK(c.std_error == 0.0);
  CHECK_FALSE(c.exact);

  std::mt19937_64 rng(1);
  for (int i = 0; i < 10; ++i) {
    const UnitVector3 v = random_unit(rng);
    const auto e = estimate_correlation(local_sign_model(), v, v, sphere(), 5000);
    CHECK(e.value == -1.0);
    CHECK(e.std_error == 0.0);
  }
  CHECK_THROWS_AS(estimate_correlation(local_sign_model(), a, a, sphere(), 1), std::invalid_argument);
}

TEST_CASE("sign model curve against quadrature") {
  const UnitVector3 a(0, 0, 1);
  for (int i = 0; i < 19; ++i) {
    const double theta = std::numbers::pi * i / 18.0;
    const double oracle = testing_support::sign_model_quadrature(theta);
    CHECK(std::abs(oracle - (-1.0 + 2.0 * theta / std::numbers::pi)) < 1e-6);
    const auto e = estimate_correlation(local_sign_model(), a, unit_from_plane_angle(theta), sphere(), kN);
    CHECK(std::abs(e.value - oracle) <= 4 * e.std_error + 1e-6);
    CHECK(e.value >= -1.0);
    CHECK(e.value <= 1.0);
  }
}

TEST_CASE("orthogonal sign model is uncorrelated") {
  const auto e = estimate_correlation(local_sign_model(), UnitVector3(0, 0, 1), UnitVector3(1, 0, 0),
                                      sphere(), kN);
  CHECK(std::abs(e.value) <= 4 * e.std_error);
}

TEST_CASE("stochastic estimates") {
  const UnitVector3 ez(0, 0, 1);
  const auto coin = estimate_stochastic_correlation(coin_model(), ez, ez, sphere(), 1000);
  CHECK(coin.value == 0.0);
  CHECK(coin.std_error == 0.0);

  const double third = testing_support::sphere_z_average([](double z) { return z * z; });
  const auto lin = estimate_stochastic_correlation(linear_model(), ez, ez, sphere(), kN);
  CHECK(std::abs(lin.value + third) <= 4 * lin.std_error);

  const auto moments = testing_support::sphere_second_moments();
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const UnitVector3 a = random_unit(rng), b = random_unit(rng);
    const double av[3] = {a.x(), a.y(), a.z()}, bv[3] = {b.x(), b.y(), b.z()};
    double oracle = 0.0;
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s) oracle -= av[r] * moments.m[r][s] * bv[s];
    CHECK(std::abs(oracle + dot(a, b) / 3.0) < 1e-5);
    const auto e = estimate_stochastic_correlation(linear_model(), a, b, sphere(), kN);
    CHECK(std::abs(e.value - oracle) <= 4 * e.std_error + 1e-5);
    CHECK(std::abs(e.value) <= 1.0 + 1e-12);
  }
}

TEST_CASE("embedded deterministic model reproduces the dichotomic estimate") {
  std::mt19937_64 rng(3);
  const StochasticModel embedded = embed_deterministic(local_sign_model());
  for (int i = 0; i < 5; ++i) {
    const UnitVector3 a = random_unit(rng), b = random_unit(rng);
    const auto d = estimate_correlation(local_sign_model(), a, b, sphere(), 20000);
    const auto s = estimate_stochastic_correlation(embedded, a, b, sphere(), 20000);
    CHECK(d.value == s.value);
    CHECK(d.std_error == s.std_error);
  }
}

TEST_CASE("joint tables") {
  const UnitVector3 ez(0, 0, 1);
  const JointTable coin = estimate_joint(coin_model(), ez, ez, sphere(), 1000);
  CHECK(coin.pp.p == 0.25);
  CHECK(coin.mm.p == 0.25);
  CHECK(coin.pm.p == 0.25);
  CHECK(coin.mp.p == 0.25);

  const JointTable constant = estimate_joint(embed_deterministic(constant_model(+1, -1)), ez, ez, sphere(), 1000);
  CHECK(constant.pm.p == 1.0);
  CHECK(constant.pp.p == 0.0);
  CHECK(constant.mm.p == 0.0);
  CHECK(constant.mp.p == 0.0);

  const double sixth = testing_support::sphere_z_average([](double z) { return (1 + z) * (1 - z) / 4; });
  CHECK(std::abs(sixth - 1.0 / 6.0) < 1e-9);
  const JointTable lin = estimate_joint(linear_model(), ez, ez, sphere(), kN);
  CHECK(std::abs(lin.pp.p - sixth) <= 4 * lin.pp.std_error);

  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const UnitVector3 a = random_unit(rng), b = random_unit(rng);
    const JointTable t = estimate_joint(linear_model(), a, b, sphere(), 20000);
    CHECK(std::abs(t.sum() - 1.0) <= 1e-12);
    for (double p : {t.pp.p, t.mm.p, t.pm.p, t.mp.p}) CHECK(p >= 0.0);
    const auto e = estimate_stochastic_correlation(linear_model(), a, b, sphere(), 20000);
    CHECK(std::abs(t.correlation() - e.value) <= 1e-12);
  }
}

TEST_CASE("quantum correlation") {
  const UnitVector3 ez(0, 0, 1), ex(1, 0, 0);
  CHECK(quantum_correlation(ez, ez).value == -1.0);
  CHECK(quantum_correlation(ez, ez).exact);
  CHECK(quantum_correlation(ez, ez).std_error == 0.0);
  CHECK(quantum_correlation(ez, ex).value == 0.0);
  CHECK(quantum_correlation(ez, -ez).value == 1.0);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const UnitVector3 a = random_unit(rng), b = random_unit(rng);
    CHECK(quantum_correlation(a, b).value == quantum_correlation(b, a).value);
    CHECK(quantum_correlation(a, a).value == -1.0);
    CHECK(std::abs(quantum_correlation(a, b).value + dot(a, b)) < 1e-15);
  }
}

TEST_CASE("quantum correlation in stereographic coordinates") {
  const auto inf = RiemannPoint::infinity();
  CHECK(quantum_correlation_complex(inf, inf) == -1.0);
  CHECK(quantum_correlation_complex(RiemannPoint(0, 0), inf) == 1.0);
  CHECK(quantum_correlation_complex(inf, RiemannPoint(0, 0)) == 1.0);
  CHECK(quantum_correlation_complex(RiemannPoint(1, 0), RiemannPoint(1, 0)) == -1.0);

  std::mt19937_64 rng(6);
  auto check = [](const RiemannPoint& z, const RiemannPoint& w) {
    const double ref = -dot(stereographic_project(z), stereographic_project(w));
    CHECK(std::abs(quantum_correlation_complex(z, w) - ref) < 1e-12);
  };
  for (int i = 0; i < 1000; ++i) {
    const RiemannPoint z(random_disc(rng, 10.0)), w(random_disc(rng, 10.0));
    check(z, w);
    check(z, inf);
    check(inf, w);
  }
  check(inf, inf);
}

TEST_CASE("series correlations are nonpositive") {
  std::mt19937_64 rng(7);
  const SeriesPair delta = impose_anticorrelation(RealAnalyticCoefficients::delta());
  for (int i = 0; i < 50; ++i) {
    const UnitVector3 a = random_unit(rng), b = random_unit(rng);
    const auto e = series_correlation(delta, a, b, sphere(), 1000);
    const double d = dot(a, b);
    CHECK(std::abs(e.value + d * d) < 1e-12);
    CHECK(e.std_error == 0.0);
  }
  const UnitVector3 ez(0, 0, 1);
  CHECK(series_correlation(delta, ez, ez, sphere(), 1000).value == -1.0);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SeriesPair p = impose_anticorrelation(lambda_modulated(RealAnalyticCoefficients::random(3, seed)));
    const UnitVector3 a = random_unit(rng), b = random_unit(rng);
    const auto e = series_correlation(p, a, b, sphere(), 4000);
    CHECK(e.value <= 0.0);
    const auto direct = integrate(
        [&](const LambdaSample& l) { return -p.a_value(a, b, l) * p.a_value(a, b, l); }, sphere(), 4000);
    CHECK(std::abs(e.value - direct.mean) < 1e-12);
  }

  SeriesPair raw(RealAnalyticCoefficients::delta(), RealAnalyticCoefficients::delta());
  CHECK_THROWS_AS(series_correlation(raw, ez, ez, sphere(), 100), std::invalid_argument);
}

TEST_CASE("negativity contrast against the quantum prediction") {
  const SeriesPair p = impose_anticorrelation(RealAnalyticCoefficients::random(3, 1));
  const NegativityContrast c = negativity_contrast(p, UnitVector3(0, 0, 1), sphere(), 1000);
  CHECK(c.quantum.value == 1.0);
  CHECK(c.series.value <= 0.0);
  CHECK(c.contradicts);
}
