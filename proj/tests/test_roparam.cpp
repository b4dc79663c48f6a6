#include <cmath>

#include <doctest.h>

#include "dnspec/roparam.hpp"
#include "oracles.hpp"

using namespace dnspec;

TEST_CASE("eval of built-in kinds") {
  CHECK(ROParam::power(2)(3.0) == doctest::Approx(9.0).epsilon(1e-14));
  CHECK(ROParam::power_log(0, 1)(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  // sin(ln e^{pi/2}) = 1
  const double t = std::exp(M_PI / 2);
  CHECK(ROParam::power_sin_log(1, 1)(t) ==
        doctest::Approx(t * std::exp(1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(ROParam::power(1)(0.5), std::domain_error);
  CHECK_THROWS_AS(ROParam::custom([](double) { return -1.0; })(2.0), std::runtime_error);
}

TEST_CASE("eval positive and finite over the working range") {
  const ROParam battery[] = {ROParam::power(7), ROParam::power(-7),
                             ROParam::power_log(2, 3), ROParam::power_log(-2, -3),
                             ROParam::power_sin_log(0, 1)};
  for (const auto& phi : battery)
    for (double t = 1.0; t <= 1e8; t *= 3.7) {
      const double v = phi(t);
      CHECK(v > 0);
      CHECK(std::isfinite(v));
    }
}

TEST_CASE("representation kind matches the closed form it encodes") {
  // alpha = s constant, beta = 0 gives exp(s ln t) = t^s
  const ROParam rep = ROParam::representation([](double) { return 1.5; },
                                              [](double) { return 0.0; });
  for (double t : {1.0, 2.0, 37.0, 1e4})
    CHECK(oracles::rel_err(rep(t), std::pow(t, 1.5)) < 1e-9);
  // alpha = cos(ln tau), beta = 0 gives exp(sin(ln t))
  const ROParam osc = ROParam::representation(
      [](double tau) { return std::cos(std::log(tau)); }, [](double) { return 0.0; });
  for (double t : {1.0, 5.0, 300.0})
    CHECK(oracles::rel_err(osc(t), std::exp(std::sin(std::log(t)))) < 1e-8);
}

TEST_CASE("verify_ro on powers and bounded oscillations") {
  const auto rep1 = verify_ro(ROParam::power(1), 2.0);
  CHECK(rep1.passed());
  CHECK(rep1.constants["c_hat"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));

  const auto rep0 = verify_ro(ROParam::power(0), 10.0);
  CHECK(rep0.constants["c_hat"].get<double>() == doctest::Approx(1.0));

  const auto sin_rep = verify_ro(ROParam::power_sin_log(0, 1), std::exp(1.0));
  const double c_hat = sin_rep.constants["c_hat"].get<double>();
  CHECK(c_hat <= 7.39);
  // brute-force grid maximization of exp(sin(ln t + ln lam) - sin(ln t))
  const double oracle = oracles::ro_constant(ROParam::power_sin_log(0, 1),
                                             std::exp(1.0), 4000, 65);
  CHECK(oracles::rel_err(c_hat, oracle) < 1e-3);
  CHECK(oracle == doctest::Approx(std::exp(2 * std::sin(0.5))).epsilon(1e-4));
}

TEST_CASE("RO constant is submultiplicative across window doubling") {
  // geometric t grid closed under multiplication by the lambda battery
  const double g = std::pow(2.0, 0.25);
  std::vector<double> t_grid;
  for (int k = 0; k <= 80; ++k) t_grid.push_back(std::pow(g, k));
  std::vector<double> lam_a, lam_a2;
  for (int j = 0; j <= 4; ++j) lam_a.push_back(std::pow(g, j));    // up to 2
  for (int j = 0; j <= 8; ++j) lam_a2.push_back(std::pow(g, j));   // up to 4
  std::vector<double> t_inner(t_grid.begin(), t_grid.begin() + 72);
  for (const auto& phi : {ROParam::power_log(1, 2), ROParam::power_sin_log(0.5, 0.7)}) {
    const double ca = verify_ro(phi, 2.0, t_grid, lam_a).constants["c_hat"].get<double>();
    const double ca2 =
        verify_ro(phi, 4.0, t_inner, lam_a2).constants["c_hat"].get<double>();
    CHECK(ca2 <= ca * ca * (1 + 1e-12));
  }
}

TEST_CASE("index estimates are exact for powers") {
  for (double s : {-10.0, -1.5, 0.0, 0.25, 2.0, 10.0}) {
    const auto [lo, hi] = estimate_indices(ROParam::power(s));
    CHECK(std::abs(lo - s) < 1e-9);
    CHECK(std::abs(hi - s) < 1e-9);
  }
}

TEST_CASE("index estimates tighten toward the power for log corrections") {
  std::vector<double> t_hi(400), lam = default_lambda_grid();
  for (int i = 0; i < 400; ++i)
    t_hi[i] = std::exp(std::log(1e4) + (std::log(1e8) - std::log(1e4)) * i / 399.0);
  const auto [lo, hi] = estimate_indices(ROParam::power_log(0, 1), t_hi, lam);
  CHECK(std::abs(lo) <= 0.1);
  CHECK(std::abs(hi) <= 0.1);
  CHECK(lo <= hi);

  // refinement monotonicity: pushing the window out sharpens the estimate
  std::vector<double> t_lo(400);
  for (int i = 0; i < 400; ++i)
    t_lo[i] = std::exp(std::log(1e2) + (std::log(1e4) - std::log(1e2)) * i / 399.0);
  const auto coarse = estimate_indices(ROParam::power_log(0, 1), t_lo, lam);
  CHECK(std::abs(hi) <= std::abs(coarse.second));
}

TEST_CASE("index estimates resolve the oscillation amplitude for sin-log") {
  const auto [lo, hi] = estimate_indices(ROParam::power_sin_log(0, 1));
  // the largest default window lambda = 32 gives 2 sin(ln32/2)/ln32
  const double expected = 2 * std::sin(std::log(32.0) / 2) / std::log(32.0);
  CHECK(std::abs(hi - expected) < 1e-3);
  CHECK(std::abs(lo + expected) < 1e-3);
  CHECK(std::abs(hi - 1.0 / std::sqrt(3.0)) < 0.02);
  CHECK(std::abs(lo + 1.0 / std::sqrt(3.0)) < 0.02);
}

TEST_CASE("scale_power shifts kinds and indices") {
  const ROParam p0 = ROParam::power(2).scale_power(-2);
  CHECK(p0.kind() == ROParam::Kind::power);
  CHECK(p0(17.0) == doctest::Approx(1.0));

  const ROParam pl = ROParam::power_log(1, 1).scale_power(3);
  CHECK(pl(std::exp(1.0)) == doctest::Approx(std::exp(4.0) * 2.0).epsilon(1e-12));

  // estimates shift with the power exactly
  const ROParam sin0 = ROParam::power_sin_log(0, 1);
  const auto base = estimate_indices(sin0);
  const auto shifted = estimate_indices(sin0.scale_power(5));
  CHECK(shifted.first == doctest::Approx(base.first + 5).epsilon(1e-12));
  CHECK(shifted.second == doctest::Approx(base.second + 5).epsilon(1e-12));
  CHECK(*sin0.scale_power(5).declared_sigma0() == doctest::Approx(5.0));
  CHECK(*sin0.scale_power(5).declared_sigma1() == doctest::Approx(5.0));
}

TEST_CASE("reciprocal inverts values and swaps indices") {
  const ROParam r = ROParam::power(3).reciprocal();
  CHECK(r.kind() == ROParam::Kind::power);
  CHECK(r(2.0) == doctest::Approx(std::pow(2.0, -3.0)));

  for (const auto& phi : {ROParam::power_log(2, 3), ROParam::power_sin_log(0, 1),
                          ROParam::representation([](double t) { return std::cos(std::log(t)); },
                                                  [](double) { return 0.1; })}) {
    const ROParam twice = phi.reciprocal().reciprocal();
    for (double t = 1.0; t < 1e5; t *= 9.3)
      CHECK(oracles::rel_err(twice(t), phi(t)) < 1e-9);
  }

  const auto base = estimate_indices(ROParam::power_sin_log(0, 1));
  const auto rec = estimate_indices(ROParam::power_sin_log(0, 1).reciprocal());
  CHECK(rec.first == doctest::Approx(-base.second).epsilon(1e-12));
  CHECK(rec.second == doctest::Approx(-base.first).epsilon(1e-12));
}

TEST_CASE("interp_psi reproduces the closed forms") {
  // phi = t^s collapses to the pure power t^{(s-s0)/(s1-s0)}
  for (double s : {-1.0, 0.5, 2.0}) {
    const auto psi = interp_psi(ROParam::power(s), s - 1.5, s + 2.5);
    CHECK(psi.certified);
    for (double t : {1.0, 2.0, 100.0, 3e5}) {
      const double want = std::pow(t, (s - (s - 1.5)) / 4.0);
      CHECK(oracles::rel_err(psi(t), want) < 1e-12);
    }
  }
  // boundary branch
  const auto psi = interp_psi(ROParam::power_log(0, 1), -1, 1);
  CHECK(psi(1.0) == doctest::Approx(1.0));
  CHECK(psi(0.5) == doctest::Approx(1.0));  // t < 1 branch returns phi(1)
  CHECK(psi(std::exp(2.0)) == doctest::Approx(2.0 * std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("interp_psi rejects exponents inside the index interval") {
  CHECK_THROWS_AS(interp_psi(ROParam::power(2), 2.0, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(interp_psi(ROParam::power(2), 1.0, 2.0), std::invalid_argument);
  // custom kinds have no declared indices: estimates plus uncertified flag
  const ROParam c = ROParam::custom([](double t) { return std::sqrt(t); });
  const auto psi = interp_psi(c, -1.0, 2.0);
  CHECK_FALSE(psi.certified);
}

TEST_CASE("param spec and JSON round trips") {
  const ROParam a = param_from_spec("power:1.5");
  CHECK(a.kind() == ROParam::Kind::power);
  CHECK(a(2.0) == doctest::Approx(std::pow(2.0, 1.5)));
  const ROParam b = param_from_spec("powersinlog:0,1");
  CHECK(b.kind() == ROParam::Kind::powersinlog);
  CHECK_THROWS_AS(param_from_spec("power:1,2"), std::invalid_argument);
  CHECK_THROWS_AS(param_from_spec("gauss:1"), std::invalid_argument);

  const ROParam c = param_from_json(param_to_json(ROParam::power_log(2, 3)));
  CHECK(c(7.0) == doctest::Approx(ROParam::power_log(2, 3)(7.0)));
}
