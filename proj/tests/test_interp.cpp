#include <cmath>

#include <doctest.h>

#include "dnspec/hspace.hpp"
#include "dnspec/interp.hpp"
#include "oracles.hpp"

using namespace dnspec;

TEST_CASE("generating spectrum of Sobolev pairs") {
  const Grid g(2, 16);
  const AdmissiblePair pair = AdmissiblePair::sobolev(0, 2, g);
  const auto j = generating_spectrum(pair);
  CHECK(j[g.flat_of_mode({3, 4, 0})] == doctest::Approx(26.0).epsilon(1e-14));
  CHECK(j[g.flat_of_mode({0, 0, 0})] == doctest::Approx(1.0));

  const AdmissiblePair same = AdmissiblePair::sobolev(1.5, 1.5, g);
  for (double v : generating_spectrum(same)) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("the generating operator is an isometry X1 -> X0") {
  const Grid g(2, 16);
  const AdmissiblePair pair = AdmissiblePair::sobolev(-1, 1, g);
  const auto j = generating_spectrum(pair);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SpectralField w = random_field(g, seed);
    SpectralField jw = w;
    for (std::size_t i = 0; i < w.size(); ++i) jw[i] *= j[i];
    CHECK(oracles::rel_err(hnorm(jw, pair.x0_weight), hnorm(w, pair.x1_weight)) < 1e-12);
  }
}

TEST_CASE("interp_norm endpoints: psi = 1 and psi = t") {
  const Grid g(1, 32);
  const AdmissiblePair pair = AdmissiblePair::sobolev(-0.5, 2, g);
  const SpectralField w = random_field(g, 12);
  CHECK(oracles::rel_err(interp_norm(pair, [](double) { return 1.0; }, w),
                         hnorm(w, pair.x0_weight)) < 1e-13);
  CHECK(oracles::rel_err(interp_norm(pair, [](double t) { return t; }, w),
                         hnorm(w, pair.x1_weight)) < 1e-13);
  CHECK_THROWS_AS(interp_norm(pair, [](double) { return -1.0; }, w), std::runtime_error);
}

TEST_CASE("interpolation with the derived parameter recovers the weighted norm") {
  const Grid g(2, 16);
  // per-mode identity: <xi>^{s0} psi(<xi>^{s1-s0}) = phi(<xi>)
  const struct {
    ROParam phi;
    double s0, s1;
  } cases[] = {
      {ROParam::power(1), 0, 2},
      {ROParam::power(-1.5), -3, 0},
      {ROParam::power_log(0, 1), -1, 1},
      {ROParam::power_log(2, 3), 0, 4},
      {ROParam::power_sin_log(0, 1), -2, 2},
  };
  for (const auto& c : cases) {
    const Report rep = verify_prop1(c.phi, c.s0, c.s1, 100, g, 99);
    CHECK(rep.passed());
    CHECK(rep.constants.at("max_rel_dev").get<double>() <= 1e-10);
  }
}

TEST_CASE("zero-mode fields exercise the low-spectrum branch") {
  const Grid g(2, 16);
  const ROParam phi = ROParam::power_log(0, 1);
  const auto psi = interp_psi(phi, -1, 1);
  const AdmissiblePair pair = AdmissiblePair::sobolev(-1, 1, g);
  SpectralField w(g);
  w.at_mode({0, 0, 0}) = cdouble(2.5, -1.0);
  const double want = phi(1.0) * std::abs(w.at_mode({0, 0, 0}));
  CHECK(oracles::rel_err(interp_norm(pair, psi, w), want) < 1e-14);
  CHECK(oracles::rel_err(hnorm(w, phi), want) < 1e-14);
}

TEST_CASE("direct sums interpolate componentwise with equality of norms") {
  const Grid g(2, 16);
  const auto psi = interp_psi(ROParam::power(1), 0, 2);

  std::vector<AdmissiblePair> single{AdmissiblePair::sobolev(0, 2, g)};
  CHECK(verify_prop3(single, psi.fn, 20, 1).passed());

  // field supported in one component: the sum norm equals that component's
  std::vector<AdmissiblePair> twin{AdmissiblePair::sobolev(0, 2, g),
                                   AdmissiblePair::sobolev(0, 2, g)};
  SpectralField w = random_field(g, 4);
  const double lone = interp_norm(twin[0], psi, w);
  double direct = 0;
  {
    const auto j = generating_spectrum(twin[0]);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double wgt = twin[0].x0_weight(g.bracket(i)) * psi(j[i]);
      direct += wgt * wgt * std::norm(w[i]);
    }
  }
  CHECK(oracles::rel_err(lone, std::sqrt(direct)) < 1e-13);

  std::vector<AdmissiblePair> mixed{AdmissiblePair::sobolev(0, 2, g),
                                    AdmissiblePair::sobolev(-1, 1, g),
                                    AdmissiblePair::sobolev(1, 3, g)};
  const Report rep = verify_prop3(mixed, psi.fn, 50, 77);
  CHECK(rep.passed());
  CHECK(rep.constants.at("max_rel_dev").get<double>() <= 1e-10);

  const Grid other(2, 32);
  std::vector<AdmissiblePair> clash{AdmissiblePair::sobolev(0, 2, g),
                                    AdmissiblePair::sobolev(0, 2, other)};
  CHECK_THROWS_AS(verify_prop3(clash, psi.fn, 1, 0), std::invalid_argument);
}

TEST_CASE("equal-gap operator transfer: interpolated norm equals the endpoints") {
  const Grid g(2, 16);
  // order-r multiplier between Sobolev pairs with a common gap: per mode the
  // psi weights cancel, so all three norms coincide
  const FourierOp op = FourierOp::multiplier(
      1, 2,
      [](const std::array<double, 3>& xi) {
        const double t2 = 1.0 + xi[0] * xi[0] + xi[1] * xi[1];
        Eigen::MatrixXcd s(1, 1);
        s(0, 0) = t2 * (1.5 + std::cos(std::log(t2)));
        return s;
      },
      2.0);
  const double s0 = 0, s1 = 2, r = 2;
  const auto psi = interp_psi(ROParam::power(1), s0, s1);
  const std::vector<ROParam> e0s{ROParam::power(s0)}, e0d{ROParam::power(s0 - r)};
  const std::vector<ROParam> e1s{ROParam::power(s1)}, e1d{ROParam::power(s1 - r)};
  const double n0 = exact_weighted_norm(op, e0s, e0d, g);
  const double n1 = exact_weighted_norm(op, e1s, e1d, g);
  // interpolated route: weights x0 psi(j) on both sides
  double sup = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto m = g.mode_at(i);
    const double t = g.bracket(i);
    const double src = std::pow(t, s0) * psi(std::pow(t, s1 - s0));
    const double dst = std::pow(t, s0 - r) * psi(std::pow(t, s1 - s0));
    const double sym = std::abs(op.symbol({double(m[0]), double(m[1]), 0})(0, 0));
    sup = std::max(sup, sym * dst / src);
  }
  CHECK(sup <= std::max(n0, n1) * (1 + 1e-12));
  CHECK(sup == doctest::Approx(n0).epsilon(1e-12));
  CHECK(sup == doctest::Approx(n1).epsilon(1e-12));
}

TEST_CASE("the interpolated space embeds continuously into X0") {
  const Grid g(1, 32);
  const AdmissiblePair pair = AdmissiblePair::sobolev(0, 2, g);
  const auto psi = interp_psi(ROParam::power(1), 0, 2);
  const auto j = generating_spectrum(pair);
  double inv_min_psi = 0;
  for (double v : j) inv_min_psi = std::max(inv_min_psi, 1.0 / psi(v));
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const SpectralField w = random_field(g, seed);
    CHECK(hnorm(w, pair.x0_weight) <=
          inv_min_psi * interp_norm(pair, psi, w) * (1 + 1e-12));
  }
}
