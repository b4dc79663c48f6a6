#include <cmath>

#include <doctest.h>

#include "dnspec/hspace.hpp"
#include "dnspec/pdo.hpp"
#include "oracles.hpp"

using namespace dnspec;

namespace {

DNSystem system_from(const char* json) {
  return DNSystem::from_json(nlohmann::json::parse(json));
}

const char* kOneMinusLaplace = R"({"p":1,"n":2,"ops":[[{"terms":[
  {"mu":[0,0],"coeff":{"re":1.0}},
  {"mu":[2,0],"coeff":{"re":1.0}},
  {"mu":[0,2],"coeff":{"re":1.0}}]}]],"dn":{"l":[0],"m":[2]}})";

const char* kMinusLaplace = R"({"p":1,"n":2,"ops":[[{"terms":[
  {"mu":[2,0],"coeff":{"re":1.0}},
  {"mu":[0,2],"coeff":{"re":1.0}}]}]],"dn":{"l":[0],"m":[2]}})";

const char* kCauchyRiemann = R"({"p":2,"n":2,"ops":[
  [{"terms":[{"mu":[1,0],"coeff":{"re":1.0}}]},
   {"terms":[{"mu":[0,1],"coeff":{"re":-1.0}}]}],
  [{"terms":[{"mu":[0,1],"coeff":{"re":1.0}}]},
   {"terms":[{"mu":[1,0],"coeff":{"re":1.0}}]}]],
  "dn":{"l":[0,0],"m":[1,1]}})";

const char* kMixed = R"({"p":2,"n":2,"ops":[
  [{"terms":[{"mu":[0,0],"coeff":{"re":1.0}},
             {"mu":[2,0],"coeff":{"re":1.0}},
             {"mu":[0,2],"coeff":{"re":1.0}}]},
   {"terms":[{"mu":[1,0],"coeff":{"re":1.0}}]}],
  [{"terms":[{"mu":[1,0],"coeff":{"re":-1.0}}]},
   {"terms":[{"mu":[0,0],"coeff":{"re":1.0}}]}]],
  "dn":{"l":[0,-1],"m":[2,1]}})";

double l2(const VectorField& u) {
  double acc = 0;
  for (int k = 0; k < u.p(); ++k) acc += std::pow(u[k].parseval_l2(), 2);
  return std::sqrt(acc);
}

}  // namespace

TEST_CASE("multiplier application: identity and bracket powers") {
  const Grid g(2, 16);
  const FourierOp id = FourierOp::identity(1, 2);
  const VectorField u = random_vector_field(g, 1, 9);
  VectorField diff = id.apply(u);
  diff -= u;
  CHECK(l2(diff) == doctest::Approx(0.0));

  const FourierOp bracket2 = FourierOp::multiplier(
      1, 2,
      [](const std::array<double, 3>& xi) {
        Eigen::MatrixXcd s(1, 1);
        s(0, 0) = 1.0 + xi[0] * xi[0] + xi[1] * xi[1];
        return s;
      },
      2.0);
  VectorField mode(g, 1);
  mode[0].at_mode({3, 4, 0}) = 1.0;
  const VectorField out = bracket2.apply(mode);
  CHECK(std::abs(out[0].at_mode({3, 4, 0}) - cdouble(26.0, 0.0)) < 1e-12);
}

TEST_CASE("system application matches the alias-free product oracle") {
  TrigPoly trig;
  trig.add({0, 0, 0}, 2.0);
  trig.add({1, 0, 0}, cdouble(0.4, 0.2));
  trig.add({-1, 0, 0}, cdouble(0.4, -0.2));
  DiffOp op;
  op.add({2, 0, 0}, 1.0);
  op.add({1, 0, 0}, trig);
  op.add({0, 0, 0}, cdouble(0.5, 1.0));

  const Grid g(1, 32);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const SpectralField u = random_field(g, seed);
    const SpectralField got = op.apply(u);
    const SpectralField want = oracles::apply_via_products(op, u);
    double err = 0;
    for (std::size_t i = 0; i < got.size(); ++i)
      err = std::max(err, std::abs(got[i] - want[i]));
    CHECK(err < 1e-10 * (1.0 + hnorm(u, ROParam::power(2))));
  }
}

TEST_CASE("system_as_op shares the system symbol") {
  const DNSystem mixed = system_from(kMixed);
  const FourierOp op = FourierOp::from_system(mixed);
  CHECK(op.x_independent());
  const auto s = op.symbol({1, 0, 0});
  CHECK(std::abs(s(0, 0) - cdouble(2, 0)) < 1e-14);
  CHECK(std::abs(s.determinant() - cdouble(3, 0)) < 1e-14);
  CHECK(op.declared_order() == doctest::Approx(2.0));

  const Grid g(2, 16);
  const VectorField u = random_vector_field(g, 2, 3);
  VectorField diff = op.apply(u);
  diff -= mixed.apply(u);
  CHECK(l2(diff) == doctest::Approx(0.0));
}

TEST_CASE("left quantization reduces to the multiplier for frozen symbols") {
  const Grid g(1, 16);
  const auto sym = [](const std::array<double, 3>& xi) {
    Eigen::MatrixXcd s(1, 1);
    s(0, 0) = cdouble(1.0, 0.0) / std::sqrt(1.0 + xi[0] * xi[0]);
    return s;
  };
  const FourierOp mult = FourierOp::multiplier(1, 1, sym, -1.0);
  const FourierOp quant = FourierOp::left_quantized(
      1, 1, [&](const std::array<double, 3>&, const std::array<double, 3>& xi) { return sym(xi); },
      -1.0);
  CHECK_FALSE(quant.x_independent());
  const VectorField u = random_vector_field(g, 1, 21);
  VectorField diff = mult.apply(u);
  diff -= quant.apply(u);
  CHECK(l2(diff) < 1e-12 * l2(u));
}

TEST_CASE("default cutoff radius scans the singular set") {
  const Grid g(2, 16);
  CHECK(default_cutoff_radius(system_from(kOneMinusLaplace), g) == doctest::Approx(0.0));
  // -Delta vanishes only at xi = 0 where <xi> = 1
  CHECK(default_cutoff_radius(system_from(kMinusLaplace), g) == doctest::Approx(2.4));
}

TEST_CASE("parametrix of (1 - Delta) is the exact inverse") {
  const DNSystem sys = system_from(kOneMinusLaplace);
  const Grid g(2, 16);
  const ParametrixBundle b = build_parametrix(sys, g);
  CHECK(b.cutoff_radius == doctest::Approx(0.0));
  CHECK(b.smoothing_modes == 0);
  const auto s = b.B.symbol({3, 4, 0});
  CHECK(std::abs(s(0, 0) - cdouble(1.0 / 26.0, 0.0)) < 1e-15);
  const VectorField u = random_vector_field(g, 1, 5);
  VectorField t1u = b.T1.apply(u);
  CHECK(l2(t1u) == doctest::Approx(0.0));
}

TEST_CASE("parametrix of -Delta smooths exactly the zero mode") {
  const DNSystem sys = system_from(kMinusLaplace);
  const Grid g(2, 16);
  const ParametrixBundle b = build_parametrix(sys, g, 1.2);
  CHECK(b.smoothing_modes == 1);
  const VectorField u = random_vector_field(g, 1, 8);
  // (BA - I)u = -u_hat(0) on the constant mode
  VectorField res = b.B.apply(sys.apply(u));
  res -= u;
  CHECK(std::abs(res[0].at_mode({0, 0, 0}) + u[0].at_mode({0, 0, 0})) < 1e-13);
  double off = 0;
  for (std::size_t i = 0; i < res[0].size(); ++i)
    if (i != g.flat_of_mode({0, 0, 0})) off = std::max(off, std::abs(res[0][i]));
  CHECK(off < 1e-12);
}

TEST_CASE("parametrix identities hold to machine precision") {
  for (const char* json : {kOneMinusLaplace, kMinusLaplace, kCauchyRiemann, kMixed}) {
    const DNSystem sys = system_from(json);
    const Grid g(2, 16);
    const ParametrixBundle b = build_parametrix(sys, g);
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const VectorField u = random_vector_field(g, sys.p, seed);
      VectorField r1 = b.B.apply(sys.apply(u));
      r1 -= u;
      r1 -= b.T1.apply(u);
      CHECK(l2(r1) <= 1e-10 * l2(u));
      VectorField r2 = sys.apply(b.B.apply(u));
      r2 -= u;
      r2 -= b.T2.apply(u);
      CHECK(l2(r2) <= 1e-10 * l2(u));
    }
  }
}

TEST_CASE("parametrix construction names the singular mode") {
  const DNSystem sys = system_from(kMinusLaplace);
  const Grid g(2, 16);
  CHECK_THROWS_WITH_AS(build_parametrix(sys, g, 0.0),
                       doctest::Contains("det A(xi) vanishes at lattice mode (0,0)"),
                       std::runtime_error);
}

TEST_CASE("parametrix blocks respect the dual-order growth bound") {
  const DNSystem mixed = system_from(kMixed);
  std::vector<double> growth;
  for (int N : {16, 32, 64}) {
    const ParametrixBundle b = build_parametrix(mixed, Grid(2, N));
    growth.push_back(b.block_growth.maxCoeff());
    CHECK(b.flagged_modes == 0);
  }
  // |B_kj| <xi>^{m_k + l_j} stays bounded as the lattice grows
  CHECK(growth[2] <= growth[0] * 1.10 + 1e-12);
}

TEST_CASE("operator norms: identity and perfect cancellation") {
  const Grid g(2, 16);
  const OpNorm id =
      op_norm_estimate(FourierOp::identity(1, 2), ROParam::power(1), ROParam::power(1),
                       8, g, 17);
  REQUIRE(id.exact.has_value());
  CHECK(*id.exact == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(id.empirical <= 1.0 + 1e-12);
  CHECK(id.empirical >= 1.0 - 1e-12);  // unit fields map to themselves

  const FourierOp bracket = FourierOp::multiplier(
      1, 2,
      [](const std::array<double, 3>& xi) {
        Eigen::MatrixXcd s(1, 1);
        s(0, 0) = std::pow(1.0 + xi[0] * xi[0] + xi[1] * xi[1], 1.5);
        return s;
      },
      3.0);
  const OpNorm cancel =
      op_norm_estimate(bracket, ROParam::power(1), ROParam::power(-2), 8, g, 23);
  CHECK(*cancel.exact == doctest::Approx(1.0).epsilon(1e-13));

  const DNSystem one_minus = system_from(kOneMinusLaplace);
  const ParametrixBundle b = build_parametrix(one_minus, g);
  const OpNorm bn = op_norm_estimate(b.B, ROParam::power(0), ROParam::power(2), 8, g, 29);
  CHECK(*bn.exact == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("empirical norms never exceed the exact supremum") {
  const Grid g(2, 16);
  const DNSystem cr = system_from(kCauchyRiemann);
  const FourierOp op = FourierOp::from_system(cr);
  for (const auto& phi : {ROParam::power(0), ROParam::power_log(1, 1)}) {
    const OpNorm n = op_norm_estimate(op, phi, phi.scale_power(-1), 40, g, 31);
    REQUIRE(n.exact.has_value());
    CHECK(n.empirical <= *n.exact * (1 + 1e-12));
    CHECK(n.empirical >= 0.2 * *n.exact);  // random fields do reach a fair share
  }
}

TEST_CASE("declared-order mapping stays bounded under refinement") {
  // oscillating order-r multiplier: the H^phi -> H^{phi rho^{-r}} norm must
  // be stable in N for every phi in the battery
  const FourierOp osc = FourierOp::multiplier(
      1, 2,
      [](const std::array<double, 3>& xi) {
        const double t2 = 1.0 + xi[0] * xi[0] + xi[1] * xi[1];
        Eigen::MatrixXcd s(1, 1);
        s(0, 0) = t2 * (2.0 + std::sin(0.5 * std::log(t2)));
        return s;
      },
      2.0);
  const ROParam battery[] = {ROParam::power(0), ROParam::power(1.5),
                             ROParam::power_log(0, 1), ROParam::power_sin_log(0, 1)};
  for (const auto& phi : battery) {
    std::vector<double> norms;
    for (int N : {16, 32, 64}) {
      const std::vector<ROParam> src(1, phi), dst(1, phi.scale_power(-2));
      norms.push_back(exact_weighted_norm(osc, src, dst, Grid(2, N)));
    }
    for (std::size_t i = 1; i < norms.size(); ++i) {
      CHECK(norms[i] / norms[i - 1] <= 1.10);
      CHECK(norms[i] / norms[i - 1] >= 1.0 - 1e-12);
    }
  }
}

TEST_CASE("smoothing part of the parametrix is bounded in every weight pair") {
  const DNSystem sys = system_from(kMinusLaplace);
  for (double s : {-4.0, 0.0, 4.0})
    for (double sp : {-4.0, 0.0, 4.0}) {
      std::vector<double> norms;
      for (int N : {16, 32, 64}) {
        const Grid g(2, N);
        const ParametrixBundle b = build_parametrix(sys, g);
        const std::vector<ROParam> src(1, ROParam::power(s)), dst(1, ROParam::power(sp));
        norms.push_back(exact_weighted_norm(b.T1, src, dst, g));
      }
      // finite-rank support: the norm freezes once the ball is resolved
      CHECK(norms[0] == doctest::Approx(norms[1]).epsilon(1e-12));
      CHECK(norms[1] == doctest::Approx(norms[2]).epsilon(1e-12));
    }
}

TEST_CASE("growth constants certify the declared order spot-check") {
  const DNSystem mixed = system_from(kMixed);
  const Grid g(2, 32);
  const FourierOp op = FourierOp::from_system(mixed);
  const double c = op.growth_constant(g);
  CHECK(std::isfinite(c));
  CHECK(c > 0);
  const ParametrixBundle b = build_parametrix(mixed, g);
  CHECK(std::isfinite(b.B.growth_constant(g)));
}
