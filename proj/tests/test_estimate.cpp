#include <doctest.h>

#include <Eigen/Dense>

#include "cml/equilibria.hpp"
#include "cml/errors.hpp"
#include "cml/estimate.hpp"
#include "cml/stability.hpp"
#include "oracles.hpp"

using namespace cml;

namespace {

const RoundtripItem& item(const RoundtripReport& r, const std::string& name) {
  for (const auto& i : r.items)
    if (i.quantity == name) return i;
  throw std::runtime_error("no item " + name);
}

EstimationInputs preset(const char* name) {
  return load_estimation_inputs(resolve_asset(name, "estimate", ".inputs"));
}

}  // namespace

TEST_CASE("published rates from the published inputs") {
  const auto res = estimate_params(EstimationInputs{});
  const auto& p = res.params;
  CHECK(p.get("k7") == doctest::Approx(5275.488577).epsilon(1e-6));
  CHECK(p.get("k8") == doctest::Approx(471.0257658).epsilon(1e-6));
  CHECK(p.get("k9") == doctest::Approx(3516.987118).epsilon(1e-6));
  CHECK(p.get("k10") == doctest::Approx(1758.493559).epsilon(1e-6));
  CHECK(p.get("b1") == doctest::Approx(3.675213676e-6).epsilon(1e-6));
  CHECK(p.get("k11") == 50);
  CHECK(p.get("k12") == 25);
  CHECK(res.x0 == doctest::Approx(9e5));
  CHECK(res.x1 == doctest::Approx(1e5));
  CHECK(res.y0 == doctest::Approx(9e6));
  CHECK(res.y1 == doctest::Approx(1e6));
}

TEST_CASE("the whole parameter set matches the bundled chronic-phase table") {
  const auto est = estimate_params(EstimationInputs{}).params;
  const auto table = oracle::table2('b');
  for (const auto& name : FullParams::required_names()) {
    CAPTURE(name);
    CHECK(est.get(name) == doctest::Approx(table.get(name)).epsilon(1e-9));
  }
  CHECK(validate(est).empty());
  CHECK(classify_phase(est) == Phase::Chronic);
}

TEST_CASE("the 2x2 system for k8 and k10 agrees with a dense solve") {
  const auto res = estimate_params(EstimationInputs{});
  // Published right-hand sides.
  CHECK(res.differentiation_sum == doctest::Approx(7505).epsilon(1e-12));
  CHECK(res.progenitor_balance == doctest::Approx(-0.007901).epsilon(1e-9));
  Eigen::Matrix2d A;
  A << 1, 4, -11.2, 3;
  const Eigen::Vector2d x = A.partialPivLu().solve(Eigen::Vector2d(7505, -0.007901));
  CHECK(res.params.get("k8") == doctest::Approx(x[0]).epsilon(1e-9));
  CHECK(res.params.get("k10") == doctest::Approx(x[1]).epsilon(1e-9));
  CHECK(res.determinant == doctest::Approx(A.determinant()).epsilon(1e-12));
}

TEST_CASE("quiescence split") {
  auto [c1, q1] = quiescence_split(1e6, 0.0001, 0.0009);
  CHECK(c1 == doctest::Approx(9e5));
  CHECK(q1 == doctest::Approx(1e5));
  auto [c2, q2] = quiescence_split(1e7, 0.0001, 0.0009);
  CHECK(c2 == doctest::Approx(9e6));
  CHECK(q2 == doctest::Approx(1e6));
  auto [c3, q3] = quiescence_split(12345, 0.3, 0.3);
  CHECK(c3 == 12345.0 / 2);
  CHECK(q3 == 12345.0 / 2);
  CHECK(c1 + q1 == 1e6);
  CHECK_THROWS_AS(quiescence_split(0, 1, 1), InputError);
  CHECK_THROWS_AS(quiescence_split(1, 0, 1), InputError);
}

TEST_CASE("round trip surfaces the progenitor target discrepancy") {
  const EstimationInputs in;
  const auto p = estimate_params(in).params;
  const auto rep = check_roundtrip(p, in);
  CHECK_FALSE(rep.all_within());

  const auto& x2 = item(rep, "x2*");
  CHECK_FALSE(x2.within);
  CHECK(x2.achieved == doctest::Approx(9.9e7).epsilon(1e-6));
  CHECK(x2.rel_deviation == doctest::Approx(0.01).epsilon(1e-3));

  CHECK(item(rep, "x0*+x1*").rel_deviation < 1e-9);
  CHECK(item(rep, "x0*").within);
  CHECK(item(rep, "x1*").within);
  CHECK(item(rep, "x4*/x3*").achieved == doctest::Approx(100).epsilon(1e-9));
  for (const auto& i : rep.items) {
    CAPTURE(i.quantity);
    CHECK(i.rel_deviation <= 0.011);
  }
}

TEST_CASE("cycling fraction presets") {
  for (auto [name, G] : {std::pair{"g09", 0.9}, {"g01", 0.1}, {"g05", 0.5}}) {
    CAPTURE(name);
    const auto in = preset(name);
    CHECK(in.G == G);
    const auto res = estimate_params(in);
    CHECK(res.params.k(3) / (res.params.k(2) + res.params.k(3)) == doctest::Approx(G).epsilon(1e-12));
    const auto rep = check_roundtrip(res.params, in);
    CHECK(item(rep, "G (E1 cycling fraction)").within);
    CHECK(item(rep, "G (E2 cycling fraction)").within);
    CHECK(item(rep, "x0*+x1*").within);
    CHECK(validate(res.params).empty());
  }
}

TEST_CASE("rounding") {
  CHECK(round_significant(5275.4885771234, 10) == 5275.488577);
  CHECK(round_significant(-0.000123456, 2) == -0.00012);
  CHECK(round_significant(1.0 / 3.0, 0) == 1.0 / 3.0);

  EstimationInputs exact;
  exact.significant_digits = 0;
  const auto full = estimate_params(exact).params;
  const auto rounded = estimate_params(EstimationInputs{}).params;
  CHECK(full.get("k8") == doctest::Approx(rounded.get("k8")).epsilon(1e-9));
  CHECK(rounded.decimal_text("k8") == std::optional<std::string>("471.0257658"));
}

TEST_CASE("inconsistent inputs are rejected") {
  EstimationInputs in;
  in.G = 1;
  CHECK_THROWS_AS(estimate_params(in), InputError);
  in = {};
  in.G = 0;
  CHECK_THROWS_AS(estimate_params(in), InputError);
  in = {};
  in.x2 = -1;
  CHECK_THROWS_AS(estimate_params(in), InputError);
  in = {};
  in.k1 = 0.001;  // no net stem growth
  CHECK_THROWS_AS(estimate_params(in), InputError);
  in = {};
  in.k9_over_k10 = 0;
  CHECK_THROWS_AS(estimate_params(in), InputError);
}

TEST_CASE("inputs file") {
  SUBCASE("periods are converted to rates") {
    const auto in = parse_estimation_inputs("period.k1 = 40\nperiod.k13 = 500\n");
    CHECK(in.k1 == 1.0 / 40);
    CHECK(in.k13 == 1.0 / 500);
  }
  SUBCASE("abnormal multipliers") {
    const auto in = parse_estimation_inputs("abnormal.k17 = 3\n");
    CHECK(in.abnormal_multiplier.at(17) == 3);
    CHECK(estimate_params(in).params.get("k17") == doctest::Approx(3 * 0.028));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(parse_estimation_inputs("k99 = 1\n"), ParseError);
    CHECK_THROWS_AS(parse_estimation_inputs("period.G = 1\n"), ParseError);
    CHECK_THROWS_AS(parse_estimation_inputs("k1 = 0.02\nperiod.k1 = 36\n"), ParseError);
    CHECK_THROWS_AS(parse_estimation_inputs("period.k1 = -3\n"), ParseError);
    CHECK_THROWS_AS(parse_estimation_inputs("abnormal.k29 = 2\n"), ParseError);
    CHECK_THROWS_AS(parse_estimation_inputs("G = x\n"), ParseError);
  }
  SUBCASE("bundled preset equals the defaults") {
    const auto p = estimate_params(preset("g09")).params;
    CHECK(p == estimate_params(EstimationInputs{}).params);
  }
}
