#include <doctest.h>

#include <algorithm>
#include <random>

#include "cml/errors.hpp"
#include "cml/params.hpp"
#include "oracles.hpp"

using namespace cml;

namespace {

bool names(const std::vector<Violation>& v, const std::string& inequality) {
  return std::any_of(v.begin(), v.end(),
                     [&](const Violation& x) { return x.inequality == inequality; });
}

FullParams all_ones() {
  FullParams p;
  for (const auto& n : FullParams::required_names()) p.set(n, 1.0);
  return p;
}

}  // namespace

TEST_CASE("bundled parameter sets satisfy every assumption") {
  for (char c : {'a', 'b', 'c'}) {
    CAPTURE(c);
    CHECK(validate(oracle::table2(c)).empty());
  }
}

TEST_CASE("validate names the violated inequality") {
  SUBCASE("progenitor self-renewal outpacing exits") {
    auto p = oracle::table2('a');
    p.set("k7", 10000);
    const auto v = validate(p);
    CHECK(names(v, "k9+k10+k14 > k7"));
    CHECK(has_errors(v));
  }
  SUBCASE("everything equal to one") {
    const auto v = validate(all_ones());
    CHECK(names(v, "k1 > k5+k6+k13"));
    CHECK(names(v, "b2 > B"));
  }
  SUBCASE("non-positive rate") {
    auto p = oracle::table2('a');
    p.set("k20", 0);
    CHECK(names(validate(p), "k20 > 0"));
  }
  SUBCASE("missing parameter") {
    auto p = oracle::table2('a');
    FullParams q;
    for (const auto& n : FullParams::required_names())
      if (n != "k12") q.set(n, p.get(n));
    CHECK(names(validate(q), "k12 is set"));
    CHECK(q.missing() == std::vector<std::string>{"k12"});
  }
}

TEST_CASE("b1 == b2 is a warning, b1 < b2 an error") {
  auto p = oracle::table2('a');
  p.set_decimal("b2", *p.decimal_text("b1"));
  auto v = validate(p);
  REQUIRE(v.size() == 1);
  CHECK(v[0].severity == Severity::Warning);
  CHECK_FALSE(has_errors(v));
  CHECK_NOTHROW(require_valid(p));

  p.set("b2", p.b1() * 1.5);
  v = validate(p);
  CHECK(has_errors(v));
  CHECK_THROWS_AS(require_valid(p), AssumptionError);
}

TEST_CASE("validation compares decimal spellings exactly") {
  // k1 equal to k5+k6+k13 in decimal but not in binary floating point.
  auto p = oracle::table2('a');
  p.set_decimal("k1", "0.0065");
  CHECK(names(validate(p), "k1 > k5+k6+k13"));
}

TEST_CASE("aggregate coefficients are the defining sums") {
  const auto a = aggregate(oracle::table2('a'));
  CHECK(a.c[0] == doctest::Approx(0.0065).epsilon(1e-15));
  CHECK(std::abs(a.c[2] - 0.0001) < 1e-12);
  CHECK(a.A[0] == doctest::Approx(0.056).epsilon(1e-15));
  CHECK(a.a[2] == doctest::Approx(0.011).epsilon(1e-15));
  CHECK(a.a[4] == 100);
  CHECK(a.c[4] == 1);

  const auto c = aggregate(oracle::table2('c'));
  CHECK(c.C[0] == doctest::Approx(0.017).epsilon(1e-15));

  CHECK_THROWS_AS(aggregate(all_ones()), AssumptionError);
  CHECK_NOTHROW(aggregate_unchecked(all_ones()));
}

TEST_CASE("homeostatic levels") {
  const auto a = homeostatic_levels(oracle::table2('a'));
  CHECK(a.r == doctest::Approx(899999.9998).epsilon(1e-6));

  const auto c = homeostatic_levels(oracle::table2('c'));
  CHECK(c.R == doctest::Approx(2.496853625e6).epsilon(1e-6));

  const auto pb = oracle::table2('b');
  const auto b = homeostatic_levels(pb);
  CHECK(b.R == doctest::Approx(0.029 / (pb.B() * 0.027)).epsilon(1e-12));
}

TEST_CASE("levels agree whether computed from full or aggregated parameters") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto d = oracle::random_valid_params(rng);
    const auto g = aggregate(d.params);
    const auto full = homeostatic_levels(d.params);
    const auto agg = homeostatic_levels(g);
    CHECK(full.r == agg.r);
    CHECK(full.R == agg.R);
    CHECK(full.r == (g.a[0] - g.c[0]) / (g.b1 * g.c[0]));
  }
}

TEST_CASE("parameter sets with equal aggregates give equal right-hand sides") {
  // Shift rate between k5 and k6 while keeping c0 and a2 fixed: k5 + k6 and
  // k5 + 2 k6 fixed requires moving k4 too.
  auto p = oracle::table2('b');
  auto q = p;
  q.set("k6", p.k(6) + 0.0005);
  q.set("k5", p.k(5) - 0.0005);
  q.set("k4", p.k(4) - 0.0005);
  const auto gp = aggregate(p), gq = aggregate(q);
  for (int i = 0; i < 5; ++i) {
    CHECK(gp.a[i] == doctest::Approx(gq.a[i]).epsilon(1e-14));
    CHECK(gp.c[i] == doctest::Approx(gq.c[i]).epsilon(1e-14));
  }
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto s = oracle::random_state(rng);
    const auto fp = rhs(s, gp), fq = rhs(s, gq);
    for (std::size_t j = 0; j < kStateDim; ++j)
      CHECK(fp[j] == doctest::Approx(fq[j]).epsilon(1e-12));
  }
}

TEST_CASE("parameter file parsing") {
  SUBCASE("round trip keeps decimal spellings") {
    const auto p = oracle::table2('b');
    const auto q = parse_params(format_params(p));
    CHECK(p == q);
    CHECK(q.decimal_text("b1") == std::optional<std::string>("3.675213676e-6"));
  }
  SUBCASE("unknown key names the line") {
    std::string text = format_params(oracle::table2('a')) + "k33 = 1\n";
    try {
      parse_params(text, "bad.params");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 36);
      CHECK(std::string(e.what()).find("bad.params:36") == 0);
    }
  }
  SUBCASE("malformed number") {
    CHECK_THROWS_AS(parse_params("k1 = 0.0.1\n"), ParseError);
  }
  SUBCASE("duplicate key") {
    CHECK_THROWS_AS(parse_params("k1 = 1\nk1 = 2\n"), ParseError);
  }
  SUBCASE("missing parameters are reported together") {
    try {
      parse_params("k1 = 1\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("k32") != std::string::npos);
    }
  }
  SUBCASE("no-op rates are optional") {
    auto text = format_params(oracle::table2('a')) + "ktilde7 = 3\n";
    const auto p = parse_params(text);
    CHECK(p.get("ktilde7") == 3);
    CHECK_FALSE(p.has("ktilde10"));
  }
}

TEST_CASE("shortest round-trip formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e12) == "1e+12");
  for (double v : {3.675213676e-6, 5275.488577, 1.0 / 3.0})
    CHECK(std::stod(format_double(v)) == v);
}
