#include <doctest.h>

#include <random>
#include <regex>
#include <sstream>

#include "cml/assets.hpp"
#include "cml/errors.hpp"
#include "cml/kv_file.hpp"
#include "cml/network.hpp"
#include "oracles.hpp"

using namespace cml;

namespace {

std::string bundled_text() { return read_text_file(resolve_asset("cml", "network", ".rxn")); }

ReactionNetwork bundled() { return parse_network(bundled_text(), "cml.rxn"); }

/// Parse error location for `text`, or {0, 0} when it parses.
std::pair<int, int> error_at(const std::string& text) {
  try {
    parse_network(text);
  } catch (const ParseError& e) {
    return {e.line(), e.column()};
  }
  return {0, 0};
}

std::string without_lines(const std::string& text, const std::regex& drop) {
  std::string out, line;
  std::istringstream in(text);
  while (std::getline(in, line))
    if (!std::regex_search(line, drop)) out += line + "\n";
  return out;
}

}  // namespace

TEST_CASE("single reactions") {
  SUBCASE("regulated self-renewal") {
    const auto n = parse_network("NSC -> 2 NSC @ k1 [phiN]");
    REQUIRE(n.reactions.size() == 1);
    const auto& r = n.reactions[0];
    REQUIRE(r.reactants.size() == 1);
    CHECK(n.species[r.reactants[0].species].name == "NSC");
    CHECK(r.reactants[0].count == 1);
    REQUIRE(r.products.size() == 1);
    CHECK(r.products[0].count == 2);
    CHECK(r.regulator == Regulator::NormalCrowding);
    CHECK(r.rate == "k1");
    CHECK_FALSE(r.is_noop());
  }
  SUBCASE("degradation to the empty complex") {
    const auto n = parse_network("R15: NTDC -> 0 @ k16");
    REQUIRE(n.reactions.size() == 1);
    CHECK(n.reactions[0].label == "R15");
    CHECK(n.reactions[0].products.empty());
    CHECK(n.reactions[0].net_change(1) == std::vector<int>{-1});
  }
  SUBCASE("identity reaction is a no-op") {
    const auto n = parse_network("NPC -> NPC @ ktilde7");
    REQUIRE(n.reactions.size() == 1);
    CHECK(n.reactions[0].is_noop());
    CHECK(n.noop_count() == 1);
  }
  SUBCASE("reversible arrow desugars into two reactions") {
    const auto n = parse_network("R2: NSC <-> NQSC @ k2, k3");
    REQUIRE(n.reactions.size() == 2);
    CHECK(n.declared_reactions == 1);
    CHECK(n.reactions[0].rate == "k2");
    CHECK(n.reactions[1].rate == "k3");
    CHECK(n.reactions[1].label == "R2-rev");
    CHECK(n.reactions[0].net_change(2) == std::vector<int>{-1, 1});
    CHECK(n.reactions[1].net_change(2) == std::vector<int>{1, -1});
  }
}

TEST_CASE("bundled network structure") {
  const auto n = bundled();
  CHECK(n.species.size() == 10);
  for (std::size_t i = 0; i < kStateDim; ++i) {
    CHECK(n.species[i].name == kSpeciesNames[i]);
    CHECK(n.species[i].index == i);
  }
  CHECK(n.declared_reactions == 34);
  CHECK(n.reactions.size() == 36);
  CHECK(n.noop_count() == 4);

  const auto diags = validate_network(n);
  std::vector<std::string> noops;
  for (const auto& d : diags) {
    CHECK(d.kind == NetworkDiagnostic::Kind::NoOp);
    noops.push_back(d.subject);
  }
  CHECK(noops == std::vector<std::string>{"Rt6", "Rt9", "Rt21", "Rt24"});
}

TEST_CASE("every non-quiescent species has exactly one death reaction") {
  const auto n = bundled();
  for (const auto& s : n.species) {
    int deaths = 0;
    for (const auto& r : n.reactions)
      if (r.products.empty() && r.reactants.size() == 1 && r.reactants[0].species == s.index)
        ++deaths;
    const bool quiescent = s.name == "NQSC" || s.name == "AQSC";
    CAPTURE(s.name);
    CHECK(deaths == (quiescent ? 0 : 1));
  }
}

TEST_CASE("diagnostics") {
  SUBCASE("empty network") {
    const auto d = validate_network(parse_network("# nothing\n"));
    REQUIRE(d.size() == 1);
    CHECK(d[0].message == "no species");
  }
  SUBCASE("network without terminal death") {
    const auto text = without_lines(bundled_text(), std::regex("^R15:"));
    const auto d = validate_network(parse_network(text));
    bool found = false;
    for (const auto& x : d) found |= x.message == "NTDC has no outflow";
    CHECK(found);
  }
  SUBCASE("declared but unused species") {
    const auto d = validate_network(parse_network("species P Q\nP -> 0 @ k1\n"));
    bool found = false;
    for (const auto& x : d) found |= x.kind == NetworkDiagnostic::Kind::UnusedSpecies && x.subject == "Q";
    CHECK(found);
  }
}

TEST_CASE("parse errors carry line and column") {
  CHECK(error_at("NSC -> 2 NSC k1\n") == std::pair{1, 14});
  CHECK(error_at("\nNSC -> NPC @ k4\nNSC => NPC @ k5\n").first == 3);
  CHECK(error_at("R1: NSC -> 0 @ k1\nR1: NPC -> 0 @ k2\n") == std::pair{2, 1});
  CHECK(error_at("species NSC\nNSC -> FOO @ k1\n") == std::pair{2, 8});
  CHECK(error_at("NSC + ASC -> 2 NSC @ k1 [phiN]\n").first == 1);
  CHECK(error_at("NSC <-> NQSC @ k2, k3 [phiN]\n").first == 1);
  CHECK(error_at("2 NSC -> NSC @ k1 [phiA]\n").first == 1);
  CHECK(error_at("NSC -> NSC @ k1 [phiX]\n").first == 1);
  CHECK(error_at("k1 -> NSC @ k2\n").first == 1);
  CHECK(error_at("NSC -> 0 @ b1\n").first == 1);
  CHECK(error_at("NSC -> 0 @ k1 extra\n").first == 1);
  CHECK(error_at("NSC -> 0 @ k1 # trailing comment\n") == std::pair{0, 0});
}

TEST_CASE("compiled right-hand side matches the reaction-by-reaction oracle") {
  // Mass-action terms cancel down to the net derivative (progenitor rows net
  // 1e-4 out of rates near 5e3), so the difference is measured against the
  // gross turnover each derivative is computed from.
  const auto net = bundled();
  std::mt19937_64 rng(20240611);
  for (char c : {'a', 'b', 'c'}) {
    const auto p = oracle::table2(c);
    const auto ode = compile_odes(net, p);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      const auto s = oracle::random_state(rng);
      const auto got = ode.rhs(s);
      const auto gross = ode.gross_flux(s);
      const auto want = oracle::system_rhs(p, s);
      for (std::size_t j = 0; j < kStateDim; ++j)
        worst = std::max(worst, std::abs(got[j] - want[j]) / gross[j]);
    }
    CAPTURE(c);
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("compiled right-hand side matches the aggregated system") {
  const auto net = bundled();
  std::mt19937_64 rng(5);
  const auto p = oracle::table2('b');
  const auto ode = compile_odes(net, p);
  const auto g = aggregate(p);
  for (int i = 0; i < 100; ++i) {
    const auto s = oracle::random_state(rng);
    const auto got = ode.rhs(s);
    const auto gross = ode.gross_flux(s);
    const auto want = rhs(s, g);
    for (std::size_t j = 0; j < kStateDim; ++j)
      CHECK(std::abs(got[j] - want[j]) <= 1e-12 * gross[j]);
  }
}

TEST_CASE("zero state is stationary and equilibria are near-stationary") {
  const auto net = bundled();
  const auto p = oracle::table2('a');
  const auto ode = compile_odes(net, p);
  StateVec zero{};
  for (double v : ode.rhs(zero)) CHECK(v == 0);

  // E1 for table2a, assembled from the published components.
  const auto g = aggregate(p);
  StateVec e1{};
  e1[0] = homeostatic_levels(p).r;
  e1[1] = g.a[1] / g.c[1] * e1[0];
  e1[2] = g.a[2] / g.c[2] * e1[0];
  e1[3] = g.a[3] / g.c[3] * e1[2];
  e1[4] = g.a[4] / g.c[4] * e1[3];
  const double scale = *std::max_element(e1.begin(), e1.end());
  for (double v : ode.rhs(e1)) CHECK(std::abs(v) < 1e-6 * scale);
}

TEST_CASE("removing no-op reactions leaves the right-hand side bitwise identical") {
  const auto text = bundled_text();
  const auto reduced = parse_network(without_lines(text, std::regex("^Rt")));
  CHECK(reduced.noop_count() == 0);
  auto p = oracle::table2('c');
  p.set("ktilde7", 7);
  p.set("ktilde10", 7);
  p.set("ktilde23", 7);
  p.set("ktilde26", 7);
  const auto full = compile_odes(parse_network(text), p);
  const auto less = compile_odes(reduced, p);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const auto s = oracle::random_state(rng);
    CHECK(full.rhs(s) == less.rhs(s));
  }
}

TEST_CASE("no-op rates need no binding, real rates do") {
  const auto net = bundled();
  const auto p = oracle::table2('a');
  CHECK_FALSE(p.has("ktilde7"));
  CHECK_NOTHROW(compile_odes(net, p));

  FullParams partial;
  partial.set("k1", 1);
  CHECK_THROWS_AS(compile_odes(net, partial), InputError);
  CHECK_THROWS_AS(compile_odes(parse_network(""), p), InputError);
}
