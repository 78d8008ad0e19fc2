#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "cml/dynamics.hpp"
#include "cml/equilibria.hpp"
#include "cml/network.hpp"
#include "cml/stability.hpp"
#include "oracles.hpp"

using namespace cml;

TEST_CASE("zero is stationary") {
  const auto g = aggregate(oracle::table2('a'));
  for (double v : rhs(StateVec{}, g)) CHECK(v == 0);
}

TEST_CASE("single normal stem cell") {
  const auto g = aggregate(oracle::table2('a'));
  StateVec s{};
  s[X0] = 1;
  const auto d = rhs(s, g);
  CHECK(d[X0] == doctest::Approx(g.a[0] / (1 + g.b1) - g.a[1] - g.c[0]).epsilon(1e-15));
  CHECK(d[X1] == g.a[1]);
  CHECK(d[X2] == g.a[2]);
  CHECK(d[X3] == 0);
  CHECK(d[Y0] == 0);
}

TEST_CASE("aggregated right-hand side matches the oracle") {
  std::mt19937_64 rng(17);
  for (char c : {'a', 'b', 'c'}) {
    const auto p = oracle::table2(c);
    const auto g = aggregate(p);
    const auto ode = compile_odes(load_network(resolve_asset("cml", "network", ".rxn")), p);
    for (int i = 0; i < 100; ++i) {
      const auto s = oracle::random_state(rng);
      const auto got = rhs(s, g);
      const auto want = oracle::system_rhs(p, s);
      // Rows cancel large gross rates (progenitors net 1e-4 out of 5e3), so
      // the difference is measured against the turnover of the row.
      const auto gross = ode.gross_flux(s);
      for (std::size_t j = 0; j < kStateDim; ++j)
        CHECK(std::abs(got[j] - want[j]) <= 1e-12 * gross[j]);
    }
  }
}

TEST_CASE("analytic Jacobian matches central differences") {
  const auto p = oracle::table2('b');
  const auto g = aggregate(p);
  std::mt19937_64 rng(23);
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const auto s = oracle::random_state(rng);
    const JacobianMatrix J = jacobian(s, g);
    const JacobianMatrix F = oracle::fd_jacobian(p, s);
    const double rel = (J - F).cwiseAbs().rowwise().sum().maxCoeff() /
                       J.cwiseAbs().rowwise().sum().maxCoeff();
    worst = std::max(worst, rel);
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("linear rows are state independent") {
  const auto g = aggregate(oracle::table2('c'));
  std::mt19937_64 rng(29);
  const JacobianMatrix J0 = jacobian(StateVec{}, g);
  for (int i = 0; i < 20; ++i) {
    const JacobianMatrix J = jacobian(oracle::random_state(rng), g);
    for (int row : {1, 2, 3, 4, 6, 7, 8, 9}) CHECK(J.row(row) == J0.row(row));
    CHECK(J(X4, X3) == g.a[4]);
    CHECK(J(Y4, Y3) == g.A[4]);
    // Stem rows depend on the state only through x0 and y0.
    for (int col : {2, 3, 4, 7, 8, 9}) {
      CHECK(J(X0, col) == 0);
      CHECK(J(Y0, col) == 0);
    }
  }
}

TEST_CASE("linear relaxation rates appear in the zero-state spectrum") {
  const auto g = aggregate(oracle::table2('a'));
  const auto ev = spectrum(jacobian(StateVec{}, g));
  for (double rate : {g.c[2], g.c[3], g.c[4], g.C[2], g.C[3], g.C[4]}) {
    bool found = false;
    for (auto z : ev)
      found |= std::abs(z.imag()) < 1e-12 && std::abs(z.real() + rate) <= 1e-8 * rate;
    CAPTURE(rate);
    CHECK(found);
  }
}

TEST_CASE("flow does not leave the non-negative orthant") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::size_t> pick(0, kStateDim - 1);
  for (char c : {'a', 'b', 'c'}) {
    const auto g = aggregate(oracle::table2(c));
    for (int i = 0; i < 200; ++i) {
      auto s = oracle::random_state(rng);
      const auto zeroed = pick(rng);
      s[zeroed] = 0;
      CHECK(rhs(s, g)[zeroed] >= 0);
    }
  }
}

TEST_CASE("input checks") {
  const auto g = aggregate(oracle::table2('a'));
  StateVec s{};
  s[X2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(rhs(s, g), std::domain_error);
  s[X2] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(rhs(s, g), std::domain_error);

  StateVec neg{};
  neg[X0] = -2 / g.b1;
  CHECK_THROWS_AS(jacobian(neg, g), std::domain_error);
}

TEST_CASE("largest linear rate") {
  const auto g = aggregate(oracle::table2('a'));
  CHECK(largest_linear_rate(g) == doctest::Approx(75.05).epsilon(1e-12));
}
