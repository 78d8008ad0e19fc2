#pragma once
// Independent references for the tests. Nothing here calls the aggregate
// coefficients or the closed-form Jacobian, so agreement is meaningful.

#include <cmath>
#include <random>
#include <string>

#include "cml/assets.hpp"
#include "cml/dynamics.hpp"
#include "cml/params.hpp"
#include "cml/state.hpp"

namespace oracle {

inline cml::FullParams table2(char column) {
  return cml::load_params(
      cml::resolve_asset(std::string("table2") + column, "params", ".params"));
}

/// Reaction-by-reaction mass-action fluxes in the original rate constants.
inline cml::StateVec system_rhs(const cml::FullParams& p, const cml::StateVec& s) {
  auto k = [&](int j) { return p.k(j); };
  const double x0 = s[0], x1 = s[1], x2 = s[2], x3 = s[3], x4 = s[4];
  const double y0 = s[5], y1 = s[6], y2 = s[7], y3 = s[8], y4 = s[9];
  const double phiN = 1.0 / (1.0 + p.b1() * x0 + p.b2() * y0);
  const double phiA = 1.0 / (1.0 + p.B() * (x0 + y0));

  cml::StateVec d{};
  // NSC: renewal, quiescence exchange, differentiation, death
  d[0] = k(1) * x0 * phiN - k(2) * x0 + k(3) * x1 - k(5) * x0 - k(6) * x0 - k(13) * x0;
  d[1] = k(2) * x0 - k(3) * x1;
  d[2] = k(4) * x0 + k(5) * x0 + 2 * k(6) * x0 + k(7) * x2 - k(9) * x2 - k(10) * x2 -
         k(14) * x2;
  d[3] = k(8) * x2 + k(9) * x2 + 2 * k(10) * x2 - k(11) * x3 - k(12) * x3 - k(15) * x3;
  d[4] = k(11) * x3 + 2 * k(12) * x3 - k(16) * x4;

  d[5] = k(17) * y0 * phiA - k(18) * y0 + k(19) * y1 - k(21) * y0 - k(22) * y0 - k(29) * y0;
  d[6] = k(18) * y0 - k(19) * y1;
  d[7] = k(20) * y0 + k(21) * y0 + 2 * k(22) * y0 + k(23) * y2 - k(25) * y2 - k(26) * y2 -
         k(30) * y2;
  d[8] = k(24) * y2 + k(25) * y2 + 2 * k(26) * y2 - k(27) * y3 - k(28) * y3 - k(31) * y3;
  d[9] = k(27) * y3 + 2 * k(28) * y3 - k(32) * y4;
  return d;
}

/// Central differences with step h_j = 1e-4 * max(|s_j|, 1).
inline cml::JacobianMatrix fd_jacobian(const cml::FullParams& p, const cml::StateVec& s) {
  cml::JacobianMatrix J;
  for (std::size_t j = 0; j < cml::kStateDim; ++j) {
    const double h = 1e-4 * std::max(std::abs(s[j]), 1.0);
    cml::StateVec up = s, dn = s;
    up[j] += h;
    dn[j] -= h;
    const auto fu = system_rhs(p, up), fd = system_rhs(p, dn);
    for (std::size_t i = 0; i < cml::kStateDim; ++i) J(i, j) = (fu[i] - fd[i]) / (2 * h);
  }
  return J;
}

/// Positive state with each component log-uniform within two decades of the
/// typical equilibrium magnitude of its compartment.
inline cml::StateVec random_state(std::mt19937_64& rng) {
  static constexpr double scale[5] = {1e6, 1e5, 1e8, 1e10, 1e12};
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  cml::StateVec s{};
  for (std::size_t i = 0; i < cml::kStateDim; ++i)
    s[i] = scale[i % 5] * std::pow(10.0, u(rng));
  return s;
}

struct RandomDraw {
  cml::FullParams params;
  double r = 0, R = 0, ratio = 0;
};

/// Valid parameter set around table2b: every rate perturbed log-uniformly
/// by up to 2x, progenitor net death rates drawn directly (they are the
/// small differences of large rates), b1/b2 in (1.2, 4), and k29 solved so
/// that R lands log-uniformly in (0.3 r, 1.5 (b1/b2) r) but at least 2% away
/// from either threshold.
inline RandomDraw random_valid_params(std::mt19937_64& rng) {
  const cml::FullParams base = table2('b');
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto factor = [&] { return std::exp(std::log(2.0) * (2 * u(rng) - 1)); };
  for (;;) {
    cml::FullParams p = base;
    for (int j = 1; j <= 32; ++j) p.set("k" + std::to_string(j), base.k(j) * factor());
    p.set("k7", p.k(9) + p.k(10) + p.k(14) - 1e-4 * factor());
    p.set("k23", p.k(25) + p.k(26) + p.k(30) - 2e-4 * factor());
    const double ratio = 1.2 + 2.8 * u(rng);
    p.set("b1", base.b1() * factor());
    p.set("b2", p.b1() / ratio);
    p.set("B", p.b2() * (0.1 + 0.8 * u(rng)));

    const double c0 = p.k(5) + p.k(6) + p.k(13);
    if (p.k(1) <= c0) continue;
    const double r = (p.k(1) - c0) / (p.b1() * c0);
    const double lo = std::log(0.3 * r), hi = std::log(1.5 * ratio * r);
    const double R = std::exp(lo + (hi - lo) * u(rng));
    if (std::abs(R / r - 1) < 0.02 || std::abs(R / (ratio * r) - 1) < 0.02) continue;
    const double k29 = p.k(17) / (1 + p.B() * R) - p.k(21) - p.k(22);
    if (k29 <= 0) continue;
    p.set("k29", k29);
    if (cml::has_errors(cml::validate(p))) continue;
    return {p, r, cml::homeostatic_levels(p).R, ratio};
  }
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

}  // namespace oracle
