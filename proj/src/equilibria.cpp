#include "cml/equilibria.hpp"

#include <algorithm>
#include <cmath>

#include "cml/dynamics.hpp"

namespace cml {

namespace {

bool near(double x, double y) { return std::abs(x - y) <= kThresholdRelTol * std::max(std::abs(x), std::abs(y)); }

void lift_into(StateVec& s, std::size_t base, double stem, const std::array<double, 5>& a,
               const std::array<double, 5>& c) {
  s[base] = stem;
  s[base + 1] = stem * a[1] / c[1];
  s[base + 2] = stem * a[2] / c[2];
  s[base + 3] = s[base + 2] * a[3] / c[3];
  s[base + 4] = s[base + 3] * a[4] / c[4];
}

}  // namespace

StateVec lift_stem_equilibrium(double x0, double y0, const AggregatedParams& g) {
  StateVec s{};
  lift_into(s, X0, x0, g.a, g.c);
  lift_into(s, Y0, y0, g.A, g.C);
  return s;
}

StateVec lift_stem_equilibrium(double x0, double y0, const FullParams& p) {
  return lift_stem_equilibrium(x0, y0, aggregate_unchecked(p));
}

std::array<Equilibrium, 4> steady_states(const FullParams& p) {
  const AggregatedParams g = aggregate(p);
  const auto [r, R] = homeostatic_levels(g);
  const double ratio = g.b1 / g.b2;

  std::array<Equilibrium, 4> e;
  e[0] = {EquilibriumLabel::E0, StateVec{}, Existence::Exists, {r, R, 0, 0}};
  e[1] = {EquilibriumLabel::E1, lift_stem_equilibrium(r, 0, g), Existence::Exists, {r, R, r, 0}};
  e[2] = {EquilibriumLabel::E2, lift_stem_equilibrium(0, R, g), Existence::Exists, {r, R, 0, R}};

  Equilibrium& e3 = e[3];
  e3.label = EquilibriumLabel::E3;
  e3.stem = {r, R, 0, 0};
  if (g.b1 == g.b2) {
    e3.existence = Existence::Absent;
    return e;
  }
  const double xs = (g.b2 / (g.b1 - g.b2)) * (ratio * r - R);
  const double ys = (g.b1 / (g.b1 - g.b2)) * (R - r);
  e3.stem.normal = xs;
  e3.stem.abnormal = ys;
  e3.state = lift_stem_equilibrium(xs, ys, g);
  if (near(R, r) || near(R, ratio * r))
    e3.existence = Existence::Boundary;
  else if (r < R && R < ratio * r)
    e3.existence = Existence::Exists;
  else
    e3.existence = Existence::Absent;
  return e;
}

double residual(const StateVec& s, const AggregatedParams& g) {
  const StateVec d = rhs(s, g);
  double num = 0, den = 1;
  for (std::size_t i = 0; i < kStateDim; ++i) {
    num = std::max(num, std::abs(d[i]));
    den = std::max(den, std::abs(s[i]));
  }
  return num / den;
}

double residual(const Equilibrium& e, const FullParams& p) {
  return residual(e.state, aggregate_unchecked(p));
}

std::string_view to_string(EquilibriumLabel l) {
  static constexpr std::string_view names[] = {"E0", "E1", "E2", "E3"};
  return names[static_cast<int>(l)];
}

std::optional<EquilibriumLabel> parse_equilibrium_label(std::string_view s) {
  for (int i = 0; i < 4; ++i)
    if (to_string(static_cast<EquilibriumLabel>(i)) == s) return static_cast<EquilibriumLabel>(i);
  return std::nullopt;
}

std::string_view to_string(Existence e) {
  switch (e) {
    case Existence::Exists: return "exists";
    case Existence::Boundary: return "boundary";
    case Existence::Absent: return "absent";
  }
  return "absent";
}

}  // namespace cml
