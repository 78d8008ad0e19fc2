#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "cml/params.hpp"
#include "cml/state.hpp"

namespace cml {

enum class EquilibriumLabel { E0, E1, E2, E3 };

/// Boundary: the equilibrium sits on a phase threshold (within relative 1e-9)
/// where it coincides with another one.
enum class Existence { Exists, Boundary, Absent };

struct StemLevels {
  double r = 0;       // normal homeostatic level (= d)
  double R = 0;       // abnormal homeostatic level (= D)
  double normal = 0;  // x0 at this equilibrium
  double abnormal = 0;
};

struct Equilibrium {
  EquilibriumLabel label = EquilibriumLabel::E0;
  StateVec state{};
  Existence existence = Existence::Absent;
  StemLevels stem;

  bool exists() const { return existence == Existence::Exists; }
  bool admissible() const { return existence != Existence::Absent; }
};

inline constexpr double kThresholdRelTol = 1e-9;

/// E0..E3 in label order. Absent equilibria still carry their analytic
/// continuation (E3 may have negative components). E3 is absent with zero
/// state when b1 == b2.
std::array<Equilibrium, 4> steady_states(const FullParams& p);

/// max_i |rhs_i(state)| / max(1, ||state||_inf).
double residual(const Equilibrium& e, const FullParams& p);
double residual(const StateVec& s, const AggregatedParams& g);

/// Fills the cascade below each stem value so that rows 1..4 of the
/// aggregated system vanish.
StateVec lift_stem_equilibrium(double x0, double y0, const FullParams& p);
StateVec lift_stem_equilibrium(double x0, double y0, const AggregatedParams& g);

std::string_view to_string(EquilibriumLabel l);
std::optional<EquilibriumLabel> parse_equilibrium_label(std::string_view s);
std::string_view to_string(Existence e);

}  // namespace cml
