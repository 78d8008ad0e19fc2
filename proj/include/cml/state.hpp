#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace cml {

inline constexpr std::size_t kStateDim = 10;

/// Cell counts ordered x0..x4 (normal lineage) then y0..y4 (abnormal lineage).
using StateVec = std::array<double, kStateDim>;

enum Compartment : std::size_t { X0, X1, X2, X3, X4, Y0, Y1, Y2, Y3, Y4 };

inline constexpr std::array<std::string_view, kStateDim> kComponentNames = {
    "x0", "x1", "x2", "x3", "x4", "y0", "y1", "y2", "y3", "y4"};

inline constexpr std::array<std::string_view, kStateDim> kSpeciesNames = {
    "NSC", "NQSC", "NPC", "NDC", "NTDC", "ASC", "AQSC", "APC", "ADC", "ATDC"};

/// Compartment groups share a plotting window: stem (x0, y0), quiescent
/// (x1, y1), progenitor, differentiated, terminal.
enum class Group { Stem, Quiescent, Progenitor, Differentiated, Terminal };

inline constexpr std::array<std::string_view, 5> kGroupNames = {
    "stem", "quiescent", "progenitor", "differentiated", "terminal"};

constexpr Group group_of(std::size_t component) {
  return static_cast<Group>(component % 5);
}

}  // namespace cml
