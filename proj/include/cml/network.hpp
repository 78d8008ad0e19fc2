#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cml/params.hpp"

namespace cml {

/// Crowding factor multiplying a self-renewal rate.
/// NormalCrowding = 1/(1 + b1 NSC + b2 ASC), AbnormalCrowding = 1/(1 + B (NSC + ASC)).
enum class Regulator { None, NormalCrowding, AbnormalCrowding };

struct Species {
  std::string name;
  std::size_t index = 0;
};

struct StoichTerm {
  std::size_t species = 0;
  int count = 1;
};

struct Reaction {
  std::string label;
  std::vector<StoichTerm> reactants;
  std::vector<StoichTerm> products;
  std::string rate;
  Regulator regulator = Regulator::None;
  int line = 0;
  /// Index of the source line among declared reactions; the two halves of a
  /// reversible declaration share it.
  std::size_t declaration = 0;

  /// Net stoichiometric change per species, sized to `n_species`.
  std::vector<int> net_change(std::size_t n_species) const;
  bool is_noop() const;
};

struct ReactionNetwork {
  std::vector<Species> species;
  std::vector<Reaction> reactions;   // irreversible, after desugaring
  std::size_t declared_reactions = 0;  // source lines carrying a reaction

  std::optional<std::size_t> find_species(std::string_view name) const;
  std::size_t noop_count() const;
};

/// Line-oriented DSL:
///   [label:] complex -> complex @ rate [phiN|phiA]
///   [label:] complex <-> complex @ forward_rate, reverse_rate
///   species NAME NAME ...        (optional; enables unknown-species errors)
/// `0` is the empty complex, `2 NPC` a stoichiometric prefix, `#` a comment.
ReactionNetwork parse_network(std::string_view text, const std::string& source = "<string>");
ReactionNetwork load_network(const std::filesystem::path& path);

/// Mass-action right-hand side compiled from a network. Immutable after
/// construction; evaluation is const and thread-safe.
class OdeSystem {
 public:
  std::size_t dimension() const { return n_species_; }
  const std::vector<std::string>& species_names() const { return names_; }

  void rhs(std::span<const double> x, std::span<double> dx) const;
  std::vector<double> rhs(std::span<const double> x) const;

  /// Sum over reactions of |stoichiometry x flux| per species: the gross
  /// turnover that a derivative cancels down from.
  std::vector<double> gross_flux(std::span<const double> x) const;

 private:
  friend OdeSystem compile_odes(const ReactionNetwork& net, const FullParams& p);

  struct Term {
    std::vector<StoichTerm> reactants;
    std::vector<StoichTerm> net;  // nonzero net changes only
    double k = 0;
    Regulator regulator = Regulator::None;
  };

  double flux(const Term& t, std::span<const double> x) const;

  std::size_t n_species_ = 0;
  std::vector<std::string> names_;
  std::vector<Term> terms_;
  std::size_t nsc_ = 0, asc_ = 0;
  double b1_ = 0, b2_ = 0, B_ = 0;
};

/// No-op reactions are skipped; their rates need no binding.
OdeSystem compile_odes(const ReactionNetwork& net, const FullParams& p);

struct NetworkDiagnostic {
  enum class Kind { NoSpecies, NoOp, UnusedSpecies, NoInflow, NoOutflow };
  Kind kind;
  std::string subject;  // species name or reaction label
  std::string message;
};

std::vector<NetworkDiagnostic> validate_network(const ReactionNetwork& net);

std::string_view to_string(Regulator r);
std::string_view to_string(NetworkDiagnostic::Kind k);

}  // namespace cml
