#include "cml/network.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "cml/errors.hpp"
#include "cml/kv_file.hpp"

namespace cml {

std::vector<int> Reaction::net_change(std::size_t n_species) const {
  std::vector<int> net(n_species, 0);
  for (const auto& t : reactants) net[t.species] -= t.count;
  for (const auto& t : products) net[t.species] += t.count;
  return net;
}

bool Reaction::is_noop() const {
  std::map<std::size_t, int> net;
  for (const auto& t : reactants) net[t.species] -= t.count;
  for (const auto& t : products) net[t.species] += t.count;
  return std::all_of(net.begin(), net.end(), [](const auto& kv) { return kv.second == 0; });
}

std::optional<std::size_t> ReactionNetwork::find_species(std::string_view name) const {
  for (const auto& s : species)
    if (s.name == name) return s.index;
  return std::nullopt;
}

std::size_t ReactionNetwork::noop_count() const {
  return static_cast<std::size_t>(
      std::count_if(reactions.begin(), reactions.end(), [](const Reaction& r) { return r.is_noop(); }));
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct Complex {
  std::vector<std::pair<std::string, int>> terms;  // name, count
  std::vector<int> columns;
};

class LineParser {
 public:
  LineParser(std::string_view line, int line_no, const std::string& source)
      : s_(line), line_(line_no), source_(source) {}

  [[noreturn]] void fail(std::size_t col, const std::string& msg) const {
    throw ParseError(source_, line_, static_cast<int>(col) + 1, msg);
  }

  void skip_ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\r')) ++i_;
  }
  bool at_end() {
    skip_ws();
    return i_ >= s_.size();
  }
  std::size_t pos() const { return i_; }
  void reset(std::size_t p) { i_ = p; }
  char peek() {
    skip_ws();
    return i_ < s_.size() ? s_[i_] : '\0';
  }
  bool accept(std::string_view tok) {
    skip_ws();
    if (s_.substr(i_, tok.size()) == tok) {
      i_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view tok, const char* what) {
    if (!accept(tok)) fail(i_, std::string("expected ") + what);
  }

  std::optional<std::string> identifier() {
    skip_ws();
    if (i_ >= s_.size() || !ident_start(s_[i_])) return std::nullopt;
    std::size_t b = i_;
    while (i_ < s_.size() && ident_char(s_[i_])) ++i_;
    return std::string(s_.substr(b, i_ - b));
  }

  std::string require_identifier(const char* what) {
    skip_ws();
    std::size_t at = i_;
    auto id = identifier();
    if (!id) fail(at, std::string("expected ") + what);
    return *id;
  }

  std::optional<int> integer() {
    skip_ws();
    if (i_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[i_]))) return std::nullopt;
    long v = 0;
    std::size_t b = i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
      v = v * 10 + (s_[i_++] - '0');
      if (v > 1'000'000) fail(b, "stoichiometric coefficient too large");
    }
    return static_cast<int>(v);
  }

  Complex complex() {
    Complex c;
    skip_ws();
    std::size_t start = i_;
    if (auto n = integer(); n && *n == 0) {
      if (!identifier()) return c;  // empty complex
      fail(start, "stoichiometric coefficient must be positive");
    }
    reset(start);
    for (;;) {
      skip_ws();
      std::size_t col = i_;
      int count = integer().value_or(1);
      if (count == 0) fail(col, "stoichiometric coefficient must be positive");
      auto name = identifier();
      if (!name) fail(i_, "expected species name");
      c.terms.emplace_back(*name, count);
      c.columns.push_back(static_cast<int>(col));
      if (!accept("+")) break;
    }
    return c;
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0;
  int line_;
  const std::string& source_;
};

bool is_sensitivity(std::string_view n) { return n == "b1" || n == "b2" || n == "B"; }

}  // namespace

ReactionNetwork parse_network(std::string_view text, const std::string& source) {
  ReactionNetwork net;
  bool declared = false;
  std::map<std::string, int, std::less<>> labels;

  auto species_index = [&](const std::string& name, LineParser& lp, int col) -> std::size_t {
    if (auto idx = net.find_species(name)) return *idx;
    if (declared) lp.fail(static_cast<std::size_t>(col), "unknown species '" + name + "'");
    if (FullParams::is_known_name(name))
      lp.fail(static_cast<std::size_t>(col), "'" + name + "' is a reserved parameter name");
    net.species.push_back({name, net.species.size()});
    return net.species.size() - 1;
  };

  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);

    LineParser lp(line, line_no, source);
    if (lp.at_end()) continue;

    std::size_t start = lp.pos();
    auto first = lp.identifier();
    if (first && *first == "species" && line.find("->") == std::string_view::npos &&
        lp.peek() != ':') {
      if (declared || !net.reactions.empty())
        lp.fail(start, "species must be declared once, before any reaction");
      declared = true;
      while (!lp.at_end()) {
        lp.accept(",");
        lp.skip_ws();
        std::size_t col = lp.pos();
        auto name = lp.require_identifier("species name");
        if (net.find_species(name)) lp.fail(col, "species '" + name + "' declared twice");
        if (FullParams::is_known_name(name))
          lp.fail(col, "'" + name + "' is a reserved parameter name");
        net.species.push_back({name, net.species.size()});
      }
      continue;
    }

    std::string label;
    std::size_t label_col = start;
    if (first && lp.accept(":")) {
      label = *first;
    } else {
      lp.reset(start);
      label = "line" + std::to_string(line_no);
    }

    Complex lhs = lp.complex();
    bool reversible = false;
    if (lp.accept("<->"))
      reversible = true;
    else
      lp.expect("->", "'->' or '<->'");
    Complex rhs = lp.complex();

    lp.expect("@", "'@' before the rate constant");
    std::size_t rate_col = lp.pos();
    std::string rate = lp.require_identifier("rate constant");
    if (is_sensitivity(rate)) lp.fail(rate_col, "'" + rate + "' is a sensitivity, not a rate");
    std::string reverse_rate;
    if (reversible) {
      lp.expect(",", "',' and the reverse rate of a reversible reaction");
      rate_col = lp.pos();
      reverse_rate = lp.require_identifier("reverse rate constant");
      if (is_sensitivity(reverse_rate))
        lp.fail(rate_col, "'" + reverse_rate + "' is a sensitivity, not a rate");
    }

    Regulator reg = Regulator::None;
    lp.skip_ws();
    std::size_t reg_col = lp.pos();
    if (lp.accept("[")) {
      auto name = lp.require_identifier("regulator phiN or phiA");
      if (name == "phiN")
        reg = Regulator::NormalCrowding;
      else if (name == "phiA")
        reg = Regulator::AbnormalCrowding;
      else
        lp.fail(reg_col + 1, "unknown regulator '" + name + "' (expected phiN or phiA)");
      lp.expect("]", "']'");
      int molecules = 0;
      for (const auto& t : lhs.terms) molecules += t.second;
      if (molecules != 1) lp.fail(reg_col, "regulator attached to a multi-reactant reaction");
      if (reversible) lp.fail(reg_col, "regulator attached to a reversible reaction");
    }
    if (!lp.at_end()) lp.fail(lp.pos(), "unexpected text after reaction");

    if (labels.count(label)) lp.fail(label_col, "duplicate reaction label '" + label + "'");
    labels[label] = line_no;

    auto build = [&](const Complex& from, const Complex& to) {
      Reaction r;
      for (std::size_t t = 0; t < from.terms.size(); ++t)
        r.reactants.push_back({species_index(from.terms[t].first, lp, from.columns[t]), from.terms[t].second});
      for (std::size_t t = 0; t < to.terms.size(); ++t)
        r.products.push_back({species_index(to.terms[t].first, lp, to.columns[t]), to.terms[t].second});
      r.line = line_no;
      r.declaration = net.declared_reactions;
      return r;
    };

    Reaction fwd = build(lhs, rhs);
    fwd.label = label;
    fwd.rate = rate;
    fwd.regulator = reg;
    net.reactions.push_back(std::move(fwd));
    if (reversible) {
      Reaction rev = build(rhs, lhs);
      rev.label = label + "-rev";
      rev.rate = reverse_rate;
      net.reactions.push_back(std::move(rev));
    }
    ++net.declared_reactions;
  }
  return net;
}

ReactionNetwork load_network(const std::filesystem::path& path) {
  return parse_network(read_text_file(path), path.string());
}

double OdeSystem::flux(const Term& t, std::span<const double> x) const {
  double f = t.k;
  for (const auto& r : t.reactants)
    for (int c = 0; c < r.count; ++c) f *= x[r.species];
  switch (t.regulator) {
    case Regulator::NormalCrowding:
      f /= 1.0 + b1_ * x[nsc_] + b2_ * x[asc_];
      break;
    case Regulator::AbnormalCrowding:
      f /= 1.0 + B_ * (x[nsc_] + x[asc_]);
      break;
    case Regulator::None:
      break;
  }
  return f;
}

void OdeSystem::rhs(std::span<const double> x, std::span<double> dx) const {
  if (x.size() != n_species_ || dx.size() != n_species_)
    throw std::invalid_argument("state dimension mismatch");
  std::fill(dx.begin(), dx.end(), 0.0);
  for (const auto& t : terms_) {
    double f = flux(t, x);
    for (const auto& n : t.net) dx[n.species] += n.count * f;
  }
}

std::vector<double> OdeSystem::rhs(std::span<const double> x) const {
  std::vector<double> dx(n_species_);
  rhs(x, dx);
  return dx;
}

std::vector<double> OdeSystem::gross_flux(std::span<const double> x) const {
  std::vector<double> g(n_species_, 0.0);
  for (const auto& t : terms_) {
    double f = std::abs(flux(t, x));
    for (const auto& n : t.net) g[n.species] += std::abs(n.count) * f;
  }
  return g;
}

OdeSystem compile_odes(const ReactionNetwork& net, const FullParams& p) {
  if (net.species.empty()) throw InputError("network with no species");
  OdeSystem sys;
  sys.n_species_ = net.species.size();
  for (const auto& s : net.species) sys.names_.push_back(s.name);

  bool regulated = false;
  for (const auto& r : net.reactions) {
    if (r.is_noop()) continue;
    if (!p.has(r.rate))
      throw InputError("reaction " + r.label + ": unresolved rate name '" + r.rate + "'");
    OdeSystem::Term t;
    t.reactants = r.reactants;
    t.k = p.get(r.rate);
    t.regulator = r.regulator;
    auto net_change = r.net_change(sys.n_species_);
    for (std::size_t s = 0; s < net_change.size(); ++s)
      if (net_change[s] != 0) t.net.push_back({s, net_change[s]});
    regulated = regulated || r.regulator != Regulator::None;
    sys.terms_.push_back(std::move(t));
  }
  if (regulated) {
    auto nsc = net.find_species("NSC");
    auto asc = net.find_species("ASC");
    if (!nsc || !asc) throw InputError("crowding regulators need species NSC and ASC");
    sys.nsc_ = *nsc;
    sys.asc_ = *asc;
    sys.b1_ = p.b1();
    sys.b2_ = p.b2();
    sys.B_ = p.B();
  }
  return sys;
}

std::vector<NetworkDiagnostic> validate_network(const ReactionNetwork& net) {
  using Kind = NetworkDiagnostic::Kind;
  std::vector<NetworkDiagnostic> out;
  if (net.species.empty()) {
    out.push_back({Kind::NoSpecies, "", "no species"});
    return out;
  }
  const std::size_t n = net.species.size();
  std::vector<bool> used(n, false), in(n, false), outflow(n, false);
  for (const auto& r : net.reactions) {
    for (const auto& t : r.reactants) used[t.species] = true;
    for (const auto& t : r.products) used[t.species] = true;
    if (r.is_noop()) {
      out.push_back({Kind::NoOp, r.label, "reaction " + r.label + " is a no-op (zero net stoichiometry)"});
      continue;
    }
    auto d = r.net_change(n);
    for (std::size_t s = 0; s < n; ++s) {
      if (d[s] > 0) in[s] = true;
      if (d[s] < 0) outflow[s] = true;
    }
  }
  for (const auto& s : net.species) {
    if (!used[s.index]) {
      out.push_back({Kind::UnusedSpecies, s.name, s.name + " is not used by any reaction"});
      continue;
    }
    if (!in[s.index]) out.push_back({Kind::NoInflow, s.name, s.name + " has no inflow"});
    if (!outflow[s.index]) out.push_back({Kind::NoOutflow, s.name, s.name + " has no outflow"});
  }
  return out;
}

std::string_view to_string(Regulator r) {
  switch (r) {
    case Regulator::NormalCrowding: return "phiN";
    case Regulator::AbnormalCrowding: return "phiA";
    case Regulator::None: break;
  }
  return "none";
}

std::string_view to_string(NetworkDiagnostic::Kind k) {
  using Kind = NetworkDiagnostic::Kind;
  switch (k) {
    case Kind::NoSpecies: return "no-species";
    case Kind::NoOp: return "no-op";
    case Kind::UnusedSpecies: return "unused-species";
    case Kind::NoInflow: return "no-inflow";
    case Kind::NoOutflow: return "no-outflow";
  }
  return "unknown";
}

}  // namespace cml
