#include "cml/params.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "cml/errors.hpp"
#include "cml/kv_file.hpp"
#include "exact.hpp"

namespace cml {

namespace {

std::vector<std::string> make_required() {
  std::vector<std::string> v;
  for (int j = 1; j <= 32; ++j) v.push_back("k" + std::to_string(j));
  v.insert(v.end(), {"b1", "b2", "B"});
  return v;
}

}  // namespace

const std::vector<std::string>& FullParams::required_names() {
  static const std::vector<std::string> names = make_required();
  return names;
}

const std::vector<std::string>& FullParams::optional_names() {
  static const std::vector<std::string> names = {"ktilde7", "ktilde10", "ktilde23", "ktilde26"};
  return names;
}

bool FullParams::is_known_name(std::string_view name) {
  const auto& r = required_names();
  const auto& o = optional_names();
  return std::find(r.begin(), r.end(), name) != r.end() ||
         std::find(o.begin(), o.end(), name) != o.end();
}

bool FullParams::has(std::string_view name) const { return values_.find(name) != values_.end(); }

double FullParams::get(std::string_view name) const {
  auto it = values_.find(name);
  if (it == values_.end()) throw InputError("parameter " + std::string(name) + " is not set");
  return it->second;
}

double FullParams::k(int j) const { return get("k" + std::to_string(j)); }

void FullParams::set(std::string_view name, double value) {
  if (!is_known_name(name)) throw InputError("unknown parameter " + std::string(name));
  values_.insert_or_assign(std::string(name), value);
  if (auto it = decimals_.find(name); it != decimals_.end()) decimals_.erase(it);
}

void FullParams::set_decimal(std::string_view name, std::string_view text) {
  auto v = parse_number(text);
  if (!v) throw InputError("'" + std::string(text) + "' is not a number");
  set(name, *v);
  decimals_.insert_or_assign(std::string(name), std::string(text));
}

std::optional<std::string> FullParams::decimal_text(std::string_view name) const {
  if (auto it = decimals_.find(name); it != decimals_.end()) return it->second;
  return std::nullopt;
}

std::vector<std::string> FullParams::missing() const {
  std::vector<std::string> out;
  for (const auto& n : required_names())
    if (!has(n)) out.push_back(n);
  return out;
}

std::vector<Violation> validate(const FullParams& p) {
  using exact::Rational;
  std::vector<Violation> out;
  for (const auto& n : p.missing()) out.push_back({n + " is set", Severity::Error, "missing"});
  if (!out.empty()) return out;

  for (const auto& n : FullParams::required_names())
    if (!(p.get(n) > 0)) out.push_back({n + " > 0", Severity::Error, n + " = " + format_double(p.get(n))});
  for (const auto& n : FullParams::optional_names())
    if (p.has(n) && !(p.get(n) > 0))
      out.push_back({n + " > 0", Severity::Error, n + " = " + format_double(p.get(n))});

  auto k = [&](int j) { return exact::value(p, "k" + std::to_string(j)); };
  auto check = [&](const Rational& lhs, const Rational& rhs, const char* text) {
    if (!(lhs > rhs)) {
      std::ostringstream d;
      d << "lhs = " << format_double(static_cast<double>(lhs))
        << ", rhs = " << format_double(static_cast<double>(rhs));
      out.push_back({text, Severity::Error, d.str()});
    }
  };
  check(k(1), k(5) + k(6) + k(13), "k1 > k5+k6+k13");
  check(k(17), k(21) + k(22) + k(29), "k17 > k21+k22+k29");
  check(k(9) + k(10) + k(14), k(7), "k9+k10+k14 > k7");
  check(k(25) + k(26) + k(30), k(23), "k25+k26+k30 > k23");

  Rational b1 = exact::value(p, "b1"), b2 = exact::value(p, "b2"), B = exact::value(p, "B");
  if (b1 < b2)
    out.push_back({"b1 >= b2", Severity::Error, "b1 < b2"});
  else if (b1 == b2)
    out.push_back({"b1 > b2", Severity::Warning, "b1 == b2: no coexistence equilibrium"});
  check(b2, B, "b2 > B");
  return out;
}

bool has_errors(const std::vector<Violation>& v) {
  return std::any_of(v.begin(), v.end(), [](const Violation& x) { return x.severity == Severity::Error; });
}

namespace {
std::string describe(const std::vector<Violation>& v) {
  std::string s = "parameter assumptions violated:";
  for (const auto& x : v)
    if (x.severity == Severity::Error) s += " [" + x.inequality + "]";
  return s;
}
}  // namespace

AssumptionError::AssumptionError(std::vector<Violation> violations)
    : std::runtime_error(describe(violations)), violations_(std::move(violations)) {}

void require_valid(const FullParams& p) {
  auto v = validate(p);
  if (has_errors(v)) throw AssumptionError(std::move(v));
}

AggregatedParams aggregate_unchecked(const FullParams& p) {
  return aggregate_with<double>([&](int j) { return p.k(j); }, p.b1(), p.b2(), p.B());
}

AggregatedParams aggregate(const FullParams& p) {
  require_valid(p);
  return aggregate_unchecked(p);
}

HomeostaticLevels homeostatic_levels(const AggregatedParams& g) {
  return {(g.a[0] - g.c[0]) / (g.b1 * g.c[0]), (g.A[0] - g.C[0]) / (g.B * g.C[0])};
}

HomeostaticLevels homeostatic_levels(const FullParams& p) { return homeostatic_levels(aggregate(p)); }

FullParams parse_params(std::string_view text, const std::string& source) {
  auto kv = KeyValueFile::parse(text, source);
  FullParams p;
  for (const auto& e : kv.entries()) {
    if (!FullParams::is_known_name(e.key))
      throw ParseError(source, e.line, 1, "unknown parameter '" + e.key + "'");
    if (!parse_number(e.value)) kv.fail(e, "'" + e.value + "' is not a number");
    try {
      exact::from_decimal(e.value);
    } catch (const std::invalid_argument&) {
      kv.fail(e, "'" + e.value + "' is not a plain decimal number");
    }
    p.set_decimal(e.key, e.value);
  }
  if (auto m = p.missing(); !m.empty()) {
    std::string list;
    for (const auto& n : m) list += (list.empty() ? "" : ", ") + n;
    throw ParseError(source, 0, 0, "missing parameters: " + list);
  }
  return p;
}

FullParams load_params(const std::filesystem::path& path) {
  return parse_params(read_text_file(path), path.string());
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_params(const FullParams& p) {
  std::string out;
  auto emit = [&](const std::string& n) {
    if (!p.has(n)) return;
    out += n + " = " + p.decimal_text(n).value_or(format_double(p.get(n))) + "\n";
  };
  for (const auto& n : FullParams::required_names()) emit(n);
  for (const auto& n : FullParams::optional_names()) emit(n);
  return out;
}

// exact.hpp

namespace exact {

Rational from_decimal(std::string_view t) {
  auto bad = [&] { return std::invalid_argument("not a decimal number: " + std::string(t)); };
  std::size_t i = 0;
  bool neg = false;
  if (i < t.size() && (t[i] == '+' || t[i] == '-')) neg = t[i++] == '-';
  boost::multiprecision::cpp_int mant = 0;
  int digits = 0, frac = 0;
  for (; i < t.size() && std::isdigit(static_cast<unsigned char>(t[i])); ++i, ++digits)
    mant = mant * 10 + (t[i] - '0');
  if (i < t.size() && t[i] == '.') {
    for (++i; i < t.size() && std::isdigit(static_cast<unsigned char>(t[i])); ++i, ++digits, ++frac)
      mant = mant * 10 + (t[i] - '0');
  }
  if (digits == 0) throw bad();
  long exp10 = 0;
  if (i < t.size() && (t[i] == 'e' || t[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < t.size() && (t[i] == '+' || t[i] == '-')) eneg = t[i++] == '-';
    std::size_t start = i;
    for (; i < t.size() && std::isdigit(static_cast<unsigned char>(t[i])); ++i) {
      exp10 = exp10 * 10 + (t[i] - '0');
      if (exp10 > 100000) throw bad();
    }
    if (i == start) throw bad();
    if (eneg) exp10 = -exp10;
  }
  if (i != t.size()) throw bad();
  exp10 -= frac;
  boost::multiprecision::cpp_int scale = boost::multiprecision::pow(
      boost::multiprecision::cpp_int(10), static_cast<unsigned>(std::abs(exp10)));
  Rational r = exp10 >= 0 ? Rational(mant * scale) : Rational(mant, scale);
  return neg ? Rational(-r) : r;
}

Rational from_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite value");
  if (v == 0) return Rational(0);
  int e = 0;
  double m = std::frexp(v, &e);  // v = m 2^e, |m| in [0.5, 1)
  auto mant = static_cast<long long>(std::ldexp(m, 53));
  e -= 53;
  boost::multiprecision::cpp_int num = mant;
  boost::multiprecision::cpp_int p2 = boost::multiprecision::cpp_int(1) << std::abs(e);
  return e >= 0 ? Rational(num * p2) : Rational(num, p2);
}

Rational value(const FullParams& p, std::string_view name) {
  if (auto d = p.decimal_text(name)) return from_decimal(*d);
  return from_double(p.get(name));
}

AggregatedT<Rational> aggregate(const FullParams& p) {
  return aggregate_with<Rational>([&](int j) { return value(p, "k" + std::to_string(j)); },
                                  value(p, "b1"), value(p, "b2"), value(p, "B"));
}

}  // namespace exact

}  // namespace cml
