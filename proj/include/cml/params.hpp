#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cml {

/// The per-capita rates k1..k32 (1/day), the crowding sensitivities b1, b2, B
/// (1/cells) and the optional no-op rates ktilde7/10/23/26.
///
/// Values set from text keep their decimal spelling so that sign-critical
/// expressions can be re-evaluated exactly.
class FullParams {
 public:
  static const std::vector<std::string>& required_names();
  static const std::vector<std::string>& optional_names();
  static bool is_known_name(std::string_view name);

  bool has(std::string_view name) const;
  double get(std::string_view name) const;  // throws InputError if unset
  double k(int j) const;                    // 1-based
  double b1() const { return get("b1"); }
  double b2() const { return get("b2"); }
  double B() const { return get("B"); }

  void set(std::string_view name, double value);
  void set_decimal(std::string_view name, std::string_view text);
  std::optional<std::string> decimal_text(std::string_view name) const;

  std::vector<std::string> missing() const;
  bool complete() const { return missing().empty(); }

  bool operator==(const FullParams&) const = default;

 private:
  std::map<std::string, double, std::less<>> values_;
  std::map<std::string, std::string, std::less<>> decimals_;
};

enum class Severity { Warning, Error };

struct Violation {
  std::string inequality;  // e.g. "k9+k10+k14 > k7"
  Severity severity = Severity::Error;
  std::string detail;
};

/// Assumption checks. Equality b1 == b2 is reported as a Warning.
std::vector<Violation> validate(const FullParams& p);
bool has_errors(const std::vector<Violation>& v);

class AssumptionError : public std::runtime_error {
 public:
  explicit AssumptionError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Throws AssumptionError when validate() reports an Error.
void require_valid(const FullParams& p);

/// Coefficients of the aggregated system. Index i of a/c/A/C is the
/// compartment level (0 = stem ... 4 = terminal).
template <class T>
struct AggregatedT {
  std::array<T, 5> a, c, A, C;
  T b1, b2, B;
};

using AggregatedParams = AggregatedT<double>;

/// Builds the aggregate from any scalar type; `k(j)`, `b1`, `b2`, `B` supply
/// the primitive values.
template <class T, class KFn>
AggregatedT<T> aggregate_with(KFn&& k, T b1, T b2, T B) {
  AggregatedT<T> g{};
  g.a[0] = k(1);
  g.c[0] = k(5) + k(6) + k(13);
  g.a[1] = k(2);
  g.c[1] = k(3);
  g.a[2] = k(4) + k(5) + T(2) * k(6);
  g.c[2] = -k(7) + k(9) + k(10) + k(14);
  g.a[3] = k(8) + k(9) + T(2) * k(10);
  g.c[3] = k(11) + k(12) + k(15);
  g.a[4] = k(11) + T(2) * k(12);
  g.c[4] = k(16);
  g.A[0] = k(17);
  g.C[0] = k(21) + k(22) + k(29);
  g.A[1] = k(18);
  g.C[1] = k(19);
  g.A[2] = k(20) + k(21) + T(2) * k(22);
  g.C[2] = -k(23) + k(25) + k(26) + k(30);
  g.A[3] = k(24) + k(25) + T(2) * k(26);
  g.C[3] = k(27) + k(28) + k(31);
  g.A[4] = k(27) + T(2) * k(28);
  g.C[4] = k(32);
  g.b1 = b1;
  g.b2 = b2;
  g.B = B;
  return g;
}

/// Validates, then aggregates. Throws AssumptionError.
AggregatedParams aggregate(const FullParams& p);
/// Aggregates without validation (for diagnostics on invalid sets).
AggregatedParams aggregate_unchecked(const FullParams& p);

struct HomeostaticLevels {
  double r;  // normal stem level, (a0 - c0) / (b1 c0)
  double R;  // abnormal stem level, (A0 - C0) / (B C0)
};

HomeostaticLevels homeostatic_levels(const FullParams& p);
HomeostaticLevels homeostatic_levels(const AggregatedParams& g);

FullParams parse_params(std::string_view text, const std::string& source = "<string>");
FullParams load_params(const std::filesystem::path& path);
/// Writes every set value; decimal spellings are preserved when known.
std::string format_params(const FullParams& p);

/// Shortest round-trip decimal for a double ("%.17g" trimmed).
std::string format_double(double v);

}  // namespace cml
