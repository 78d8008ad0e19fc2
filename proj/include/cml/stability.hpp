#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cml/dynamics.hpp"
#include "cml/equilibria.hpp"
#include "cml/params.hpp"

namespace cml {

enum class FactorOrigin { E0First, E0Second, E1First, E1Second, E2First, E2Second };

/// c2_ λ² + c1_ λ + c0_. The first factor of each pair belongs to the stem
/// block of the lineage absent at the equilibrium (abnormal at E0 and E1,
/// normal at E2), the second to the other one.
struct QuadraticFactor {
  double c2_ = 0, c1_ = 0, c0_ = 0;
  FactorOrigin origin = FactorOrigin::E0First;

  /// Both roots strictly in the left half plane.
  bool stable() const;
};

/// Throws std::invalid_argument for E3 (quartic path).
std::array<QuadraticFactor, 2> quadratic_factors(EquilibriumLabel label, const FullParams& p);

/// Stem-block polynomial at E3: mu[0] λ⁴ + ... + mu[4].
struct QuarticCoeffs {
  std::array<double, 5> mu{};
};

/// Throws InputError when b1 == b2.
QuarticCoeffs quartic_coeffs(const FullParams& p);

struct SignedValue {
  std::string name;
  double value = 0;
  int sign = 0;  // of the exact value when re-evaluated, else of `value`
  bool exact = false;
};

struct RouthHurwitzResult {
  bool stable = false;
  bool orientation_flip = false;  // mu0 <= 0: conditions are not meaningful
  std::array<SignedValue, 7> conditions;  // mu0..mu4, mu1mu2-mu0mu3, third
};

RouthHurwitzResult routh_hurwitz_quartic(const QuarticCoeffs& q);

using Spectrum = std::vector<std::complex<double>>;

/// Eigenvalues sorted by real part, descending. Throws NumericalError if the
/// solver does not converge.
Spectrum spectrum(const JacobianMatrix& J);

enum class Phase { Normal, Chronic, AcceleratedAcute, BoundaryNormalChronic, BoundaryChronicAcute };

Phase classify_phase(const FullParams& p);
/// Same thresholds with explicit levels; `ratio` is b1/b2.
Phase classify_levels(double r, double R, double ratio);

/// The equilibrium that is stable inside a phase, if the phase is open.
std::optional<EquilibriumLabel> stable_equilibrium_of(Phase ph);

enum class Verdict { AsymptoticallyStable, Unstable, Marginal, Undetermined };

struct StabilityVerdict {
  EquilibriumLabel label = EquilibriumLabel::E0;
  Existence existence = Existence::Absent;
  Verdict verdict = Verdict::Undetermined;
  Verdict coefficient_verdict = Verdict::Undetermined;
  Verdict spectrum_verdict = Verdict::Undetermined;

  std::vector<SignedValue> linear_rates;  // c2..c4, C2..C4
  std::vector<QuadraticFactor> factors;   // E0..E2
  std::vector<SignedValue> factor_signs;  // coefficient signs of `factors`
  std::optional<QuarticCoeffs> quartic;   // E3
  std::optional<RouthHurwitzResult> routh_hurwitz;

  Spectrum eigenvalues;
  double max_real = 0;
  double spectral_radius = 0;
  bool exact_arithmetic = false;
};

inline constexpr double kMarginalRelTol = 1e-9;
inline constexpr double kCancellationRelTol = 1e-9;

/// Verdicts for E0..E3. Coefficient signs decide, the spectrum confirms;
/// throws StabilityDisagreement when they contradict.
std::array<StabilityVerdict, 4> stability_report(const FullParams& p);

std::string_view to_string(Phase ph);
std::string_view to_string(Verdict v);
std::string_view to_string(FactorOrigin o);

}  // namespace cml
