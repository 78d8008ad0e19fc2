#include "cml/stability.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cml/errors.hpp"
#include "exact.hpp"
#include "stability_formulas.hpp"

namespace cml {

namespace {

using detail::Tracked;

template <class T>
struct ConditionTable {
  std::array<T, 6> linear;                                // c2..c4, C2..C4
  std::array<std::array<std::array<T, 3>, 2>, 3> quad;    // E0..E2
  std::array<T, 5> mu;
  std::array<T, 2> composite;
};

template <class T>
ConditionTable<T> evaluate(const AggregatedT<T>& g, bool quartic) {
  ConditionTable<T> t{};
  for (int i = 0; i < 3; ++i) {
    t.linear[i] = g.c[i + 2];
    t.linear[i + 3] = g.C[i + 2];
    t.quad[i] = detail::quadratic_coeffs(static_cast<EquilibriumLabel>(i), g);
  }
  if (quartic) {
    t.mu = detail::quartic_mu(g);
    t.composite = detail::hurwitz_composites(t.mu);
  }
  return t;
}

template <class T, class F>
void for_each_value(ConditionTable<T>& t, bool quartic, F&& f) {
  for (auto& v : t.linear) f(v);
  for (auto& pair : t.quad)
    for (auto& q : pair)
      for (auto& v : q) f(v);
  if (quartic) {
    for (auto& v : t.mu) f(v);
    for (auto& v : t.composite) f(v);
  }
}

int sign_of(double v) { return (v > 0) - (v < 0); }

/// Signs of all conditions, exact when any floating value is within the
/// cancellation tolerance of zero.
struct SignTable {
  ConditionTable<double> value;
  ConditionTable<int> sign;
  bool exact = false;
};

SignTable sign_table(const FullParams& p, bool quartic) {
  auto tracked_agg = aggregate_with<Tracked>([&](int j) { return Tracked(p.k(j)); }, Tracked(p.b1()),
                                             Tracked(p.b2()), Tracked(p.B()));
  auto tracked = evaluate(tracked_agg, quartic);

  SignTable out;
  bool cancelled = false;
  for_each_value(tracked, quartic, [&](Tracked& v) {
    if (!(std::abs(v.v) > kCancellationRelTol * v.s)) cancelled = true;
  });

  // Copy values and floating signs in traversal order.
  std::vector<double> values;
  for_each_value(tracked, quartic, [&](Tracked& v) { values.push_back(v.v); });
  std::vector<int> signs;
  if (cancelled) {
    auto ex = evaluate(exact::aggregate(p), quartic);
    for_each_value(ex, quartic, [&](exact::Rational& v) { signs.push_back(exact::sign(v)); });
    out.exact = true;
  } else {
    for (double v : values) signs.push_back(sign_of(v));
  }
  std::size_t i = 0;
  for_each_value(out.value, quartic, [&](double& v) { v = values[i++]; });
  i = 0;
  for_each_value(out.sign, quartic, [&](int& s) { s = signs[i++]; });
  return out;
}

const char* const kLinearNames[6] = {"c2", "c3", "c4", "C2", "C3", "C4"};
const char* const kRhNames[7] = {"mu0",
                                 "mu1",
                                 "mu2",
                                 "mu3",
                                 "mu4",
                                 "mu1*mu2 - mu0*mu3",
                                 "mu1*mu2*mu3 - mu1^2*mu4 - mu0*mu3^2"};

/// Merge rule: any Unstable wins, then Marginal, then Stable.
Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::Unstable || b == Verdict::Unstable) return Verdict::Unstable;
  if (a == Verdict::Undetermined || b == Verdict::Undetermined) return Verdict::Undetermined;
  if (a == Verdict::Marginal || b == Verdict::Marginal) return Verdict::Marginal;
  return Verdict::AsymptoticallyStable;
}

/// Roots of s2 λ² + s1 λ + s0 from coefficient signs alone.
Verdict quadratic_verdict(int s2, int s1, int s0) {
  if (s2 == 0) return Verdict::Undetermined;
  s1 *= s2;
  s0 *= s2;
  if (s0 < 0 || (s0 > 0 && s1 < 0) || (s0 == 0 && s1 < 0)) return Verdict::Unstable;
  if (s0 > 0 && s1 > 0) return Verdict::AsymptoticallyStable;
  return Verdict::Marginal;
}

Verdict rh_verdict(const RouthHurwitzResult& rh) {
  if (rh.orientation_flip) return Verdict::Undetermined;
  bool zero = false;
  for (const auto& c : rh.conditions) {
    if (c.sign < 0) return Verdict::Unstable;
    zero = zero || c.sign == 0;
  }
  return zero ? Verdict::Marginal : Verdict::AsymptoticallyStable;
}

Verdict spectrum_verdict(double max_real, double radius) {
  if (std::abs(max_real) <= kMarginalRelTol * radius) return Verdict::Marginal;
  return max_real < 0 ? Verdict::AsymptoticallyStable : Verdict::Unstable;
}

/// Diagonal similarity by powers of two equalising row and column norms, so
/// the 1e-4 and 1e4 scales of the cascade do not swamp each other.
JacobianMatrix balance(JacobianMatrix A) {
  constexpr double radix = 2.0;
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < A.rows(); ++i) {
      double c = 0, r = 0;
      for (int j = 0; j < A.cols(); ++j) {
        if (j == i) continue;
        c += std::abs(A(j, i));
        r += std::abs(A(i, j));
      }
      if (c == 0 || r == 0) continue;
      double f = 1, g = r / radix;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        A.row(i) /= f;
        A.col(i) *= f;
      }
    }
  }
  return A;
}

QuadraticFactor make_factor(const std::array<double, 3>& c, FactorOrigin o) {
  return {c[0], c[1], c[2], o};
}

}  // namespace

bool QuadraticFactor::stable() const {
  return quadratic_verdict(sign_of(c2_), sign_of(c1_), sign_of(c0_)) == Verdict::AsymptoticallyStable;
}

std::array<QuadraticFactor, 2> quadratic_factors(EquilibriumLabel label, const FullParams& p) {
  if (label == EquilibriumLabel::E3)
    throw std::invalid_argument("E3 has no quadratic factors; use quartic_coeffs");
  auto q = detail::quadratic_coeffs(label, aggregate(p));
  int base = 2 * static_cast<int>(label);
  return {make_factor(q[0], static_cast<FactorOrigin>(base)),
          make_factor(q[1], static_cast<FactorOrigin>(base + 1))};
}

QuarticCoeffs quartic_coeffs(const FullParams& p) {
  const AggregatedParams g = aggregate(p);
  if (g.b1 == g.b2) throw InputError("quartic coefficients are degenerate when b1 == b2");
  return {detail::quartic_mu(g)};
}

RouthHurwitzResult routh_hurwitz_quartic(const QuarticCoeffs& q) {
  RouthHurwitzResult r;
  auto comp = detail::hurwitz_composites(q.mu);
  for (int i = 0; i < 7; ++i) {
    double v = i < 5 ? q.mu[i] : comp[i - 5];
    r.conditions[i] = {kRhNames[i], v, sign_of(v), false};
  }
  r.orientation_flip = !(q.mu[0] > 0);
  r.stable = !r.orientation_flip &&
             std::all_of(r.conditions.begin(), r.conditions.end(), [](const SignedValue& c) { return c.sign > 0; });
  return r;
}

Spectrum spectrum(const JacobianMatrix& J) {
  if (!J.allFinite()) throw NumericalError("spectrum: non-finite Jacobian");
  Eigen::EigenSolver<JacobianMatrix> es(balance(J), false);
  if (es.info() != Eigen::Success) throw NumericalError("spectrum: eigenvalue iteration did not converge");
  Spectrum ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  return ev;
}

Phase classify_levels(double r, double R, double ratio) {
  auto near = [](double x, double y) { return std::abs(x - y) <= kThresholdRelTol * std::max(std::abs(x), std::abs(y)); };
  const double upper = ratio * r;
  if (near(R, r)) return Phase::BoundaryNormalChronic;
  if (near(R, upper)) return Phase::BoundaryChronicAcute;
  if (R < r) return Phase::Normal;
  if (R < upper) return Phase::Chronic;
  return Phase::AcceleratedAcute;
}

Phase classify_phase(const FullParams& p) {
  const auto [r, R] = homeostatic_levels(p);
  return classify_levels(r, R, p.b1() / p.b2());
}

std::optional<EquilibriumLabel> stable_equilibrium_of(Phase ph) {
  switch (ph) {
    case Phase::Normal: return EquilibriumLabel::E1;
    case Phase::Chronic: return EquilibriumLabel::E3;
    case Phase::AcceleratedAcute: return EquilibriumLabel::E2;
    default: return std::nullopt;
  }
}

std::array<StabilityVerdict, 4> stability_report(const FullParams& p) {
  const AggregatedParams g = aggregate(p);
  const auto eqs = steady_states(p);
  const bool quartic = g.b1 != g.b2;
  const SignTable t = sign_table(p, quartic);

  std::array<StabilityVerdict, 4> out;
  for (int e = 0; e < 4; ++e) {
    StabilityVerdict& v = out[e];
    v.label = static_cast<EquilibriumLabel>(e);
    v.existence = eqs[e].existence;
    v.exact_arithmetic = t.exact;

    Verdict coef = Verdict::AsymptoticallyStable;
    for (int i = 0; i < 6; ++i) {
      v.linear_rates.push_back({kLinearNames[i], t.value.linear[i], t.sign.linear[i], t.exact});
      // eigenvalue -rate
      coef = combine(coef, t.sign.linear[i] > 0   ? Verdict::AsymptoticallyStable
                           : t.sign.linear[i] < 0 ? Verdict::Unstable
                                                  : Verdict::Marginal);
    }

    if (e < 3) {
      for (int f = 0; f < 2; ++f) {
        const auto& val = t.value.quad[e][f];
        const auto& sg = t.sign.quad[e][f];
        v.factors.push_back(make_factor(val, static_cast<FactorOrigin>(2 * e + f)));
        static const char* const coeff_names[3] = {"lambda^2", "lambda^1", "lambda^0"};
        for (int c = 0; c < 3; ++c)
          v.factor_signs.push_back({std::string(to_string(static_cast<FactorOrigin>(2 * e + f))) + " " +
                                        coeff_names[c],
                                    val[c], sg[c], t.exact});
        coef = combine(coef, quadratic_verdict(sg[0], sg[1], sg[2]));
      }
    } else if (quartic) {
      v.quartic = QuarticCoeffs{t.value.mu};
      RouthHurwitzResult rh = routh_hurwitz_quartic(*v.quartic);
      for (int i = 0; i < 7; ++i) {
        rh.conditions[i].sign = i < 5 ? t.sign.mu[i] : t.sign.composite[i - 5];
        rh.conditions[i].exact = t.exact;
      }
      rh.orientation_flip = rh.conditions[0].sign <= 0;
      rh.stable = !rh.orientation_flip &&
                  std::all_of(rh.conditions.begin(), rh.conditions.end(),
                              [](const SignedValue& c) { return c.sign > 0; });
      coef = combine(coef, rh_verdict(rh));
      v.routh_hurwitz = rh;
    } else {
      coef = Verdict::Undetermined;
    }
    v.coefficient_verdict = coef;

    Verdict spec = Verdict::Undetermined;
    if (e < 3 || quartic) {
      try {
        v.eigenvalues = spectrum(jacobian(eqs[e].state, g));
        v.max_real = v.eigenvalues.front().real();
        for (const auto& z : v.eigenvalues) v.spectral_radius = std::max(v.spectral_radius, std::abs(z));
        spec = spectrum_verdict(v.max_real, v.spectral_radius);
      } catch (const std::domain_error&) {
        // Analytic continuation outside the admissible region: no Jacobian.
      }
    }
    v.spectrum_verdict = spec;

    if (coef == Verdict::Undetermined) {
      v.verdict = spec;
    } else if (spec == Verdict::Undetermined || spec == Verdict::Marginal) {
      v.verdict = spec == Verdict::Marginal ? Verdict::Marginal : coef;
    } else if (coef == Verdict::Marginal && spec == Verdict::Unstable) {
      v.verdict = Verdict::Unstable;
    } else if (coef != spec) {
      std::ostringstream msg;
      msg << to_string(v.label) << ": coefficient signs say " << to_string(coef)
          << " but the spectrum says " << to_string(spec) << " (max Re = " << v.max_real << ")";
      throw StabilityDisagreement(msg.str());
    } else {
      v.verdict = coef;
    }
  }
  return out;
}

std::string_view to_string(Phase ph) {
  switch (ph) {
    case Phase::Normal: return "Normal";
    case Phase::Chronic: return "Chronic";
    case Phase::AcceleratedAcute: return "AcceleratedAcute";
    case Phase::BoundaryNormalChronic: return "BoundaryNormalChronic";
    case Phase::BoundaryChronicAcute: return "BoundaryChronicAcute";
  }
  return "Normal";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::AsymptoticallyStable: return "AsymptoticallyStable";
    case Verdict::Unstable: return "Unstable";
    case Verdict::Marginal: return "Marginal";
    case Verdict::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

std::string_view to_string(FactorOrigin o) {
  static constexpr std::string_view names[] = {"E0-first", "E0-second", "E1-first",
                                               "E1-second", "E2-first", "E2-second"};
  return names[static_cast<int>(o)];
}

}  // namespace cml
