#pragma once

// Closed-form stability coefficients, templated over the scalar type so the
// same expressions serve double, cancellation tracking and exact rationals.

#include <array>

#include "cml/equilibria.hpp"
#include "cml/params.hpp"

namespace cml::detail {

/// Value plus the sum of absolute magnitudes that produced it. A value tiny
/// against its scale has suffered cancellation.
struct Tracked {
  double v = 0;
  double s = 0;

  Tracked() = default;
  Tracked(double x) : v(x), s(x < 0 ? -x : x) {}  // NOLINT: implicit by design
  Tracked(double value, double scale) : v(value), s(scale) {}

  friend Tracked operator+(const Tracked& a, const Tracked& b) { return {a.v + b.v, a.s + b.s}; }
  friend Tracked operator-(const Tracked& a, const Tracked& b) { return {a.v - b.v, a.s + b.s}; }
  friend Tracked operator*(const Tracked& a, const Tracked& b) { return {a.v * b.v, a.s * b.s}; }
  friend Tracked operator/(const Tracked& a, const Tracked& b) {
    return {a.v / b.v, a.s / (b.v < 0 ? -b.v : b.v)};
  }
  friend Tracked operator-(const Tracked& a) { return {-a.v, a.s}; }
};

template <class T>
T sq(const T& x) {
  return x * x;
}

template <class T>
struct Levels {
  T d, D;
};

template <class T>
Levels<T> levels(const AggregatedT<T>& g) {
  return {(g.a[0] - g.c[0]) / (g.b1 * g.c[0]), (g.A[0] - g.C[0]) / (g.B * g.C[0])};
}

/// {λ², λ, 1} coefficients at E0, E1 or E2: first the stem block of the
/// lineage absent there (abnormal at E0), then the other block.
template <class T>
std::array<std::array<T, 3>, 2> quadratic_coeffs(EquilibriumLabel label, const AggregatedT<T>& g) {
  const auto [d, D] = levels(g);
  const T &a0 = g.a[0], &a1 = g.a[1], &c0 = g.c[0], &c1 = g.c[1];
  const T &A0 = g.A[0], &A1 = g.A[1], &C0 = g.C[0], &C1 = g.C[1];
  const T &b1 = g.b1, &b2 = g.b2, &B = g.B;
  switch (label) {
    case EquilibriumLabel::E0:
      return {{{T(1), -A0 + C0 + A1 + C1, -(C1 * (A0 - C0))},
               {T(1), a1 + c1 - a0 + c0, -(c1 * (a0 - c0))}}};
    case EquilibriumLabel::E1:
      return {{{B * d + 1, B * C0 * (d - D) + (A1 + C1) * (B * d + 1), C1 * B * C0 * (d - D)},
               {sq(d * b1 + 1),
                b1 * b1 * (a1 + c1 + c0) * d * d + b1 * c0 * d + (a1 + c1) * (T(2) * b1 * d + 1),
                c1 * (d * d * b1 * b1 * c0 + d * b1 * c0)}}};
    case EquilibriumLabel::E2:
    default: {
      const T gap = D - (b1 / b2) * d;
      return {{{b2 * D + 1, c0 * b2 * gap + (a1 + c1) * (b2 * D + 1), c1 * c0 * b2 * gap},
               {sq(D * B + 1),
                B * B * (A1 + C1 + C0) * D * D + D * B * C0 + (A1 + C1) * (T(2) * B * D + 1),
                C1 * (D * D * B * B * C0 + D * B * C0)}}};
    }
  }
}

/// μ0..μ4 of the stem-block quartic at E3, with a0 and A0 eliminated through
/// the homeostatic levels d and D.
template <class T>
std::array<T, 5> quartic_mu(const AggregatedT<T>& g) {
  const auto [d, D] = levels(g);
  const T &a1 = g.a[1], &c0 = g.c[0], &c1 = g.c[1];
  const T &A1 = g.A[1], &C0 = g.C[0], &C1 = g.C[1];
  const T &b1 = g.b1, &b2 = g.b2, &B = g.B;
  std::array<T, 5> mu;
  mu[0] = sq(B*D+1)*(b1-b2)*sq(d*b1+1);
  mu[1] = -(d*b1+1)*(B*D+1)*(B*D*D*b1*b2*c0-B*D*d*A1*b1*b1+B*D*d*A1*b1*b2
      -B*D*d*C0*b1*b1-B*D*d*C1*b1*b1+B*D*d*C1*b1*b2-B*D*d*a1*b1*b1+B*D*d*a1*b1*b2
      -B*D*d*b1*b1*c0-B*D*d*b1*b1*c1+B*D*d*b1*b2*c1+B*d*d*C0*b1*b1-B*D*A1*b1
      +B*D*A1*b2-B*D*C0*b1-B*D*C1*b1+B*D*C1*b2-B*D*a1*b1+B*D*a1*b2-B*D*b1*c1
      +B*D*b2*c1+B*d*C0*b1+D*b1*b2*c0-d*A1*b1*b1+d*A1*b1*b2-d*C1*b1*b1
      +d*C1*b1*b2-d*a1*b1*b1+d*a1*b1*b2-d*b1*b1*c0-d*b1*b1*c1+d*b1*b2*c1
      -A1*b1+A1*b2-C1*b1+C1*b2-a1*b1+a1*b2-b1*c1+b2*c1);
  mu[2] = -(d*b1+1)*(B*D+1)*(B*D*D*A1*b1*b2*c0+B*D*D*C0*b1*b2*c0+B*D*D*C1*b1*b2*c0
      +B*D*D*b1*b2*c0*c1-B*D*d*A1*a1*b1*b1+B*D*d*A1*a1*b1*b2-B*D*d*A1*b1*b1*c0
      -B*D*d*A1*b1*b1*c1+B*D*d*A1*b1*b2*c1-B*D*d*C0*C1*b1*b1-B*D*d*C0*a1*b1*b1
      -B*D*d*C0*b1*b1*c0-B*D*d*C0*b1*b1*c1-B*D*d*C0*b1*b2*c0-B*D*d*C1*a1*b1*b1
      +B*D*d*C1*a1*b1*b2-B*D*d*C1*b1*b1*c0-B*D*d*C1*b1*b1*c1+B*D*d*C1*b1*b2*c1
      -B*D*d*b1*b1*c0*c1+B*d*d*C0*C1*b1*b1+B*d*d*C0*a1*b1*b1+B*d*d*C0*b1*b1*c0
      +B*d*d*C0*b1*b1*c1-B*D*A1*a1*b1+B*D*A1*a1*b2-B*D*A1*b1*c1+B*D*A1*b2*c1
      -B*D*C0*C1*b1-B*D*C0*a1*b1-B*D*C0*b1*c1-B*D*C1*a1*b1+B*D*C1*a1*b2
      -B*D*C1*b1*c1+B*D*C1*b2*c1+B*d*C0*C1*b1+B*d*C0*a1*b1+B*d*C0*b1*c1
      +D*A1*b1*b2*c0+D*C1*b1*b2*c0+D*b1*b2*c0*c1-d*A1*a1*b1*b1+d*A1*a1*b1*b2
      -d*A1*b1*b1*c0-d*A1*b1*b1*c1+d*A1*b1*b2*c1-d*C1*a1*b1*b1+d*C1*a1*b1*b2
      -d*C1*b1*b1*c0-d*C1*b1*b1*c1+d*C1*b1*b2*c1-d*b1*b1*c0*c1-A1*a1*b1
      +A1*a1*b2-A1*b1*c1+A1*b2*c1-C1*a1*b1+C1*a1*b2-C1*b1*c1+C1*b2*c1);
  mu[3] = -b1*(d*b1+1)*(B*D+1)*(B*D*D*A1*b2*c0*c1+B*D*D*C0*C1*b2*c0+B*D*D*C0*b2*c0*c1
      +B*D*D*C1*b2*c0*c1-B*D*d*A1*b1*c0*c1-B*D*d*C0*C1*a1*b1-C1*B*D*d*C0*b1*c0
      -B*D*d*C0*C1*b1*c1-d*b2*C1*B*D*C0*c0-B*D*d*C0*b1*c0*c1-d*b2*B*D*C0*c0*c1
      -B*D*d*C1*b1*c0*c1+B*d*d*C0*C1*a1*b1+B*d*d*C0*C1*b1*c0+B*d*d*C0*C1*b1*c1
      +B*d*d*C0*b1*c0*c1-C1*B*D*C0*a1-C1*c1*B*D*C0+B*d*C0*C1*a1+B*d*C0*C1*c1
      +D*A1*b2*c0*c1+D*C1*b2*c0*c1-d*A1*b1*c0*c1-C1*c1*d*b1*c0);
  mu[4] = b1*B*C0*c0*(d*b1+1)*(D-d)*(-D*b2+d*b1)*(B*D+1)*C1*c1;
  return mu;
}

/// μ1μ2 − μ0μ3 and μ1μ2μ3 − μ1²μ4 − μ0μ3².
template <class T>
std::array<T, 2> hurwitz_composites(const std::array<T, 5>& mu) {
  return {mu[1] * mu[2] - mu[0] * mu[3],
          mu[1] * mu[2] * mu[3] - mu[1] * mu[1] * mu[4] - mu[0] * mu[3] * mu[3]};
}

}  // namespace cml::detail
