#include "cml/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cml {

StateVec rhs(const StateVec& s, const AggregatedParams& g) {
  for (double v : s)
    if (!std::isfinite(v)) throw std::domain_error("rhs: non-finite state");
  const auto& [a, c, A, C, b1, b2, B] = g;
  StateVec d;
  const double phiN = 1.0 / (1.0 + b1 * s[X0] + b2 * s[Y0]);
  const double phiA = 1.0 / (1.0 + B * (s[X0] + s[Y0]));
  d[X0] = (a[0] * phiN - a[1] - c[0]) * s[X0] + c[1] * s[X1];
  d[X1] = a[1] * s[X0] - c[1] * s[X1];
  d[X2] = a[2] * s[X0] - c[2] * s[X2];
  d[X3] = a[3] * s[X2] - c[3] * s[X3];
  d[X4] = a[4] * s[X3] - c[4] * s[X4];
  d[Y0] = (A[0] * phiA - A[1] - C[0]) * s[Y0] + C[1] * s[Y1];
  d[Y1] = A[1] * s[Y0] - C[1] * s[Y1];
  d[Y2] = A[2] * s[Y0] - C[2] * s[Y2];
  d[Y3] = A[3] * s[Y2] - C[3] * s[Y3];
  d[Y4] = A[4] * s[Y3] - C[4] * s[Y4];
  return d;
}

JacobianMatrix jacobian(const StateVec& s, const AggregatedParams& g) {
  const auto& [a, c, A, C, b1, b2, B] = g;
  const double den = 1.0 + b1 * s[X0] + b2 * s[Y0];
  const double denA = 1.0 + B * (s[X0] + s[Y0]);
  if (!(den > 0) || !(denA > 0)) throw std::domain_error("jacobian: crowding denominator <= 0");

  JacobianMatrix J = JacobianMatrix::Zero();
  J(X0, X0) = a[0] * (1.0 + b2 * s[Y0]) / (den * den) - a[1] - c[0];
  J(X0, Y0) = -a[0] * b2 * s[X0] / (den * den);
  J(X0, X1) = c[1];
  J(X1, X0) = a[1];
  J(X1, X1) = -c[1];
  J(X2, X0) = a[2];
  J(X2, X2) = -c[2];
  J(X3, X2) = a[3];
  J(X3, X3) = -c[3];
  J(X4, X3) = a[4];
  J(X4, X4) = -c[4];

  J(Y0, Y0) = A[0] * (1.0 + B * s[X0]) / (denA * denA) - A[1] - C[0];
  J(Y0, X0) = -A[0] * B * s[Y0] / (denA * denA);
  J(Y0, Y1) = C[1];
  J(Y1, Y0) = A[1];
  J(Y1, Y1) = -C[1];
  J(Y2, Y0) = A[2];
  J(Y2, Y2) = -C[2];
  J(Y3, Y2) = A[3];
  J(Y3, Y3) = -C[3];
  J(Y4, Y3) = A[4];
  J(Y4, Y4) = -C[4];
  return J;
}

double largest_linear_rate(const AggregatedParams& g) {
  double m = 0;
  for (int i = 1; i < 5; ++i) m = std::max({m, g.c[i], g.C[i]});
  return m;
}

}  // namespace cml
