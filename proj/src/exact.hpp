#pragma once

// Exact rational evaluation of parameter expressions.

#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "cml/params.hpp"

namespace cml::exact {

using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

/// [+-]digits[.digits][(e|E)[+-]digits]; throws std::invalid_argument.
Rational from_decimal(std::string_view text);
/// The binary value of `v`, exactly.
Rational from_double(double v);

/// Decimal spelling when the parameter was read from text, else its double.
Rational value(const FullParams& p, std::string_view name);

inline int sign(const Rational& r) { return r.sign(); }

AggregatedT<Rational> aggregate(const FullParams& p);

}  // namespace cml::exact
