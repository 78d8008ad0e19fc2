#pragma once

#include <Eigen/Core>

#include "cml/params.hpp"
#include "cml/state.hpp"

namespace cml {

using JacobianMatrix = Eigen::Matrix<double, 10, 10>;

/// Aggregated right-hand side. Throws std::domain_error on non-finite input.
StateVec rhs(const StateVec& s, const AggregatedParams& g);

/// Closed-form Jacobian; rows x1..x4, y1..y4 are state independent.
/// Throws std::domain_error when a crowding denominator is not positive.
JacobianMatrix jacobian(const StateVec& s, const AggregatedParams& g);

/// max over c_i, C_i: the fastest linear relaxation rate.
double largest_linear_rate(const AggregatedParams& g);

}  // namespace cml
