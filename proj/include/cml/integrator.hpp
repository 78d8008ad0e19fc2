#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "cml/dynamics.hpp"
#include "cml/state.hpp"

namespace cml {

enum class Method {
  DormandPrince54,  // explicit 5(4), PI control, dense output
  Sdirk2,           // L-stable two-stage SDIRK with embedded first order
};

struct IntegratorOptions {
  Method method = Method::DormandPrince54;
  double rel_tol = 1e-8;
  double abs_tol = 1e-6;
  double max_step = 0;      // 0: unbounded
  double initial_step = 0;  // 0: automatic
  double min_step = 1e-12;  // below this the step "underflows"
  std::size_t max_steps = 50'000'000;
  /// Sample times; must lie in [t0, t1] and increase. Empty: t0 and t1 only.
  std::vector<double> sample_times;
};

struct SolverStats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
  std::size_t jacobian_evals = 0;
  std::size_t clamped = 0;  // step or sample components reset from negative to 0
};

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVec> states;
  SolverStats stats;

  const StateVec& final_state() const { return states.back(); }
};

using RhsFn = std::function<StateVec(double, const StateVec&)>;
using JacFn = std::function<JacobianMatrix(double, const StateVec&)>;

/// Adaptive integration with per-step error control. Step endpoints that dip
/// below zero by at most abs_tol are clamped; deeper undershoot throws.
/// Negative dense-output samples between accepted endpoints are zeroed.
/// `jac` is required for Sdirk2 only.
Trajectory integrate_system(const RhsFn& f, const JacFn& jac, const StateVec& init, double t0,
                            double t1, const IntegratorOptions& opt);

/// Fixed-step integration without clamping, for convergence-order checks.
StateVec integrate_fixed(const RhsFn& f, const JacFn& jac, const StateVec& init, double t0,
                         double t1, std::size_t n_steps, Method method);

}  // namespace cml
