#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cml/equilibria.hpp"
#include "cml/integrator.hpp"
#include "cml/params.hpp"
#include "cml/stability.hpp"

namespace cml {

/// Integrates the aggregated system. Unless `extra` says otherwise the step
/// is capped at 2 / largest_linear_rate and 1001 uniform samples are taken.
Trajectory integrate(const FullParams& p, const StateVec& init, double horizon, double rel_tol,
                     double abs_tol, IntegratorOptions extra = {});

std::vector<double> uniform_times(double t0, double t1, std::size_t n);

/// Componentwise |s - target| <= max(tol |target|, floor).
bool near_state(const StateVec& s, const StateVec& target, double tol, double floor = 1.0);

/// The admissible closed-form equilibrium matching the final state, provided
/// the residual there is also below `tol`.
std::optional<EquilibriumLabel> detect_equilibrium(const Trajectory& tr, const FullParams& p,
                                                   double tol = 1e-3);

struct Scenario {
  std::string name;
  FullParams params;
  StateVec init{};
  double horizon = 0;                // long run used for detection
  std::array<double, 5> windows{};   // per compartment group, plotting span
  std::size_t samples = 2001;        // uniform over [0, horizon]
  std::size_t window_samples = 1001; // uniform over each window
  std::optional<EquilibriumLabel> expected;
  double rel_tol = 1e-8;
  double abs_tol = 1e-6;
  double detect_tol = 1e-3;
  Method method = Method::DormandPrince54;
};

/// `params` may name a bundled parameter set or a path relative to the
/// scenario file.
Scenario parse_scenario(std::string_view text, const std::string& source = "<string>",
                        const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

struct ScenarioResult {
  Trajectory trajectory;
  std::optional<EquilibriumLabel> detected;
  std::optional<StateVec> asymptotic;  // mean of the last 1% of uniform samples
};

ScenarioResult run_scenario(const Scenario& sc);

struct WindowCheck {
  std::size_t component = 0;
  double time = 0;
  double value = 0;
  double target = 0;
  double tolerance = 0;
  bool pass = false;
};

/// State of each component at the end of its group window against `target`.
std::vector<WindowCheck> check_windows(const Trajectory& tr, const Scenario& sc,
                                       const StateVec& target, double rel_tol = 1e-3,
                                       double floor = 1.0);

/// Samples with t <= t_max (all when t_max is infinite).
Trajectory slice(const Trajectory& tr, double t_max);

struct SweepPoint {
  std::size_t index = 0;
  double value = 0;
  bool valid = false;
  std::string reason;  // why the point was skipped
  double r = 0, R = 0, ratio = 0;
  Phase phase = Phase::Normal;
  std::optional<EquilibriumLabel> stable;
  double stem_normal = 0, stem_abnormal = 0;  // of the stable equilibrium
};

/// `vary` is one of k17, k21, k22, k29, B, or R (k29 is solved so that the
/// abnormal level equals the grid value). Results come back in grid order.
std::vector<SweepPoint> sweep_R(const FullParams& base, std::string_view vary,
                                const std::vector<double>& grid, unsigned jobs = 0);

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view s);

}  // namespace cml
