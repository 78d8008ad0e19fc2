#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "cml/equilibria.hpp"
#include "cml/estimate.hpp"
#include "cml/integrator.hpp"
#include "cml/simulate.hpp"
#include "cml/stability.hpp"

namespace cml {

/// Header `t,x0,...,y4`; every number with 17 significant digits.
std::string trajectory_csv(const Trajectory& tr);
std::string csv_number(double v);

nlohmann::json equilibria_json(const FullParams& p);
std::string equilibria_csv(const FullParams& p);

nlohmann::json stability_json(const std::array<StabilityVerdict, 4>& report);
nlohmann::json phase_json(const FullParams& p);

nlohmann::json sweep_json(const std::vector<SweepPoint>& points, std::string_view vary);
std::string sweep_csv(const std::vector<SweepPoint>& points);

nlohmann::json roundtrip_json(const RoundtripReport& r);
nlohmann::json scenario_json(const Scenario& sc, const ScenarioResult& res);

/// Log-scale line plot of the given components over time.
std::string trajectory_svg(const Trajectory& tr, const std::vector<std::size_t>& components,
                           const std::string& title);

}  // namespace cml
