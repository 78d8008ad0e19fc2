#include "cml/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cml/dynamics.hpp"

namespace cml {

using nlohmann::json;

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trajectory_csv(const Trajectory& tr) {
  std::string out = "t";
  for (auto n : kComponentNames) out += "," + std::string(n);
  out += "\n";
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    out += csv_number(tr.times[k]);
    for (double v : tr.states[k]) out += "," + csv_number(v);
    out += "\n";
  }
  return out;
}

namespace {

json state_json(const StateVec& s) {
  json j = json::object();
  for (std::size_t i = 0; i < kStateDim; ++i) j[std::string(kComponentNames[i])] = s[i];
  return j;
}

json signed_json(const SignedValue& v) {
  return {{"name", v.name}, {"value", v.value}, {"sign", v.sign}, {"exact", v.exact}};
}

}  // namespace

json equilibria_json(const FullParams& p) {
  const auto g = aggregate(p);
  const auto lv = homeostatic_levels(g);
  json arr = json::array();
  for (const auto& e : steady_states(p)) {
    arr.push_back({{"label", to_string(e.label)},
                   {"existence", to_string(e.existence)},
                   {"state", state_json(e.state)},
                   {"residual", residual(e.state, g)}});
  }
  return {{"r", lv.r}, {"R", lv.R}, {"b1_over_b2", g.b1 / g.b2}, {"equilibria", arr}};
}

std::string equilibria_csv(const FullParams& p) {
  const auto g = aggregate(p);
  std::string out = "label,existence";
  for (auto n : kComponentNames) out += "," + std::string(n);
  out += ",residual\n";
  for (const auto& e : steady_states(p)) {
    out += std::string(to_string(e.label)) + "," + std::string(to_string(e.existence));
    for (double v : e.state) out += "," + csv_number(v);
    out += "," + csv_number(residual(e.state, g)) + "\n";
  }
  return out;
}

json stability_json(const std::array<StabilityVerdict, 4>& report) {
  json arr = json::array();
  for (const auto& v : report) {
    json j = {{"label", to_string(v.label)},
              {"existence", to_string(v.existence)},
              {"verdict", to_string(v.verdict)},
              {"coefficient_verdict", to_string(v.coefficient_verdict)},
              {"spectrum_verdict", to_string(v.spectrum_verdict)},
              {"exact_arithmetic", v.exact_arithmetic}};
    json lin = json::array();
    for (const auto& s : v.linear_rates) lin.push_back(signed_json(s));
    j["linear_rates"] = lin;
    if (!v.factors.empty()) {
      json fs = json::array();
      for (const auto& f : v.factors)
        fs.push_back({{"origin", to_string(f.origin)}, {"coefficients", {f.c2_, f.c1_, f.c0_}}});
      j["quadratic_factors"] = fs;
      json sg = json::array();
      for (const auto& s : v.factor_signs) sg.push_back(signed_json(s));
      j["factor_signs"] = sg;
    }
    if (v.quartic) j["mu"] = v.quartic->mu;
    if (v.routh_hurwitz) {
      json c = json::array();
      for (const auto& s : v.routh_hurwitz->conditions) c.push_back(signed_json(s));
      j["routh_hurwitz"] = {{"stable", v.routh_hurwitz->stable},
                            {"orientation_flip", v.routh_hurwitz->orientation_flip},
                            {"conditions", c}};
    }
    json ev = json::array();
    for (const auto& z : v.eigenvalues) ev.push_back({z.real(), z.imag()});
    j["eigenvalues"] = ev;
    j["max_real"] = v.max_real;
    j["spectral_radius"] = v.spectral_radius;
    arr.push_back(j);
  }
  return arr;
}

json phase_json(const FullParams& p) {
  const auto lv = homeostatic_levels(p);
  const double ratio = p.b1() / p.b2();
  return {{"phase", to_string(classify_levels(lv.r, lv.R, ratio))},
          {"r", lv.r},
          {"R", lv.R},
          {"upper_threshold", ratio * lv.r}};
}

json sweep_json(const std::vector<SweepPoint>& points, std::string_view vary) {
  json arr = json::array();
  for (const auto& pt : points) {
    json j = {{"index", pt.index}, {"value", pt.value}, {"valid", pt.valid}};
    if (!pt.reason.empty()) j["reason"] = pt.reason;
    if (pt.valid) {
      j["r"] = pt.r;
      j["R"] = pt.R;
      j["upper_threshold"] = pt.ratio * pt.r;
      j["phase"] = to_string(pt.phase);
      j["stable"] = pt.stable ? json(to_string(*pt.stable)) : json(nullptr);
      j["stem_normal"] = pt.stem_normal;
      j["stem_abnormal"] = pt.stem_abnormal;
    }
    arr.push_back(j);
  }
  return {{"vary", vary}, {"points", arr}};
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::string out = "index,value,valid,r,R,upper_threshold,phase,stable,stem_normal,stem_abnormal,reason\n";
  for (const auto& pt : points) {
    out += std::to_string(pt.index) + "," + csv_number(pt.value) + "," + (pt.valid ? "1" : "0");
    if (pt.valid) {
      out += "," + csv_number(pt.r) + "," + csv_number(pt.R) + "," + csv_number(pt.ratio * pt.r) + "," +
             std::string(to_string(pt.phase)) + "," + (pt.stable ? std::string(to_string(*pt.stable)) : "") +
             "," + csv_number(pt.stem_normal) + "," + csv_number(pt.stem_abnormal);
    } else {
      out += ",,,,,,,";
    }
    std::string reason = pt.reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    out += "," + reason + "\n";
  }
  return out;
}

json roundtrip_json(const RoundtripReport& r) {
  json items = json::array();
  for (const auto& i : r.items)
    items.push_back({{"quantity", i.quantity},
                     {"target", i.target},
                     {"achieved", i.achieved},
                     {"rel_deviation", i.rel_deviation},
                     {"within", i.within}});
  return {{"tolerance", r.tolerance}, {"all_within", r.all_within()}, {"items", items}};
}

json scenario_json(const Scenario& sc, const ScenarioResult& res) {
  json j = {{"name", sc.name},
            {"horizon", sc.horizon},
            {"method", to_string(sc.method)},
            {"rel_tol", sc.rel_tol},
            {"abs_tol", sc.abs_tol},
            {"samples", res.trajectory.times.size()},
            {"steps", res.trajectory.stats.steps},
            {"rejected", res.trajectory.stats.rejected},
            {"clamped", res.trajectory.stats.clamped},
            {"final_state", state_json(res.trajectory.final_state())}};
  j["expected"] = sc.expected ? json(to_string(*sc.expected)) : json(nullptr);
  j["detected"] = res.detected ? json(to_string(*res.detected)) : json(nullptr);
  j["asymptotic"] = res.asymptotic ? state_json(*res.asymptotic) : json(nullptr);
  json w = json::object();
  for (std::size_t g = 0; g < 5; ++g) w[std::string(kGroupNames[g])] = sc.windows[g];
  j["windows"] = w;
  return j;
}

std::string trajectory_svg(const Trajectory& tr, const std::vector<std::size_t>& components,
                           const std::string& title) {
  constexpr double W = 720, H = 420, L = 70, R = 20, T = 40, Bm = 50;
  static const char* const colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                       "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  double lo = 1e300, hi = 1;
  for (const auto& s : tr.states)
    for (auto c : components)
      if (s[c] > 0) {
        lo = std::min(lo, s[c]);
        hi = std::max(hi, s[c]);
      }
  lo = std::max(std::floor(std::log10(std::max(lo, 1e-3))), -3.0);
  hi = std::ceil(std::log10(hi));
  if (hi <= lo) hi = lo + 1;
  const double t0 = tr.times.front(), t1 = tr.times.back();
  auto X = [&](double t) { return L + (W - L - R) * (t - t0) / (t1 - t0 > 0 ? t1 - t0 : 1); };
  auto Y = [&](double v) {
    double lv = std::log10(std::max(v, std::pow(10.0, lo)));
    return T + (H - T - Bm) * (1 - (lv - lo) / (hi - lo));
  };
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\">" << title
    << "</text>\n";
  for (int e = static_cast<int>(lo); e <= static_cast<int>(hi); ++e) {
    double y = Y(std::pow(10.0, e));
    o << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << y << "\" y2=\"" << y
      << "\" stroke=\"#ddd\"/><text x=\"" << L - 6 << "\" y=\"" << y + 4
      << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">1e" << e << "</text>\n";
  }
  o << "<text x=\"" << (W + L) / 2 << "\" y=\"" << H - 12
    << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">t (days), " << t0 << " to " << t1
    << "</text>\n";
  for (std::size_t n = 0; n < components.size(); ++n) {
    const auto c = components[n];
    o << "<polyline fill=\"none\" stroke=\"" << colors[c % 10] << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < tr.times.size(); ++k) o << X(tr.times[k]) << "," << Y(tr.states[k][c]) << " ";
    o << "\"/>\n<text x=\"" << W - R - 40 << "\" y=\"" << T + 14 * (n + 1) << "\" fill=\"" << colors[c % 10]
      << "\" font-size=\"12\" font-family=\"sans-serif\">" << kComponentNames[c] << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace cml
