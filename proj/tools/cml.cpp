// Command-line front end. Exit codes: 0 success, 1 user or validation error,
// 2 numerical failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cml/assets.hpp"
#include "cml/errors.hpp"
#include "cml/estimate.hpp"
#include "cml/kv_file.hpp"
#include "cml/network.hpp"
#include "cml/params.hpp"
#include "cml/report.hpp"
#include "cml/simulate.hpp"
#include "cml/stability.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kUserError = 1, kNumericalError = 2;

fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("CML_OUT_DIR"); env && *env) return env;
  return "out";
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cml::InputError("cannot write " + path.string());
  out << text;
}

void emit(const std::string& text, const std::string& out_file) {
  if (out_file.empty())
    std::cout << text;
  else
    write_file(out_file, text);
}

cml::FullParams load_params_arg(const std::string& name) {
  return cml::load_params(cml::resolve_asset(name, "params", ".params"));
}

void report_warnings(const cml::FullParams& p) {
  for (const auto& v : cml::validate(p))
    if (v.severity == cml::Severity::Warning) std::cerr << "warning: " << v.inequality << " fails: " << v.detail << "\n";
}

int cmd_parse(const std::string& file, const std::string& format) {
  const auto net = cml::load_network(cml::resolve_asset(file, "network", ".rxn"));
  const auto diags = cml::validate_network(net);
  if (format == "json") {
    json d = json::array();
    for (const auto& x : diags)
      d.push_back({{"kind", cml::to_string(x.kind)}, {"subject", x.subject}, {"message", x.message}});
    json sp = json::array();
    for (const auto& s : net.species) sp.push_back(s.name);
    std::cout << json{{"species", sp},
                      {"reactions", net.declared_reactions},
                      {"irreversible_reactions", net.reactions.size()},
                      {"noop_reactions", net.noop_count()},
                      {"diagnostics", d}}
                     .dump(2)
              << "\n";
    return kOk;
  }
  std::cout << "species: " << net.species.size() << "\n"
            << "reactions: " << net.declared_reactions << "\n"
            << "irreversible reactions: " << net.reactions.size() << "\n"
            << "no-op reactions: " << net.noop_count() << "\n";
  for (const auto& x : diags) std::cout << "diagnostic: " << x.message << "\n";
  return kOk;
}

int cmd_equilibria(const std::string& params, const std::string& format, const std::string& out) {
  const auto p = load_params_arg(params);
  report_warnings(p);
  emit(format == "csv" ? cml::equilibria_csv(p) : cml::equilibria_json(p).dump(2) + "\n", out);
  return kOk;
}

int cmd_stability(const std::string& params, const std::string& out) {
  const auto p = load_params_arg(params);
  report_warnings(p);
  json j = {{"phase", cml::phase_json(p)}, {"equilibria", cml::stability_json(cml::stability_report(p))}};
  emit(j.dump(2) + "\n", out);
  return kOk;
}

int cmd_classify(const std::string& params, const std::string& format) {
  const auto p = load_params_arg(params);
  report_warnings(p);
  const json j = cml::phase_json(p);
  if (format == "json") {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << j["phase"].get<std::string>() << "\n"
              << "r = " << cml::csv_number(j["r"]) << "\n"
              << "R = " << cml::csv_number(j["R"]) << "\n"
              << "(b1/b2)r = " << cml::csv_number(j["upper_threshold"]) << "\n";
  }
  return kOk;
}

struct SimulateArgs {
  std::string scenario, out, format = "csv", method;
  double rel_tol = 0, abs_tol = 0;
};

int cmd_simulate(const SimulateArgs& a) {
  auto sc = cml::load_scenario(cml::resolve_asset(a.scenario, "scenarios", ".scenario"));
  if (a.rel_tol > 0) sc.rel_tol = a.rel_tol;
  if (a.abs_tol > 0) sc.abs_tol = a.abs_tol;
  if (!a.method.empty()) sc.method = *cml::parse_method(a.method);
  const auto res = cml::run_scenario(sc);
  const fs::path dir = output_dir(a.out);
  fs::create_directories(dir);

  json summary = cml::scenario_json(sc, res);
  if (a.format != "json") {
    write_file(dir / (sc.name + ".csv"), cml::trajectory_csv(res.trajectory));
    for (std::size_t g = 0; g < 5; ++g) {
      const auto part = cml::slice(res.trajectory, sc.windows[g]);
      const std::string stem = sc.name + "_" + std::string(cml::kGroupNames[g]);
      write_file(dir / (stem + ".csv"), cml::trajectory_csv(part));
      if (a.format == "svg")
        write_file(dir / (stem + ".svg"), cml::trajectory_svg(part, {g, g + 5}, sc.name + " " + std::string(cml::kGroupNames[g])));
    }
  }
  write_file(dir / (sc.name + ".json"), summary.dump(2) + "\n");

  std::cout << sc.name << ": detected " << (res.detected ? std::string(cml::to_string(*res.detected)) : "none");
  if (sc.expected) std::cout << ", expected " << cml::to_string(*sc.expected);
  std::cout << ", " << res.trajectory.stats.steps << " steps, output in " << dir.string() << "\n";
  return kOk;
}

struct SweepArgs {
  std::string params, vary, format = "csv", out, values;
  double from = 0, to = 0;
  std::size_t points = 0;
  unsigned jobs = 0;
};

int cmd_sweep(const SweepArgs& a) {
  const auto p = load_params_arg(a.params);
  std::vector<double> grid;
  if (!a.values.empty()) {
    std::stringstream ss(a.values);
    for (std::string item; std::getline(ss, item, ',');) {
      auto v = cml::parse_number(item);
      if (!v) throw cml::InputError("--values: '" + item + "' is not a number");
      grid.push_back(*v);
    }
  } else {
    if (a.points < 2) throw cml::InputError("sweep needs --values or --from/--to with --points >= 2");
    grid = cml::uniform_times(a.from, a.to, a.points);
  }
  const auto pts = cml::sweep_R(p, a.vary, grid, a.jobs);
  for (const auto& pt : pts)
    if (!pt.valid) std::cerr << "skipped point " << pt.index << " (" << a.vary << " = " << pt.value << "): " << pt.reason << "\n";
  emit(a.format == "json" ? cml::sweep_json(pts, a.vary).dump(2) + "\n" : cml::sweep_csv(pts), a.out);
  return kOk;
}

int cmd_estimate(const std::string& inputs, const std::string& out, const std::string& format) {
  const auto in = cml::load_estimation_inputs(cml::resolve_asset(inputs, "estimate", ".inputs"));
  const auto res = cml::estimate_params(in);
  const auto rep = cml::check_roundtrip(res.params, in);
  if (!out.empty()) write_file(out, cml::format_params(res.params));
  if (format == "json") {
    json j = {{"x0", res.x0}, {"x1", res.x1}, {"y0", res.y0}, {"y1", res.y1},
              {"k8_plus_4k10", res.differentiation_sum}, {"progenitor_balance", res.progenitor_balance},
              {"determinant", res.determinant}, {"roundtrip", cml::roundtrip_json(rep)}};
    json params = json::object();
    for (const auto& n : cml::FullParams::required_names()) params[n] = res.params.get(n);
    j["params"] = params;
    std::cout << j.dump(2) << "\n";
    return kOk;
  }
  if (out.empty()) std::cout << cml::format_params(res.params) << "\n";
  std::cout << "round trip against E1 (relative tolerance " << rep.tolerance << "):\n";
  for (const auto& i : rep.items) {
    char line[200];
    std::snprintf(line, sizeof line, "  %-24s target %-14.10g achieved %-16.10g deviation %.3e %s\n",
                  i.quantity.c_str(), i.target, i.achieved, i.rel_deviation, i.within ? "ok" : "DEVIATES");
    std::cout << line;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clonal hematopoiesis / CML model: equilibria, stability, simulation, estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "cml 1.0");

  std::string file, params, format, out;
  auto* parse = app.add_subcommand("parse", "Check a reaction-network file");
  parse->add_option("file", file, "network file or bundled name (cml)")->required();
  parse->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* equilibria = app.add_subcommand("equilibria", "Closed-form steady states with residuals");
  equilibria->add_option("--params", params, "parameter file or bundled name")->required();
  equilibria->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  equilibria->add_option("--out", out, "write to file instead of stdout");

  auto* stability = app.add_subcommand("stability", "Per-equilibrium stability verdicts as JSON");
  stability->add_option("--params", params, "parameter file or bundled name")->required();
  stability->add_option("--out", out, "write to file instead of stdout");

  auto* classify = app.add_subcommand("classify", "Disease phase with r, R and (b1/b2)r");
  classify->add_option("--params", params, "parameter file or bundled name")->required();
  classify->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Integrate a scenario and write trajectories");
  simulate->add_option("--scenario", sim.scenario, "scenario file or bundled name")->required();
  simulate->add_option("--out", sim.out, "output directory (default $CML_OUT_DIR or ./out)");
  simulate->add_option("--rel-tol", sim.rel_tol, "relative tolerance")->check(CLI::PositiveNumber);
  simulate->add_option("--abs-tol", sim.abs_tol, "absolute tolerance (cells)")->check(CLI::PositiveNumber);
  simulate->add_option("--format", sim.format, "csv, json or svg")->check(CLI::IsMember({"csv", "json", "svg"}));
  simulate->add_option("--method", sim.method, "dp54 or sdirk2")->check(CLI::IsMember({"dp54", "sdirk2"}));

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Phase and stable equilibrium along a parameter grid");
  sweep->add_option("--params", sw.params, "baseline parameter file or bundled name")->required();
  sweep->add_option("--vary", sw.vary, "k17, k21, k22, k29, B or R")->required();
  sweep->add_option("--from", sw.from, "grid start");
  sweep->add_option("--to", sw.to, "grid end");
  sweep->add_option("--points", sw.points, "number of grid points");
  sweep->add_option("--values", sw.values, "explicit comma-separated grid");
  sweep->add_option("--jobs", sw.jobs, "worker threads (0 = hardware)");
  sweep->add_option("--format", sw.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--out", sw.out, "write to file instead of stdout");

  std::string inputs;
  auto* estimate = app.add_subcommand("estimate", "Derive a parameter set from equilibrium targets");
  estimate->add_option("inputs", inputs, "inputs file or bundled name (g09, g01, g05)")->required();
  estimate->add_option("--out", out, "parameter file to write");
  estimate->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUserError;
  }

  try {
    if (*parse) return cmd_parse(file, format);
    if (*equilibria) return cmd_equilibria(params, format, out);
    if (*stability) return cmd_stability(params, out);
    if (*classify) return cmd_classify(params, format);
    if (*simulate) return cmd_simulate(sim);
    if (*sweep) return cmd_sweep(sw);
    if (*estimate) return cmd_estimate(inputs, out, format);
  } catch (const cml::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const cml::AssumptionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const cml::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const cml::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  }
  return kUserError;
}
