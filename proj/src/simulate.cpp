#include "cml/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "cml/assets.hpp"
#include "cml/dynamics.hpp"
#include "cml/errors.hpp"
#include "cml/kv_file.hpp"

namespace cml {

std::vector<double> uniform_times(double t0, double t1, std::size_t n) {
  if (n < 2) return {t1};
  std::vector<double> t(n);
  const double dt = (t1 - t0) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) t[i] = t0 + static_cast<double>(i) * dt;
  t.back() = t1;
  return t;
}

Trajectory integrate(const FullParams& p, const StateVec& init, double horizon, double rel_tol,
                     double abs_tol, IntegratorOptions extra) {
  const AggregatedParams g = aggregate(p);
  for (std::size_t i = 0; i < kStateDim; ++i)
    if (!std::isfinite(init[i]) || init[i] < 0)
      throw InputError("initial " + std::string(kComponentNames[i]) + " must be finite and non-negative");
  if (!(horizon > 0)) throw InputError("horizon must be positive");
  if (!(rel_tol > 0) || !(abs_tol > 0)) throw InputError("tolerances must be positive");

  extra.rel_tol = rel_tol;
  extra.abs_tol = abs_tol;
  if (extra.max_step <= 0) extra.max_step = 2.0 / largest_linear_rate(g);
  if (extra.sample_times.empty()) extra.sample_times = uniform_times(0, horizon, 1001);
  RhsFn f = [g](double, const StateVec& s) { return rhs(s, g); };
  JacFn J = [g](double, const StateVec& s) { return jacobian(s, g); };
  return integrate_system(f, J, init, 0, horizon, extra);
}

bool near_state(const StateVec& s, const StateVec& target, double tol, double floor) {
  for (std::size_t i = 0; i < kStateDim; ++i)
    if (!(std::abs(s[i] - target[i]) <= std::max(tol * std::abs(target[i]), floor))) return false;
  return true;
}

std::optional<EquilibriumLabel> detect_equilibrium(const Trajectory& tr, const FullParams& p, double tol) {
  if (tr.states.empty()) throw std::invalid_argument("detect_equilibrium: empty trajectory");
  const StateVec& s = tr.final_state();
  if (!(residual(s, aggregate(p)) < tol)) return std::nullopt;
  for (const auto& e : steady_states(p))
    if (e.admissible() && near_state(s, e.state, tol)) return e.label;
  return std::nullopt;
}

namespace {

std::vector<std::string> scenario_keys() {
  std::vector<std::string> k = {"name",    "params",         "horizon", "samples",    "window_samples",
                                "expected", "rel_tol",        "abs_tol", "detect_tol", "method"};
  for (auto n : kComponentNames) k.push_back("init." + std::string(n));
  for (auto n : kGroupNames) k.push_back("window." + std::string(n));
  return k;
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::string& source, const std::filesystem::path& base_dir) {
  auto kv = KeyValueFile::parse(text, source);
  kv.reject_unknown(scenario_keys());
  Scenario sc;
  sc.name = kv.text("name").value_or(std::filesystem::path(source).stem().string());

  const KeyValue* pk = kv.find("params");
  if (!pk) throw ParseError(source, 0, 0, "missing 'params'");
  std::filesystem::path ppath = base_dir / pk->value;
  try {
    sc.params = load_params(std::filesystem::is_regular_file(ppath) ? ppath
                                                                    : resolve_asset(pk->value, "params", ".params"));
  } catch (const InputError& e) {
    kv.fail(*pk, e.what());
  }

  for (std::size_t i = 0; i < kStateDim; ++i) {
    std::string key = "init." + std::string(kComponentNames[i]);
    auto v = kv.number(key);
    if (!v) throw ParseError(source, 0, 0, "missing '" + key + "'");
    if (*v < 0) kv.fail(*kv.find(key), "initial populations must be non-negative");
    sc.init[i] = *v;
  }

  const KeyValue* hk = kv.find("horizon");
  if (!hk) throw ParseError(source, 0, 0, "missing 'horizon'");
  sc.horizon = *kv.number("horizon");
  if (!(sc.horizon > 0)) kv.fail(*hk, "horizon must be positive");
  for (std::size_t g = 0; g < 5; ++g) {
    std::string key = "window." + std::string(kGroupNames[g]);
    sc.windows[g] = kv.number_or(key, sc.horizon);
    if (!(sc.windows[g] > 0) || sc.windows[g] > sc.horizon)
      kv.fail(*kv.find(key), "window must lie in (0, horizon]");
  }

  auto count = [&](const char* key, long fallback) {
    long n = kv.integer_or(key, fallback);
    if (n < 2) kv.fail(*kv.find(key), "need at least 2 samples");
    return static_cast<std::size_t>(n);
  };
  sc.samples = count("samples", 2001);
  sc.window_samples = count("window_samples", 1001);

  if (const auto* e = kv.find("expected")) {
    sc.expected = parse_equilibrium_label(e->value);
    if (!sc.expected) kv.fail(*e, "expected must be one of E0, E1, E2, E3");
  }
  auto positive = [&](const char* key, double fallback) {
    double v = kv.number_or(key, fallback);
    if (!(v > 0)) kv.fail(*kv.find(key), std::string(key) + " must be positive");
    return v;
  };
  sc.rel_tol = positive("rel_tol", sc.rel_tol);
  sc.abs_tol = positive("abs_tol", sc.abs_tol);
  sc.detect_tol = positive("detect_tol", sc.detect_tol);
  if (const auto* m = kv.find("method")) {
    auto method = parse_method(m->value);
    if (!method) kv.fail(*m, "method must be dp54 or sdirk2");
    sc.method = *method;
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_text_file(path), path.string(), path.parent_path());
}

ScenarioResult run_scenario(const Scenario& sc) {
  std::vector<double> times = uniform_times(0, sc.horizon, sc.samples);
  for (double w : sc.windows) {
    auto wt = uniform_times(0, w, sc.window_samples);
    times.insert(times.end(), wt.begin(), wt.end());
  }
  std::sort(times.begin(), times.end());
  const double eps = 1e-12 * sc.horizon;
  times.erase(std::unique(times.begin(), times.end(), [eps](double a, double b) { return b - a <= eps; }),
              times.end());

  IntegratorOptions opt;
  opt.method = sc.method;
  opt.sample_times = std::move(times);
  ScenarioResult res;
  res.trajectory = integrate(sc.params, sc.init, sc.horizon, sc.rel_tol, sc.abs_tol, opt);
  res.detected = detect_equilibrium(res.trajectory, sc.params, sc.detect_tol);
  if (res.detected) {
    const auto& st = res.trajectory.states;
    const std::size_t n = std::max<std::size_t>(1, st.size() / 100);
    StateVec mean{};
    for (std::size_t k = st.size() - n; k < st.size(); ++k)
      for (std::size_t i = 0; i < kStateDim; ++i) mean[i] += st[k][i];
    for (double& m : mean) m /= static_cast<double>(n);
    res.asymptotic = mean;
  }
  return res;
}

std::vector<WindowCheck> check_windows(const Trajectory& tr, const Scenario& sc, const StateVec& target,
                                       double rel_tol, double floor) {
  std::vector<WindowCheck> out;
  for (std::size_t i = 0; i < kStateDim; ++i) {
    const double w = sc.windows[static_cast<std::size_t>(group_of(i))];
    auto it = std::min_element(tr.times.begin(), tr.times.end(),
                               [w](double a, double b) { return std::abs(a - w) < std::abs(b - w); });
    const std::size_t k = static_cast<std::size_t>(it - tr.times.begin());
    WindowCheck c;
    c.component = i;
    c.time = tr.times[k];
    c.value = tr.states[k][i];
    c.target = target[i];
    c.tolerance = std::max(rel_tol * std::abs(target[i]), floor);
    c.pass = std::abs(c.value - c.target) <= c.tolerance;
    out.push_back(c);
  }
  return out;
}

Trajectory slice(const Trajectory& tr, double t_max) {
  Trajectory out;
  out.stats = tr.stats;
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    if (tr.times[k] > t_max * (1 + 1e-12)) break;
    out.times.push_back(tr.times[k]);
    out.states.push_back(tr.states[k]);
  }
  return out;
}

namespace {

SweepPoint sweep_point(const FullParams& base, std::string_view vary, double value, std::size_t index) {
  SweepPoint pt;
  pt.index = index;
  pt.value = value;
  FullParams p = base;
  if (vary == "R") {
    if (!(value > 0)) {
      pt.reason = "R must be positive";
      return pt;
    }
    p.set("k29", p.k(17) / (1.0 + p.B() * value) - p.k(21) - p.k(22));
  } else {
    p.set(vary, value);
  }
  auto v = validate(p);
  if (has_errors(v)) {
    for (const auto& x : v)
      if (x.severity == Severity::Error) pt.reason += (pt.reason.empty() ? "violates " : ", ") + x.inequality;
    return pt;
  }
  pt.valid = true;
  const auto lv = homeostatic_levels(p);
  pt.r = lv.r;
  pt.R = lv.R;
  pt.ratio = p.b1() / p.b2();
  pt.phase = classify_levels(pt.r, pt.R, pt.ratio);
  try {
    const auto report = stability_report(p);
    const auto eqs = steady_states(p);
    for (int e = 1; e < 4; ++e) {
      if (report[e].verdict == Verdict::AsymptoticallyStable && eqs[e].admissible()) {
        pt.stable = report[e].label;
        pt.stem_normal = eqs[e].state[X0];
        pt.stem_abnormal = eqs[e].state[Y0];
        break;
      }
    }
  } catch (const NumericalError& e) {
    pt.reason = e.what();
  }
  return pt;
}

}  // namespace

std::vector<SweepPoint> sweep_R(const FullParams& base, std::string_view vary, const std::vector<double>& grid,
                                unsigned jobs) {
  static const std::vector<std::string_view> allowed = {"k17", "k21", "k22", "k29", "B", "R"};
  if (std::find(allowed.begin(), allowed.end(), vary) == allowed.end())
    throw InputError("sweep: cannot vary '" + std::string(vary) + "' (use k17, k21, k22, k29, B or R)");
  require_valid(base);

  std::vector<SweepPoint> out(grid.size());
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(1, grid.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < grid.size();) out[i] = sweep_point(base, vary, grid[i], i);
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  return out;
}

std::string_view to_string(Method m) { return m == Method::Sdirk2 ? "sdirk2" : "dp54"; }

std::optional<Method> parse_method(std::string_view s) {
  if (s == "dp54") return Method::DormandPrince54;
  if (s == "sdirk2") return Method::Sdirk2;
  return std::nullopt;
}

}  // namespace cml
