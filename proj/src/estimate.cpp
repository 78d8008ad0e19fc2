#include "cml/estimate.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <initializer_list>
#include <tuple>

#include "cml/equilibria.hpp"
#include "cml/errors.hpp"
#include "cml/kv_file.hpp"

namespace cml {

double round_significant(double v, int digits) {
  if (digits <= 0 || v == 0 || !std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, v);
  return std::strtod(buf, nullptr);
}

std::pair<double, double> quiescence_split(double total, double k_in, double k_out) {
  if (!(total > 0) || !(k_in > 0) || !(k_out > 0))
    throw InputError("quiescence_split: total and rates must be positive");
  const double cycling = total * k_out / (k_in + k_out);
  return {cycling, total - cycling};
}

namespace {

/// Stores `v` rounded to `digits` significant digits, keeping the decimal
/// spelling so exact re-evaluation sees the published number.
void put(FullParams& p, const std::string& name, double v, int digits) {
  if (digits <= 0) {
    p.set(name, v);
    return;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  p.set_decimal(name, buf);
}

std::string kname(int j) { return "k" + std::to_string(j); }

}  // namespace

EstimationResult estimate_params(const EstimationInputs& in) {
  if (!(in.G > 0 && in.G < 1)) throw InputError("G must lie in (0, 1)");
  for (double t : {in.normal_stem_total, in.abnormal_stem_total, in.x2, in.x3, in.x4, in.quiescence_exchange})
    if (!(t > 0)) throw InputError("equilibrium targets and the quiescence exchange rate must be positive");
  for (double r : {in.k7_over_k8, in.k9_over_k10, in.k11_over_k12, in.b1_over_b2, in.b2_over_B})
    if (!(r > 0)) throw InputError("structural ratios must be positive");
  for (double r : {in.k1, in.k4, in.k5, in.k6, in.k13, in.k14, in.k15, in.k16, in.k29})
    if (!(r > 0)) throw InputError("timing rates must be positive");
  if (in.significant_digits < 0 || in.significant_digits > 17)
    throw InputError("significant_digits must lie in [0, 17]");

  const int nd = in.significant_digits;
  auto rnd = [nd](double v) { return round_significant(v, nd); };

  EstimationResult res;
  FullParams& p = res.params;
  for (auto [j, v] : std::initializer_list<std::pair<int, double>>{{1, in.k1}, {4, in.k4}, {5, in.k5}, {6, in.k6}, {13, in.k13}, {14, in.k14},
                      {15, in.k15}, {16, in.k16}})
    put(p, kname(j), v, nd);
  const double k3 = rnd(in.G * in.quiescence_exchange);
  const double k2 = rnd((1 - in.G) * in.quiescence_exchange);
  put(p, "k2", k2, nd);
  put(p, "k3", k3, nd);

  std::tie(res.x0, res.x1) = quiescence_split(in.normal_stem_total, k2, k3);

  // terminal balance: k11 + 2 k12 = (x4/x3) k16
  const double k12 = rnd((in.x4 / in.x3) * p.k(16) / (in.k11_over_k12 + 2));
  const double k11 = rnd(in.k11_over_k12 * k12);
  put(p, "k11", k11, nd);
  put(p, "k12", k12, nd);

  // differentiated balance: k8 + (s + 2) k10 = (x3/x2)(k11 + k12 + k15)
  // progenitor balance:   -t k8 + (s + 1) k10 = a2 x0 / x2 - k14
  const double s = in.k9_over_k10, t = in.k7_over_k8;
  const double a2 = p.k(4) + p.k(5) + 2 * p.k(6);
  res.differentiation_sum = (in.x3 / in.x2) * (k11 + k12 + p.k(15));
  res.progenitor_balance = a2 * res.x0 / in.x2 - p.k(14);
  res.determinant = (s + 1) + t * (s + 2);
  if (res.determinant == 0) throw InputError("singular system for k8, k10");
  const double k8 = rnd((res.differentiation_sum * (s + 1) - (s + 2) * res.progenitor_balance) / res.determinant);
  const double k10 = rnd((res.progenitor_balance + t * res.differentiation_sum) / res.determinant);
  if (!(k8 > 0) || !(k10 > 0)) throw InputError("solved k8 or k10 is not positive");
  put(p, "k8", k8, nd);
  put(p, "k10", k10, nd);
  put(p, "k7", rnd(t * k8), nd);
  put(p, "k9", rnd(s * k10), nd);

  const double c0 = p.k(5) + p.k(6) + p.k(13);
  if (!(p.k(1) > c0)) throw InputError("k1 must exceed k5 + k6 + k13");
  const double b1 = rnd((p.k(1) - c0) / (res.x0 * c0));
  const double b2 = rnd(b1 / in.b1_over_b2);
  put(p, "b1", b1, nd);
  put(p, "b2", b2, nd);
  put(p, "B", rnd(b2 / in.b2_over_B), nd);

  for (int j = 17; j <= 32; ++j) {
    if (j == 29) continue;
    auto it = in.abnormal_multiplier.find(j);
    if (it == in.abnormal_multiplier.end()) throw InputError("missing abnormal multiplier for " + kname(j));
    put(p, kname(j), rnd(it->second * p.k(j - 16)), nd);
  }
  put(p, "k29", in.k29, nd);

  std::tie(res.y0, res.y1) = quiescence_split(in.abnormal_stem_total, p.k(18), p.k(19));

  const double c2 = -p.k(7) + p.k(9) + p.k(10) + p.k(14);
  const double C2 = -p.k(23) + p.k(25) + p.k(26) + p.k(30);
  if (!(c2 > 0) || !(C2 > 0)) throw InputError("estimated progenitor net loss rate is not positive");
  return res;
}

bool RoundtripReport::all_within() const {
  for (const auto& i : items)
    if (!i.within) return false;
  return true;
}

RoundtripReport check_roundtrip(const FullParams& p, const EstimationInputs& in, double rel_tol) {
  const auto eq = steady_states(p);
  const StateVec& e1 = eq[1].state;
  const StateVec& e2 = eq[2].state;
  const auto [x0, x1] = quiescence_split(in.normal_stem_total, p.k(2), p.k(3));

  RoundtripReport rep;
  rep.tolerance = rel_tol;
  auto add = [&](std::string name, double target, double achieved) {
    RoundtripItem it{std::move(name), target, achieved, std::abs(achieved - target) / std::abs(target), false};
    it.within = it.rel_deviation <= rel_tol;
    rep.items.push_back(it);
  };
  add("x0*+x1*", in.normal_stem_total, e1[X0] + e1[X1]);
  add("x0*", x0, e1[X0]);
  add("x1*", x1, e1[X1]);
  add("x2*", in.x2, e1[X2]);
  add("x3*", in.x3, e1[X3]);
  add("x4*", in.x4, e1[X4]);
  add("x4*/x3*", in.x4 / in.x3, e1[X4] / e1[X3]);
  add("G (E1 cycling fraction)", in.G, e1[X0] / (e1[X0] + e1[X1]));
  add("G (E2 cycling fraction)", in.G, e2[Y0] / (e2[Y0] + e2[Y1]));
  return rep;
}

EstimationInputs parse_estimation_inputs(std::string_view text, const std::string& source) {
  auto kv = KeyValueFile::parse(text, source);
  EstimationInputs in;
  struct Field {
    const char* key;
    double* target;
  };
  const Field fields[] = {{"normal_stem_total", &in.normal_stem_total},
                          {"abnormal_stem_total", &in.abnormal_stem_total},
                          {"x2", &in.x2},
                          {"x3", &in.x3},
                          {"x4", &in.x4},
                          {"G", &in.G},
                          {"quiescence_exchange", &in.quiescence_exchange},
                          {"k1", &in.k1},
                          {"k4", &in.k4},
                          {"k5", &in.k5},
                          {"k6", &in.k6},
                          {"k13", &in.k13},
                          {"k14", &in.k14},
                          {"k15", &in.k15},
                          {"k16", &in.k16},
                          {"k29", &in.k29},
                          {"k7_over_k8", &in.k7_over_k8},
                          {"k9_over_k10", &in.k9_over_k10},
                          {"k11_over_k12", &in.k11_over_k12},
                          {"b1_over_b2", &in.b1_over_b2},
                          {"b2_over_B", &in.b2_over_B}};
  std::vector<std::string> known = {"significant_digits"};
  for (const auto& f : fields) known.push_back(f.key);
  kv.reject_unknown(known, {"period.", "abnormal."});

  for (const auto& f : fields)
    if (auto v = kv.number(f.key)) *f.target = *v;
  in.significant_digits = static_cast<int>(kv.integer_or("significant_digits", in.significant_digits));

  for (const auto& e : kv.entries()) {
    if (e.key.rfind("period.", 0) == 0) {
      // period.kN = days between events; rate = 1 / period
      std::string rate = e.key.substr(7);
      const Field* f = nullptr;
      for (const auto& x : fields)
        if (rate == x.key && rate[0] == 'k') f = &x;
      if (!f) throw ParseError(source, e.line, 1, "no timing rate named '" + rate + "'");
      if (kv.find(rate)) throw ParseError(source, e.line, 1, rate + " given both as a rate and as a period");
      auto v = parse_number(e.value);
      if (!v || !(*v > 0)) kv.fail(e, "period must be a positive number");
      *f->target = 1.0 / *v;
    } else if (e.key.rfind("abnormal.", 0) == 0) {
      std::string rate = e.key.substr(9);
      int j = rate.size() > 1 && rate[0] == 'k' ? std::atoi(rate.c_str() + 1) : 0;
      if (j < 17 || j > 32 || j == 29 || rate != kname(j))
        throw ParseError(source, e.line, 1, "abnormal multipliers exist for k17..k32 except k29");
      auto v = parse_number(e.value);
      if (!v) kv.fail(e, "'" + e.value + "' is not a number");
      in.abnormal_multiplier[j] = *v;
    }
  }
  return in;
}

EstimationInputs load_estimation_inputs(const std::filesystem::path& path) {
  return parse_estimation_inputs(read_text_file(path), path.string());
}

}  // namespace cml
