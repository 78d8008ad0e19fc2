#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cml/params.hpp"

namespace cml {

struct EstimationInputs {
  // equilibrium targets (cells)
  double normal_stem_total = 1e6;  // x0* + x1*
  double abnormal_stem_total = 1e7;
  double x2 = 1e8, x3 = 1e10, x4 = 1e12;

  // quiescence: G = k3 / (k2 + k3) is the cycling fraction, k2 + k3 = exchange
  double G = 0.9;
  double quiescence_exchange = 0.001;

  // rates fixed by timing assumptions (1/day)
  double k1 = 0.028, k4 = 0.005, k5 = 0.001, k6 = 0.0025;
  double k13 = 0.003, k14 = 0.008, k15 = 0.05, k16 = 1;
  double k29 = 0.02;

  // structural ratios
  double k7_over_k8 = 11.2, k9_over_k10 = 2, k11_over_k12 = 2;
  double b1_over_b2 = 2, b2_over_B = 2;

  /// k_j = multiplier * k_{j-16} for abnormal j in 17..32 except 29.
  std::map<int, double> abnormal_multiplier = {
      {17, 2}, {18, 1}, {19, 1}, {20, 2}, {21, 2}, {22, 2}, {23, 2}, {24, 2},
      {25, 2}, {26, 2}, {27, 1}, {28, 1}, {30, 2}, {31, 1}, {32, 1}};

  /// Derived rates are rounded to this many significant digits at each step,
  /// as published values are; 0 keeps full precision.
  int significant_digits = 10;
};

/// (cycling, quiescent) at the exchange balance cycling * k_in = quiescent * k_out.
std::pair<double, double> quiescence_split(double total, double k_in, double k_out);

struct EstimationResult {
  FullParams params;
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;  // stem splits
  double differentiation_sum = 0;         // k8 + 4 k10
  double progenitor_balance = 0;          // -k7 + k9 + k10, via -11.2 k8 + 3 k10
  double determinant = 0;                 // of the 2x2 system in (k8, k10)
};

/// Throws InputError for G outside (0,1), singular 2x2 system, or a
/// negative solved rate.
EstimationResult estimate_params(const EstimationInputs& inp);

struct RoundtripItem {
  std::string quantity;
  double target = 0;
  double achieved = 0;
  double rel_deviation = 0;
  bool within = false;
};

struct RoundtripReport {
  std::vector<RoundtripItem> items;
  double tolerance = 1e-6;
  bool all_within() const;
};

RoundtripReport check_roundtrip(const FullParams& p, const EstimationInputs& inp,
                                double rel_tol = 1e-6);

EstimationInputs parse_estimation_inputs(std::string_view text,
                                         const std::string& source = "<string>");
EstimationInputs load_estimation_inputs(const std::filesystem::path& path);

double round_significant(double v, int digits);

}  // namespace cml
