#include "cml/integrator.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cml/errors.hpp"

namespace cml {

namespace {

using Vec = Eigen::Matrix<double, 10, 1>;

Vec to_vec(const StateVec& s) { return Eigen::Map<const Vec>(s.data()); }
StateVec to_state(const Vec& v) {
  StateVec s;
  Eigen::Map<Vec>(s.data()) = v;
  return s;
}

bool all_finite(const StateVec& s) {
  return std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); });
}

// Dormand–Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense output
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

// L-stable two-stage SDIRK, stiffly accurate.
const double kGamma = 1.0 - std::sqrt(2.0) / 2.0;

struct Dp5Step {
  Vec y1, k7, err;
  std::array<Vec, 5> dense;  // Hairer's continuous-output coefficients
};

Dp5Step dp5_step(const RhsFn& f, double t, const Vec& y, const Vec& k1, double h, std::size_t& evals) {
  auto F = [&](double tt, const Vec& v) {
    ++evals;
    return to_vec(f(tt, to_state(v)));
  };
  Vec k2 = F(t + c2 * h, y + h * (a21 * k1));
  Vec k3 = F(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
  Vec k4 = F(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  Vec k5 = F(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  Vec k6 = F(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  Dp5Step s;
  s.y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
  s.k7 = F(t + h, s.y1);
  s.err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * s.k7);
  Vec dy = s.y1 - y;
  Vec bspl = h * k1 - dy;
  s.dense = {y, dy, bspl, dy - h * s.k7 - bspl,
             h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * s.k7)};
  return s;
}

Vec dp5_dense(const Dp5Step& s, double theta) {
  const double th1 = 1.0 - theta;
  return s.dense[0] +
         theta * (s.dense[1] + th1 * (s.dense[2] + theta * (s.dense[3] + th1 * s.dense[4])));
}

double error_norm(const Vec& err, const Vec& y0, const Vec& y1, double rtol, double atol) {
  double sum = 0;
  for (int i = 0; i < 10; ++i) {
    double sk = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    double r = err[i] / sk;
    sum += r * r;
  }
  return std::sqrt(sum / 10.0);
}

struct SdirkStep {
  bool converged = false;
  Vec y1, est;
};

/// One step of the two-stage SDIRK. `newton_tol` is in units of the error
/// scale; a negative value iterates to round-off.
SdirkStep sdirk_step(const RhsFn& f, const JacFn& jac, double t, const Vec& y, double h, double rtol,
                     double atol, double newton_tol, SolverStats& st) {
  using Mat = Eigen::Matrix<double, 10, 10>;
  ++st.jacobian_evals;
  const Mat J = jac(t, to_state(y));
  const Mat M = Mat::Identity() - h * kGamma * J;
  const Eigen::PartialPivLU<Mat> lu(M);
  auto F = [&](double tt, const Vec& v) {
    ++st.rhs_evals;
    return to_vec(f(tt, to_state(v)));
  };
  auto scale = [&](const Vec& v) {
    Vec sk;
    for (int i = 0; i < 10; ++i) sk[i] = atol + rtol * std::abs(v[i]);
    return sk;
  };

  // Solves Y = base + hγ f(tt, Y).
  auto solve = [&](double tt, const Vec& base, Vec Y, bool& ok) {
    ok = false;
    for (int it = 0; it < 12; ++it) {
      Vec r = Y - base - h * kGamma * F(tt, Y);
      Vec d = lu.solve(-r);
      Y += d;
      if (!Y.allFinite()) return Y;
      double dn = newton_tol < 0 ? d.cwiseAbs().maxCoeff() / (1.0 + Y.cwiseAbs().maxCoeff())
                                 : (d.array() / scale(Y).array()).abs().maxCoeff();
      double target = newton_tol < 0 ? 4 * std::numeric_limits<double>::epsilon() : newton_tol;
      if (dn <= target) {
        ok = true;
        return Y;
      }
    }
    return Y;
  };

  SdirkStep out;
  bool ok = false;
  Vec Y1 = solve(t + kGamma * h, y, y, ok);
  if (!ok) return out;
  const Vec F1 = (Y1 - y) / (h * kGamma);
  const Vec base2 = y + h * (1.0 - kGamma) * F1;
  Vec Y2 = solve(t + h, base2, base2 + h * kGamma * F1, ok);
  if (!ok) return out;
  const Vec F2 = (Y2 - base2) / (h * kGamma);
  out.converged = true;
  out.y1 = Y2;
  out.est = lu.solve(h * kGamma * (F2 - F1));
  return out;
}

/// Resets components in [-abs_tol, 0) to zero; throws below that.
std::size_t clamp_negative(Vec& y, double t, double abs_tol) {
  std::size_t n = 0;
  for (int i = 0; i < 10; ++i) {
    if (y[i] >= 0) continue;
    if (y[i] < -abs_tol) {
      std::ostringstream msg;
      msg << "component " << kComponentNames[i] << " fell to " << y[i] << " at t = " << t
          << ", below -abs_tol; tighten the tolerances";
      throw IntegrationError(msg.str());
    }
    y[i] = 0;
    ++n;
  }
  return n;
}

/// Dense output is only recorded for accepted steps whose endpoints passed
/// clamp_negative, so a negative sample is interpolation wiggle: zero it.
StateVec clamp_sample(Vec v, std::size_t& count) {
  for (int i = 0; i < 10; ++i)
    if (v[i] < 0) {
      v[i] = 0;
      ++count;
    }
  return to_state(v);
}

[[noreturn]] void underflow(double t, double h, Method m) {
  std::ostringstream msg;
  msg << "step size underflow (h = " << h << ") at t = " << t;
  if (m == Method::DormandPrince54)
    msg << "; the problem looks stiff, retry with the implicit method (sdirk2)";
  throw IntegrationError(msg.str());
}

double initial_step(const RhsFn& f, double t0, const Vec& y0, const Vec& f0, double rtol, double atol,
                    double hmax, std::size_t& evals) {
  Vec sk;
  for (int i = 0; i < 10; ++i) sk[i] = atol + rtol * std::abs(y0[i]);
  double dnf = (f0.array() / sk.array()).square().sum() / 10;
  double dny = (y0.array() / sk.array()).square().sum() / 10;
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
  h = std::min(h, hmax);
  Vec f1 = to_vec(f(t0 + h, to_state(y0 + h * f0)));
  ++evals;
  double der2 = std::sqrt(((f1 - f0).array() / sk.array()).square().sum() / 10) / h;
  double der12 = std::max(std::abs(der2), std::sqrt(dnf));
  double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3) : std::pow(0.01 / der12, 1.0 / 5);
  return std::min({100 * h, h1, hmax});
}

}  // namespace

Trajectory integrate_system(const RhsFn& f, const JacFn& jac, const StateVec& init, double t0,
                            double t1, const IntegratorOptions& opt) {
  if (!(t1 > t0)) throw std::invalid_argument("integrate: horizon must be positive");
  if (!(opt.rel_tol > 0) || !(opt.abs_tol > 0)) throw std::invalid_argument("integrate: tolerances must be positive");
  if (!all_finite(init)) throw IntegrationError("non-finite initial state");
  if (opt.method == Method::Sdirk2 && !jac) throw std::invalid_argument("integrate: sdirk2 needs a Jacobian");

  std::vector<double> samples = opt.sample_times;
  if (samples.empty()) samples = {t0, t1};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i] < t0 || samples[i] > t1 || (i > 0 && !(samples[i] > samples[i - 1])))
      throw std::invalid_argument("integrate: sample times must increase within [t0, t1]");
  }

  Trajectory tr;
  tr.times.reserve(samples.size());
  tr.states.reserve(samples.size());
  std::size_t next = 0;
  auto record = [&](double ts, const StateVec& s) {
    if (!all_finite(s)) throw IntegrationError("non-finite state at t = " + std::to_string(ts));
    tr.times.push_back(ts);
    tr.states.push_back(s);
    ++next;
  };
  while (next < samples.size() && samples[next] == t0) record(t0, init);

  const double rtol = opt.rel_tol, atol = opt.abs_tol;
  const double hmax = opt.max_step > 0 ? opt.max_step : (t1 - t0);
  SolverStats& st = tr.stats;

  double t = t0;
  Vec y = to_vec(init);
  Vec fy = to_vec(f(t, init));
  ++st.rhs_evals;
  double h = opt.initial_step > 0 ? std::min(opt.initial_step, hmax)
                                  : initial_step(f, t0, y, fy, rtol, atol, hmax, st.rhs_evals);
  double err_old = 1e-4;
  bool last_rejected = false;

  while (t < t1) {
    if (st.steps + st.rejected >= opt.max_steps) throw IntegrationError("maximum number of steps exceeded");
    const double hmin = std::max(opt.min_step, 16 * std::numeric_limits<double>::epsilon() * std::abs(t));
    if (h < hmin) underflow(t, h, opt.method);
    bool final_step = false;
    if (t + h >= t1 || t + 1.01 * h >= t1) {
      h = t1 - t;
      final_step = true;
    }

    if (opt.method == Method::DormandPrince54) {
      Dp5Step s;
      double err;
      try {
        s = dp5_step(f, t, y, fy, h, st.rhs_evals);
        err = error_norm(s.err, y, s.y1, rtol, atol);
      } catch (const std::domain_error&) {
        err = std::numeric_limits<double>::infinity();
      }
      if (!std::isfinite(err)) {
        ++st.rejected;
        h *= 0.1;
        last_rejected = true;
        continue;
      }
      const double fac11 = std::pow(err, 0.17);
      if (err <= 1.0) {
        const double t_new = final_step ? t1 : t + h;
        while (next < samples.size() && samples[next] <= t_new) {
          double theta = (samples[next] - t) / h;
          record(samples[next], clamp_sample(dp5_dense(s, theta), st.clamped));
        }
        Vec y1 = s.y1;
        std::size_t clamped = clamp_negative(y1, t_new, atol);
        st.clamped += clamped;
        if (clamped) {
          fy = to_vec(f(t_new, to_state(y1)));
          ++st.rhs_evals;
        } else {
          fy = s.k7;
        }
        y = y1;
        t = t_new;
        ++st.steps;
        double fac = fac11 / std::pow(err_old, 0.04);
        fac = std::clamp(fac / 0.9, 1.0 / 10, 1.0 / 0.2);
        double h_new = h / fac;
        if (last_rejected) h_new = std::min(h_new, h);
        err_old = std::max(err, 1e-4);
        h = std::min(h_new, hmax);
        last_rejected = false;
      } else {
        ++st.rejected;
        h /= std::min(1.0 / 0.2, fac11 / 0.9);
        last_rejected = true;
      }
    } else {
      SdirkStep s;
      try {
        s = sdirk_step(f, jac, t, y, h, rtol, atol, 0.03, st);
      } catch (const std::domain_error&) {
        s.converged = false;
      }
      if (!s.converged || !s.y1.allFinite()) {
        ++st.rejected;
        h *= 0.25;
        continue;
      }
      const double err = error_norm(s.est, y, s.y1, rtol, atol);
      if (err <= 1.0) {
        const double t_new = final_step ? t1 : t + h;
        Vec y1 = s.y1;
        Vec f1 = to_vec(f(t_new, to_state(y1)));
        ++st.rhs_evals;
        while (next < samples.size() && samples[next] <= t_new) {
          // cubic Hermite on (y, fy) -> (y1, f1)
          const double th = (samples[next] - t) / h;
          const double h00 = (1 + 2 * th) * (1 - th) * (1 - th), h10 = th * (1 - th) * (1 - th);
          const double h01 = th * th * (3 - 2 * th), h11 = th * th * (th - 1);
          record(samples[next], clamp_sample(h00 * y + h10 * h * fy + h01 * y1 + h11 * h * f1, st.clamped));
        }
        std::size_t clamped = clamp_negative(y1, t_new, atol);
        st.clamped += clamped;
        if (clamped) {
          f1 = to_vec(f(t_new, to_state(y1)));
          ++st.rhs_evals;
        }
        y = y1;
        fy = f1;
        t = t_new;
        ++st.steps;
        h = std::min(hmax, h * std::clamp(0.9 / std::sqrt(std::max(err, 1e-10)), 0.2, 5.0));
      } else {
        ++st.rejected;
        h *= std::clamp(0.9 / std::sqrt(err), 0.2, 1.0);
      }
    }
  }
  return tr;
}

StateVec integrate_fixed(const RhsFn& f, const JacFn& jac, const StateVec& init, double t0, double t1,
                         std::size_t n_steps, Method method) {
  if (n_steps == 0) throw std::invalid_argument("integrate_fixed: need at least one step");
  const double h = (t1 - t0) / static_cast<double>(n_steps);
  Vec y = to_vec(init);
  SolverStats st;
  for (std::size_t i = 0; i < n_steps; ++i) {
    const double t = t0 + static_cast<double>(i) * h;
    if (method == Method::DormandPrince54) {
      Vec k1 = to_vec(f(t, to_state(y)));
      y = dp5_step(f, t, y, k1, h, st.rhs_evals).y1;
    } else {
      auto s = sdirk_step(f, jac, t, y, h, 1e-12, 1e-12, -1, st);
      if (!s.converged) throw IntegrationError("integrate_fixed: Newton iteration failed");
      y = s.y1;
    }
  }
  return to_state(y);
}

}  // namespace cml
