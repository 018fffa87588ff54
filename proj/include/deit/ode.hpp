#pragma once

// Dormand-Prince 5(4) with step-size control, for any dense Eigen state.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "deit/errors.hpp"

namespace deit {

struct OdeOptions {
  double rtol = 1e-8;
  double atol = 1e-12;
  double h0 = 0.0;
  double hmax = std::numeric_limits<double>::infinity();
  long max_steps = 200'000'000;
  // return false to cancel
  std::function<bool(double)> progress;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
  double last_h = 0.0;
};

struct NoStepHook {
  template <class S>
  void operator()(double, const S&) const {}
};

template <class State>
double error_norm(const State& err, const State& y, const State& yn, double atol, double rtol) {
  return (err.array().abs() / (atol + rtol * y.array().abs().max(yn.array().abs()))).maxCoeff();
}

// Integrates y from t0 through every entry of `times` (increasing, >= t0),
// calling obs(t, y) at each. Steps are clipped to land on output times.
template <class State, class Rhs, class Obs, class Hook = NoStepHook>
OdeStats integrate_dopri5(Rhs&& f, State& y, double t0, const std::vector<double>& times, Obs&& obs,
                          const OdeOptions& opt = {}, Hook&& on_step = {}) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  OdeStats st;
  double t = t0;
  State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, yt = y, yn = y, err = y;
  f(t, y, k1);
  ++st.rhs_evals;

  double h = opt.h0;
  if (h <= 0.0) {
    const double d0 = y.array().abs().maxCoeff(), d1 = k1.array().abs().maxCoeff();
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    if (!times.empty() && times.back() > t0) h = std::min(h, 1e-3 * (times.back() - t0));
    if (h <= 0.0) h = 1e-12;
  }

  for (double tout : times) {
    if (tout < t) throw IntegrationError("output times must be increasing", t, h);
    while (t < tout) {
      if (st.accepted + st.rejected > opt.max_steps)
        throw IntegrationError("step budget exhausted", t, h);
      bool last = false;
      double hs = std::min(h, opt.hmax);
      if (t + hs >= tout || tout - (t + hs) < 1e-12 * std::abs(tout)) {
        hs = tout - t;
        last = true;
      }
      yt = y + hs * a21 * k1;
      f(t + c2 * hs, yt, k2);
      yt = y + hs * (a31 * k1 + a32 * k2);
      f(t + c3 * hs, yt, k3);
      yt = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
      f(t + c4 * hs, yt, k4);
      yt = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      f(t + c5 * hs, yt, k5);
      yt = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      f(t + hs, yt, k6);
      yn = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      f(t + hs, yn, k7);
      st.rhs_evals += 6;
      err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double en = error_norm(err, y, yn, opt.atol, opt.rtol);
      if (!std::isfinite(en)) throw IntegrationError("non-finite state", t, hs);
      if (en <= 1.0) {
        t = last ? tout : t + hs;
        y = yn;
        k1 = k7;
        ++st.accepted;
        on_step(t, y);
        if (opt.progress && !opt.progress(t)) throw Cancelled();
        const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        if (!last) h = hs * fac;
      } else {
        ++st.rejected;
        h = hs * std::max(0.2, 0.9 * std::pow(en, -0.2));
        if (h < 1e-14 * std::max(1.0, std::abs(t)) * 1e-6)
          throw IntegrationError("step size underflow", t, h, en);
      }
    }
    obs(t, static_cast<const State&>(y));
  }
  st.last_h = h;
  return st;
}

} // namespace deit
