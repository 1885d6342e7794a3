#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "tlab/errors.hpp"

namespace tlab {

template <std::size_t N>
using OdeState = std::array<double, N>;

/// Zero-crossing monitor attached to an integration run. `direction` filters
/// the sign change along the numerical trajectory: +1 only negative->positive,
/// -1 only positive->negative, 0 both.
template <std::size_t N>
struct OdeEvent {
  std::string kind;
  std::function<double(double, const OdeState<N>&)> value;
  bool terminal = true;
  int direction = 0;
};

enum class OdeStatus { ReachedEnd, TerminalEvent, MaxSteps };

template <std::size_t N>
struct OdeResult {
  struct Sample {
    double s;
    OdeState<N> y;
    OdeState<N> dy;
  };
  struct EventHit {
    std::string kind;
    double s;
    OdeState<N> y;
    bool terminal;
  };
  std::vector<Sample> samples;        // accepted steps, integration order
  std::vector<Sample> dense_samples;  // states interpolated at requested s
  std::vector<EventHit> events;
  OdeStatus status = OdeStatus::ReachedEnd;
  long steps_accepted = 0;
  long steps_rejected = 0;
};

template <std::size_t N>
struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  double h_init = 0.0;  // 0 = automatic
  double h_max = std::numeric_limits<double>::infinity();
  long max_steps = 20'000'000;
  double event_tol_s = 1e-10;        // bisection width for event localization
  std::vector<double> dense_points;  // s values to sample via dense output
};

namespace detail {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output weights
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

/// Quartic interpolant over one accepted step (Hairer's contd5).
template <std::size_t N>
struct DenseStep {
  double s_begin = 0.0, h = 0.0;
  std::array<OdeState<N>, 5> rcont{};

  OdeState<N> at(double s) const {
    const double th = (s - s_begin) / h;
    const double th1 = 1.0 - th;
    OdeState<N> out;
    for (std::size_t i = 0; i < N; ++i) {
      out[i] = rcont[0][i] +
               th * (rcont[1][i] +
                     th1 * (rcont[2][i] + th * (rcont[3][i] + th1 * rcont[4][i])));
    }
    return out;
  }
};

}  // namespace detail

/// Adaptive Dormand-Prince RK5(4) with 4th-order dense output and event
/// localization by bisection on the interpolant. Supports backward runs
/// (s_end < s0). Throws StepFailure if the controller cannot meet tolerance.
template <std::size_t N>
OdeResult<N> integrate_dopri5(
    const std::function<void(double, const OdeState<N>&, OdeState<N>&)>& rhs,
    double s0, OdeState<N> y0, double s_end, const OdeOptions<N>& opt = {},
    const std::vector<OdeEvent<N>>& events = {}) {
  using detail::DenseStep;
  OdeResult<N> res;
  if (s_end == s0) {
    OdeState<N> dy;
    rhs(s0, y0, dy);
    res.samples.push_back({s0, y0, dy});
    return res;
  }
  const double dir = s_end > s0 ? 1.0 : -1.0;

  double s = s0;
  OdeState<N> y = y0;
  OdeState<N> k1;
  rhs(s, y, k1);
  res.samples.push_back({s, y, k1});

  // pending dense sample points, ordered along the run
  std::vector<double> dense = opt.dense_points;
  std::sort(dense.begin(), dense.end());
  if (dir < 0) std::reverse(dense.begin(), dense.end());
  std::size_t dense_next = 0;
  while (dense_next < dense.size() && (dense[dense_next] - s) * dir < 0) ++dense_next;

  std::vector<double> ev_val(events.size(), 0.0);
  for (std::size_t i = 0; i < events.size(); ++i) ev_val[i] = events[i].value(s, y);

  double h = opt.h_init != 0.0 ? std::abs(opt.h_init) : 1e-6;
  if (opt.h_init == 0.0) {
    // crude scale-based first guess; the controller corrects it quickly
    double ynorm = 0.0, fnorm = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      ynorm = std::max(ynorm, std::abs(y[i]));
      fnorm = std::max(fnorm, std::abs(k1[i]));
    }
    h = fnorm > 0.0 ? 0.01 * (1.0 + ynorm) / fnorm : 1e-3;
    h = std::min(h, std::abs(s_end - s0));
  }
  h = std::min(h, opt.h_max) * dir;

  bool last_rejected = false;
  OdeState<N> k2, k3, k4, k5, k6, k7, yt, ynew, yerr;

  while (res.steps_accepted + res.steps_rejected < opt.max_steps) {
    if ((s + h - s_end) * dir > 0.0) h = s_end - s;
    const double h_floor = 1e-15 * std::max(1.0, std::abs(s));
    if (std::abs(h) < h_floor)
      throw StepFailure("integrate_dopri5: step size underflow at s = " + std::to_string(s));

    using namespace detail;
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * a21 * k1[i];
    rhs(s + c2 * h, yt, k2);
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(s + c3 * h, yt, k3);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(s + c4 * h, yt, k4);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(s + c5 * h, yt, k5);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(s + h, yt, k6);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(s + h, ynew, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      yerr[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (yerr[i] / sc) * (yerr[i] / sc);
    }
    err = std::sqrt(err / static_cast<double>(N));

    if (!(err <= 1.0)) {  // reject (also catches NaN)
      ++res.steps_rejected;
      if (!std::isfinite(err))
        h *= 0.1;
      else
        h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      last_rejected = true;
      continue;
    }

    // accept: build dense interpolant
    DenseStep<N> dstep;
    dstep.s_begin = s;
    dstep.h = h;
    for (std::size_t i = 0; i < N; ++i) {
      const double ydiff = ynew[i] - y[i];
      const double bspl = h * k1[i] - ydiff;
      dstep.rcont[0][i] = y[i];
      dstep.rcont[1][i] = ydiff;
      dstep.rcont[2][i] = bspl;
      dstep.rcont[3][i] = ydiff - h * k7[i] - bspl;
      dstep.rcont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                               d6 * k6[i] + d7 * k7[i]);
    }

    const double s_new = s + h;

    // event scan over this step
    bool stop = false;
    double s_cut = s_new;
    for (std::size_t i = 0; i < events.size(); ++i) {
      const double v_old = ev_val[i];
      const double v_new = events[i].value(s_new, ynew);
      const bool crossed = (v_old < 0.0 && v_new >= 0.0) || (v_old > 0.0 && v_new <= 0.0);
      const bool dir_ok = events[i].direction == 0 ||
                          (events[i].direction > 0 ? v_new > v_old : v_new < v_old);
      if (crossed && dir_ok && v_old != 0.0) {
        double a = s, b = s_new, va = v_old;
        for (int it = 0; it < 200 && std::abs(b - a) > opt.event_tol_s; ++it) {
          const double mid = 0.5 * (a + b);
          const double vm = events[i].value(mid, dstep.at(mid));
          if ((va < 0.0) == (vm < 0.0)) {
            a = mid;
            va = vm;
          } else {
            b = mid;
          }
        }
        const double s_hit = 0.5 * (a + b);
        res.events.push_back({events[i].kind, s_hit, dstep.at(s_hit), events[i].terminal});
        if (events[i].terminal && (s_hit - s_cut) * dir < 0.0) {
          stop = true;
          s_cut = s_hit;
        }
      }
      ev_val[i] = v_new;
    }

    // record dense samples requested inside (s, min(s_new, s_cut)]
    while (dense_next < dense.size() && (dense[dense_next] - s_cut) * dir <= 0.0 &&
           (dense[dense_next] - s) * dir > 0.0) {
      const double sp = dense[dense_next++];
      OdeState<N> yp = dstep.at(sp);
      OdeState<N> dyp;
      rhs(sp, yp, dyp);
      res.dense_samples.push_back({sp, yp, dyp});
    }

    ++res.steps_accepted;

    if (stop) {
      OdeState<N> y_hit = dstep.at(s_cut);
      OdeState<N> dy_hit;
      rhs(s_cut, y_hit, dy_hit);
      res.samples.push_back({s_cut, y_hit, dy_hit});
      res.status = OdeStatus::TerminalEvent;
      return res;
    }

    s = s_new;
    y = ynew;
    k1 = k7;  // FSAL
    res.samples.push_back({s, y, k1});

    if ((s - s_end) * dir >= 0.0) {
      res.status = OdeStatus::ReachedEnd;
      return res;
    }

    double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 6.0;
    fac = std::min(last_rejected ? 1.0 : 6.0, std::max(0.2, fac));
    last_rejected = false;
    h *= fac;
    if (std::abs(h) > opt.h_max) h = opt.h_max * dir;
  }
  res.status = OdeStatus::MaxSteps;
  return res;
}

}  // namespace tlab
