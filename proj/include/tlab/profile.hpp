#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tlab/errors.hpp"
#include "tlab/io.hpp"
#include "tlab/ode.hpp"

namespace tlab::profile {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kThetaMargin = 1e-6;  // singular-approach cutoff on theta
inline constexpr double kBlowupGuard = 1e6;

/// State of the arc-length generating curve: x' = cos(theta), z' = sin(theta).
struct ProfileState {
  double s = 0.0;
  double x = 0.0;
  double z = 0.0;
  double theta = 0.0;
};

/// Right-hand side of the generating-curve system
///   x' = cos(theta), z' = sin(theta),
///   theta' = x (cos(theta) + lambda) / sin(theta).
/// Throws SingularAngle when |sin(theta)| <= 1e-12.
inline std::array<double, 3> rhs(double lambda, const ProfileState& st) {
  const double sn = std::sin(st.theta);
  if (std::abs(sn) <= 1e-12)
    throw SingularAngle("profile::rhs: sin(theta) ~ 0 at theta = " + fmt17(st.theta));
  return {std::cos(st.theta), sn, st.x * (std::cos(st.theta) + lambda) / sn};
}

namespace detail {

/// theta' in the numerically stable form x ((1+lambda)/sin - tan(theta/2));
/// exact rewrite of x (cos+lambda)/sin that avoids the cos(theta)-1
/// cancellation near theta = 0. For lambda = -1 this is regular at theta = 0.
inline double dtheta_ds(double lambda, double x, double theta) {
  const double a = 1.0 + lambda;
  const double singular_part = a != 0.0 ? a / std::sin(theta) : 0.0;
  return x * (singular_part - std::tan(0.5 * theta));
}

}  // namespace detail

struct TrajectorySample {
  double s = 0.0;
  double x = 0.0;
  double z = 0.0;
  double theta = 0.0;
  double dtheta_ds = 0.0;
  double x_integral = 0.0;  // running integral of x ds from the axis start
};

struct TrajectoryEvent {
  std::string kind;
  double s = 0.0;
  ProfileState state;
};

/// Integrated generating curve with geometric events.
struct Trajectory {
  double lambda = 0.0;
  bool axis_rooted = false;  // started at x(0)=z(0)=theta(0)=0 (via the axis solver)
  std::vector<TrajectorySample> samples;
  std::vector<TrajectoryEvent> events;
  double omega = 0.0;        // last parameter reached
  bool omega_finite = false; // true if a terminal geometric event stopped the run
  std::string stop_reason;   // "" (budget), or the terminal event kind
};

/// Geometric event set for a profile run. The theta->0 approach monitor is
/// armed only when lambda != -1 (the rhs is regular at theta=0 for lambda=-1,
/// where the profile is asymptotic to a horizontal line).
inline std::vector<OdeEvent<4>> standard_events(double lambda, double direction) {
  std::vector<OdeEvent<4>> ev;
  // re-intersection with the rotation axis; only crossings where x decreases
  // along the run, so an axis start is not retriggered
  ev.push_back({"axis", [](double, const OdeState<4>& y) { return y[0]; }, true, -1});
  if (lambda != -1.0)
    ev.push_back({"theta_zero_approach",
                  [](double, const OdeState<4>& y) { return y[2] - kThetaMargin; }, true, 0});
  ev.push_back({"theta_pi_approach",
                [](double, const OdeState<4>& y) { return y[2] - (kPi - kThetaMargin); },
                true, 0});
  ev.push_back({"theta_half_pi",
                [](double, const OdeState<4>& y) { return y[2] - 0.5 * kPi; }, false, 0});
  ev.push_back({"blowup",
                [](double, const OdeState<4>& y) {
                  return std::max(std::abs(y[0]), std::abs(y[1])) - kBlowupGuard;
                },
                true, +1});
  (void)direction;
  return ev;
}

/// Integrate the generating-curve system from `initial` to arc length s_end
/// (s_end < initial.s runs backwards). The running integral of x ds is carried
/// as a fourth state so the first integral can be monitored at integrator
/// order; x_integral0 is its value at initial.s.
inline Trajectory integrate(double lambda, const ProfileState& initial, double s_end,
                            double tol = 1e-10, bool axis_rooted = false,
                            double x_integral0 = 0.0) {
  Trajectory traj;
  traj.lambda = lambda;
  traj.axis_rooted = axis_rooted;

  const auto ode_rhs = [lambda](double, const OdeState<4>& y, OdeState<4>& dy) {
    dy[0] = std::cos(y[2]);
    dy[1] = std::sin(y[2]);
    dy[2] = detail::dtheta_ds(lambda, y[0], y[2]);
    dy[3] = y[0];
  };

  OdeOptions<4> opt;
  opt.rtol = tol;
  opt.atol = tol;
  const double direction = s_end >= initial.s ? 1.0 : -1.0;
  const auto events = standard_events(lambda, direction);

  OdeState<4> y0{initial.x, initial.z, initial.theta, x_integral0};
  const auto res = integrate_dopri5<4>(ode_rhs, initial.s, y0, s_end, opt, events);

  traj.samples.reserve(res.samples.size());
  for (const auto& smp : res.samples)
    traj.samples.push_back({smp.s, smp.y[0], smp.y[1], smp.y[2], smp.dy[2], smp.y[3]});
  for (const auto& ev : res.events)
    traj.events.push_back({ev.kind, ev.s, {ev.s, ev.y[0], ev.y[1], ev.y[2]}});

  traj.omega = traj.samples.back().s;
  if (res.status == OdeStatus::TerminalEvent) {
    traj.omega_finite = true;
    for (const auto& ev : res.events)
      if (ev.terminal) traj.stop_reason = ev.kind;
  }
  return traj;
}

/// Per-sample residual of the first integral
///   (1 - cos(theta)) - x^2/2 - lambda * integral_0^s x dt
/// for trajectories rooted at the axis (x=z=theta=0 at s=0).
inline std::vector<double> first_integral_residual(const Trajectory& traj) {
  if (!traj.axis_rooted)
    throw WrongInitialConditions(
        "first_integral_residual: trajectory was not started from the axis");
  std::vector<double> out;
  out.reserve(traj.samples.size());
  for (const auto& smp : traj.samples)
    out.push_back((1.0 - std::cos(smp.theta)) - 0.5 * smp.x * smp.x -
                  traj.lambda * smp.x_integral);
  return out;
}

/// True iff theta is strictly increasing at every accepted sample.
inline bool convexity_check(const Trajectory& traj) {
  return std::all_of(traj.samples.begin(), traj.samples.end(),
                     [](const TrajectorySample& s) { return s.dtheta_ds > 0.0; });
}

/// Reflection z -> -z, theta -> -theta; satisfies the same system with the
/// same lambda.
inline Trajectory mirror(const Trajectory& traj) {
  Trajectory m = traj;
  for (auto& s : m.samples) {
    s.z = -s.z;
    s.theta = -s.theta;
    s.dtheta_ds = -s.dtheta_ds;
  }
  for (auto& e : m.events) {
    e.state.z = -e.state.z;
    e.state.theta = -e.state.theta;
  }
  return m;
}

enum class StartMode { axis_orthogonal, equator, custom };

enum class Regime {
  reintersects_axis_nonorthogonal,
  asymptotic_to_cylinder,
  entire_convex_graph,
  lambda_minus_one_graph,
  saddle_bounded,
};

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::reintersects_axis_nonorthogonal: return "reintersects_axis_nonorthogonal";
    case Regime::asymptotic_to_cylinder: return "asymptotic_to_cylinder";
    case Regime::entire_convex_graph: return "entire_convex_graph";
    case Regime::lambda_minus_one_graph: return "lambda_minus_one_graph";
    case Regime::saddle_bounded: return "saddle_bounded";
  }
  return "?";
}

struct ClassificationReport {
  Regime regime{};
  double lambda = 0.0;
  StartMode start{};
  std::map<std::string, double> witnesses;
  Trajectory primary;                  // forward branch
  std::optional<Trajectory> backward;  // second branch for equator starts
};

struct ClassifyBudget {
  double s_max = 50.0;
  double tol = 1e-10;
};

namespace detail {

inline double trailing_variation(const Trajectory& traj, double s_from,
                                 double TrajectorySample::*field) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : traj.samples) {
    if (s.s < s_from) continue;
    lo = std::min(lo, s.*field);
    hi = std::max(hi, s.*field);
  }
  return hi - lo;
}

inline double max_field(const Trajectory& traj, double TrajectorySample::*field) {
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : traj.samples) hi = std::max(hi, s.*field);
  return hi;
}

}  // namespace detail

// classify() needs the axis handoff; implemented in classify.hpp to keep the
// fixed-point solver out of this header.

/// CSV export: header s,x,z,theta,dtheta_ds,first_integral_residual and one
/// row per accepted step; events appended as '#event' comment lines. For
/// trajectories that are not axis-rooted the residual column is empty.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "s,x,z,theta,dtheta_ds,first_integral_residual\n";
  std::vector<double> fi;
  if (traj.axis_rooted) fi = first_integral_residual(traj);
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const auto& s = traj.samples[i];
    os << fmt17(s.s) << ',' << fmt17(s.x) << ',' << fmt17(s.z) << ',' << fmt17(s.theta)
       << ',' << fmt17(s.dtheta_ds) << ',';
    if (traj.axis_rooted) os << fmt17(fi[i]);
    os << '\n';
  }
  for (const auto& e : traj.events)
    os << "#event," << e.kind << ',' << fmt17(e.s) << ',' << fmt17(e.state.x) << ','
       << fmt17(e.state.z) << ',' << fmt17(e.state.theta) << '\n';
}

}  // namespace tlab::profile
