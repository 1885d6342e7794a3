#pragma once

#include <cmath>
#include <optional>

#include "tlab/errors.hpp"
#include "tlab/picard.hpp"
#include "tlab/profile.hpp"

namespace tlab::profile {

/// Raw material of a classification: the integrated branch(es), the matched
/// regime (nullopt when no signature appeared within budget) and witnesses.
struct ProfileRun {
  double lambda = 0.0;
  StartMode start{};
  Trajectory primary;
  std::optional<Trajectory> backward;
  std::optional<Regime> regime;
  std::map<std::string, double> witnesses;
};

namespace detail {

inline void analyze_axis_run(ProfileRun& run, const ClassifyBudget& budget) {
  const Trajectory& traj = run.primary;
  auto& w = run.witnesses;
  const auto& last = traj.samples.back();
  w["omega"] = traj.omega;
  w["theta_end"] = last.theta;
  w["x_end"] = last.x;
  w["z_end"] = last.z;
  w["x_max"] = max_field(traj, &TrajectorySample::x);

  if (traj.stop_reason == "axis") {
    run.regime = Regime::reintersects_axis_nonorthogonal;
    return;
  }

  const double span = last.s - traj.samples.front().s;
  const double s_from = last.s - 0.2 * span;
  const double x_var = trailing_variation(traj, s_from, &TrajectorySample::x);
  const double theta_var = trailing_variation(traj, s_from, &TrajectorySample::theta);
  w["x_var_trailing"] = x_var;
  w["theta_var_trailing"] = theta_var;

  const bool budget_reached = traj.stop_reason.empty();
  const bool blowup = traj.stop_reason == "blowup";
  if (!budget_reached && !blowup) return;  // unexpected termination from the axis

  if (budget_reached && x_var < 1e-4) {
    run.regime = Regime::asymptotic_to_cylinder;
    w["limit_radius"] = last.x;
    return;
  }
  if (theta_var < 1e-4) {
    run.regime = Regime::entire_convex_graph;
    w["limit_angle"] = last.theta;
    return;
  }
  (void)budget;
}

inline void analyze_equator_run(ProfileRun& run) {
  const Trajectory& fwd = run.primary;
  const Trajectory& bwd = *run.backward;
  auto& w = run.witnesses;
  const auto& flast = fwd.samples.back();
  const auto& blast = bwd.samples.back();
  w["omega"] = fwd.omega;
  w["backward_omega"] = bwd.omega;
  w["theta_end"] = flast.theta;
  w["x_end"] = flast.x;
  w["z_end"] = flast.z;
  w["x_max"] = std::max(max_field(fwd, &TrajectorySample::x),
                        max_field(bwd, &TrajectorySample::x));

  const double span = flast.s - fwd.samples.front().s;
  const double s_from = flast.s - 0.2 * span;
  const double x_var = trailing_variation(fwd, s_from, &TrajectorySample::x);
  const double theta_var = trailing_variation(fwd, s_from, &TrajectorySample::theta);
  const double z_var = trailing_variation(fwd, s_from, &TrajectorySample::z);
  w["x_var_trailing"] = x_var;
  w["theta_var_trailing"] = theta_var;
  w["z_var_trailing"] = z_var;

  if (fwd.stop_reason == "axis") {
    // one branch comes back to the rotation axis (lambda > 0 picture)
    run.regime = Regime::reintersects_axis_nonorthogonal;
    return;
  }
  if (run.lambda == -1.0 && fwd.stop_reason.empty() && flast.theta < 1e-3 &&
      bwd.stop_reason == "theta_pi_approach") {
    run.regime = Regime::lambda_minus_one_graph;
    return;
  }
  if (run.lambda < -1.0 && fwd.stop_reason == "theta_zero_approach" &&
      bwd.stop_reason == "theta_pi_approach") {
    run.regime = Regime::saddle_bounded;
    return;
  }
  if (fwd.stop_reason.empty() && x_var < 1e-4) {
    run.regime = Regime::asymptotic_to_cylinder;
    w["limit_radius"] = flast.x;
    return;
  }
  if (fwd.stop_reason.empty() && theta_var < 1e-4) {
    run.regime = Regime::entire_convex_graph;
    w["limit_angle"] = flast.theta;
    return;
  }
}

}  // namespace detail

/// Integrate from the requested start and match the event pattern against
/// the known regimes. Axis starts go through the singular solver first.
/// regime is left empty when no signature appeared within budget.
inline ProfileRun run_profile(double lambda, StartMode mode, const ClassifyBudget& budget = {},
                              const ProfileState& custom_start = {}) {
  ProfileRun run;
  run.lambda = lambda;
  run.start = mode;

  if (mode == StartMode::axis_orthogonal) {
    if (lambda < -1.0)
      throw NoSolution("axis-orthogonal start requires lambda >= -1");
    picard::PicardConfig cfg;
    cfg.lambda = lambda;
    const auto sol = picard::solve_picard(cfg);
    const auto h = picard::handoff(sol);
    run.primary = integrate(lambda, h.state, budget.s_max, budget.tol,
                            /*axis_rooted=*/true, h.x_integral);
    detail::analyze_axis_run(run, budget);
    return run;
  }

  const ProfileState start =
      mode == StartMode::equator ? ProfileState{0.0, 1.0, 0.0, 0.5 * kPi} : custom_start;
  run.primary = integrate(lambda, start, start.s + budget.s_max, budget.tol);
  run.backward = integrate(lambda, start, start.s - budget.s_max, budget.tol);
  detail::analyze_equator_run(run);
  return run;
}

/// Regime verdict per the lambda trichotomy; throws NoSolution for an
/// axis-orthogonal start with lambda < -1 and Inconclusive when the budget
/// ran out before any signature appeared.
inline ClassificationReport classify(double lambda, StartMode mode,
                                     const ClassifyBudget& budget = {}) {
  ProfileRun run = run_profile(lambda, mode, budget);
  if (!run.regime)
    throw Inconclusive("classify: no regime signature within budget (lambda = " +
                       fmt17(lambda) + ")");
  ClassificationReport rep;
  rep.regime = *run.regime;
  rep.lambda = lambda;
  rep.start = mode;
  rep.witnesses = std::move(run.witnesses);
  rep.primary = std::move(run.primary);
  rep.backward = std::move(run.backward);
  return rep;
}

}  // namespace tlab::profile
