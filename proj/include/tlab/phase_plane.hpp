#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <ostream>
#include <string>
#include <vector>

#include "tlab/errors.hpp"
#include "tlab/io.hpp"
#include "tlab/ode.hpp"

namespace tlab::phase {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSinMargin = 1e-6;  // domain margin on sin(theta)

/// Field of the autonomous (x, theta) system
///   x' = cos(theta),  theta' = x (cos(theta) + lambda) / sin(theta).
/// Throws DomainBoundary outside theta in (0, pi) with margin 1e-6 on sin.
inline std::array<double, 2> vector_field(double lambda, double x, double theta) {
  if (!(theta > 0.0 && theta < kPi) || std::sin(theta) < kSinMargin)
    throw DomainBoundary("vector_field: theta outside (0, pi) margin");
  return {std::cos(theta), x * (std::cos(theta) + lambda) / std::sin(theta)};
}

enum class PointKind { center, saddle, degenerate, node_like };

inline const char* kind_name(PointKind k) {
  switch (k) {
    case PointKind::center: return "center";
    case PointKind::saddle: return "saddle";
    case PointKind::degenerate: return "degenerate";
    case PointKind::node_like: return "node_like";
  }
  return "?";
}

/// Linearization data at the singular point P = (0, pi/2).
struct SingularPointReport {
  std::array<double, 2> point{0.0, 0.5 * kPi};
  std::array<std::array<double, 2>, 2> jacobian{};     // analytic [[0,-1],[lambda,0]]
  std::array<std::array<double, 2>, 2> fd_jacobian{};  // central differences of the field
  std::array<std::complex<double>, 2> eigenvalues{};   // +-sqrt(-lambda)
  std::array<std::complex<double>, 2> fd_eigenvalues{};
  PointKind kind{};
  std::string note;  // set when the computed spectrum contradicts the usual prose label
};

inline std::array<std::complex<double>, 2> eigenvalues_2x2(
    const std::array<std::array<double, 2>, 2>& m) {
  const std::complex<double> tr = m[0][0] + m[1][1];
  const std::complex<double> det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const std::complex<double> disc = std::sqrt(tr * tr - 4.0 * det);
  return {0.5 * (tr + disc), 0.5 * (tr - disc)};
}

inline PointKind classify_eigenvalues(const std::array<std::complex<double>, 2>& eig,
                                      double tol = 1e-12) {
  const auto& a = eig[0];
  const auto& b = eig[1];
  if (std::abs(a) < tol && std::abs(b) < tol) return PointKind::degenerate;
  if (std::abs(a.real()) < tol && std::abs(b.real()) < tol) return PointKind::center;
  if (std::abs(a.imag()) < tol && std::abs(b.imag()) < tol)
    return a.real() * b.real() < 0.0 ? PointKind::saddle : PointKind::node_like;
  return PointKind::node_like;  // complex with nonzero real part: focus-like
}

/// Analytic Jacobian [[0,-1],[lambda,0]] at P, eigenvalues +-sqrt(-lambda),
/// cross-checked against a finite-difference Jacobian of the field.
inline SingularPointReport linearize(double lambda) {
  SingularPointReport rep;
  rep.jacobian = {{{0.0, -1.0}, {lambda, 0.0}}};
  const std::complex<double> mu = std::sqrt(std::complex<double>(-lambda, 0.0));
  rep.eigenvalues = {mu, -mu};
  rep.kind = classify_eigenvalues(rep.eigenvalues);

  const double h = 1e-4;
  const double x0 = rep.point[0], th0 = rep.point[1];
  const auto fx1 = vector_field(lambda, x0 + h, th0);
  const auto fx0 = vector_field(lambda, x0 - h, th0);
  const auto ft1 = vector_field(lambda, x0, th0 + h);
  const auto ft0 = vector_field(lambda, x0, th0 - h);
  rep.fd_jacobian = {{{(fx1[0] - fx0[0]) / (2 * h), (ft1[0] - ft0[0]) / (2 * h)},
                      {(fx1[1] - fx0[1]) / (2 * h), (ft1[1] - ft0[1]) / (2 * h)}}};
  rep.fd_eigenvalues = eigenvalues_2x2(rep.fd_jacobian);

  if (lambda == -1.0)
    rep.note =
        "lambda=-1: computed spectrum at P is {+1,-1} (opposite-sign real pair, "
        "saddle signature), not a repeated positive eigenvalue";
  return rep;
}

struct PortraitTrajectory {
  std::array<double, 2> seed{};  // (x, theta)
  std::vector<std::array<double, 3>> points;  // (s, x, theta), s increasing
  std::string terminated_by;                  // event kind, or "" for budget
};

struct FieldSample {
  double x, theta, dx, dtheta;
};

struct Rectangle {
  double x0 = 0.0, x1 = 2.5;
  double theta0 = 1e-3, theta1 = kPi - 1e-3;
};

struct PortraitGrid {
  Rectangle rect;
  std::vector<PortraitTrajectory> trajectories;
  std::vector<FieldSample> field;
};

struct PortraitBudget {
  double s_span = 30.0;
  double tol = 1e-10;
  int field_resolution = 24;
};

namespace detail {

inline std::vector<OdeEvent<2>> rect_events(const Rectangle& r) {
  const double th_lo = std::max(r.theta0, kSinMargin);
  const double th_hi = std::min(r.theta1, kPi - kSinMargin);
  std::vector<OdeEvent<2>> ev;
  ev.push_back({"x_min", [r](double, const OdeState<2>& y) { return y[0] - r.x0; }, true, 0});
  ev.push_back({"x_max", [r](double, const OdeState<2>& y) { return y[0] - r.x1; }, true, 0});
  ev.push_back({"theta_min",
                [th_lo](double, const OdeState<2>& y) { return y[1] - th_lo; }, true, 0});
  ev.push_back({"theta_max",
                [th_hi](double, const OdeState<2>& y) { return y[1] - th_hi; }, true, 0});
  return ev;
}

}  // namespace detail

/// Integrate the autonomous system forward and backward from each seed,
/// truncating cleanly at the rectangle boundary. The canonical seeds
/// (1e-4, 1e-4) (axis start) and (1, pi/2) (equator start) are always
/// included when they lie inside the rectangle.
inline PortraitGrid sample_portrait(double lambda, const Rectangle& rect,
                                    std::vector<std::array<double, 2>> seeds,
                                    const PortraitBudget& budget = {}) {
  PortraitGrid grid;
  grid.rect = rect;

  const auto inside = [&rect](const std::array<double, 2>& p) {
    return p[0] > rect.x0 && p[0] < rect.x1 && p[1] > rect.theta0 && p[1] < rect.theta1;
  };
  for (const std::array<double, 2> canonical :
       {std::array<double, 2>{1e-4, 1e-4}, std::array<double, 2>{1.0, 0.5 * kPi}}) {
    bool present = false;
    for (const auto& s : seeds)
      present = present || (std::abs(s[0] - canonical[0]) < 1e-12 &&
                            std::abs(s[1] - canonical[1]) < 1e-12);
    if (!present && inside(canonical)) seeds.push_back(canonical);
  }

  const auto rhs = [lambda](double, const OdeState<2>& y, OdeState<2>& dy) {
    const double a = 1.0 + lambda;
    dy[0] = std::cos(y[1]);
    dy[1] = y[0] * ((a != 0.0 ? a / std::sin(y[1]) : 0.0) - std::tan(0.5 * y[1]));
  };

  OdeOptions<2> opt;
  opt.rtol = budget.tol;
  opt.atol = budget.tol;
  const auto events = detail::rect_events(rect);

  for (const auto& seed : seeds) {
    if (!inside(seed)) continue;
    PortraitTrajectory traj;
    traj.seed = seed;
    const OdeState<2> y0{seed[0], seed[1]};
    const auto bwd = integrate_dopri5<2>(rhs, 0.0, y0, -budget.s_span, opt, events);
    const auto fwd = integrate_dopri5<2>(rhs, 0.0, y0, budget.s_span, opt, events);
    for (auto it = bwd.samples.rbegin(); it != bwd.samples.rend(); ++it)
      traj.points.push_back({it->s, it->y[0], it->y[1]});
    for (std::size_t i = 1; i < fwd.samples.size(); ++i)
      traj.points.push_back({fwd.samples[i].s, fwd.samples[i].y[0], fwd.samples[i].y[1]});
    if (fwd.status == OdeStatus::TerminalEvent && !fwd.events.empty())
      traj.terminated_by = fwd.events.back().kind;
    grid.trajectories.push_back(std::move(traj));
  }

  const int n = budget.field_resolution;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = rect.x0 + (rect.x1 - rect.x0) * (i + 0.5) / n;
      const double th = rect.theta0 + (rect.theta1 - rect.theta0) * (j + 0.5) / n;
      if (std::sin(th) < kSinMargin) continue;
      const auto f = vector_field(lambda, x, th);
      grid.field.push_back({x, th, f[0], f[1]});
    }
  }
  return grid;
}

inline void write_portrait_trajectory_csv(std::ostream& os, const PortraitTrajectory& t) {
  os << "s,x,theta\n";
  for (const auto& p : t.points)
    os << fmt17(p[0]) << ',' << fmt17(p[1]) << ',' << fmt17(p[2]) << '\n';
  if (!t.terminated_by.empty()) os << "#event," << t.terminated_by << '\n';
}

inline void write_field_csv(std::ostream& os, const PortraitGrid& grid) {
  os << "x,theta,dx,dtheta\n";
  for (const auto& f : grid.field)
    os << fmt17(f.x) << ',' << fmt17(f.theta) << ',' << fmt17(f.dx) << ','
       << fmt17(f.dtheta) << '\n';
}

inline void write_singular_point_report(std::ostream& os, const SingularPointReport& rep,
                                        double lambda) {
  os << "singular point P = (" << fmt17(rep.point[0]) << ", " << fmt17(rep.point[1]) << ")\n";
  os << "lambda = " << fmt17(lambda) << "\n";
  os << "jacobian = [[" << fmt17(rep.jacobian[0][0]) << ", " << fmt17(rep.jacobian[0][1])
     << "], [" << fmt17(rep.jacobian[1][0]) << ", " << fmt17(rep.jacobian[1][1]) << "]]\n";
  os << "eigenvalues = " << fmt17(rep.eigenvalues[0].real()) << "+"
     << fmt17(rep.eigenvalues[0].imag()) << "i, " << fmt17(rep.eigenvalues[1].real()) << "+"
     << fmt17(rep.eigenvalues[1].imag()) << "i\n";
  os << "kind = " << kind_name(rep.kind) << "\n";
  if (!rep.note.empty()) os << "note = " << rep.note << "\n";
}

}  // namespace tlab::phase
