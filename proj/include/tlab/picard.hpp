#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "tlab/errors.hpp"
#include "tlab/io.hpp"
#include "tlab/profile.hpp"

namespace tlab::picard {

/// f(x) = x / sqrt(1+x^2), the sine of the tangent angle as a function of u'.
inline double f_aux(double x) { return x / std::sqrt(1.0 + x * x); }

/// g(x) = 2/sqrt(1+x^2) + 2*lambda; bounded above by M = 2 + 2*lambda.
inline double g_aux(double lambda, double x) {
  return 2.0 / std::sqrt(1.0 + x * x) + 2.0 * lambda;
}

/// Inverse of f on (-1,1). Throws InverseDomain for |y| >= 1.
inline double f_inverse(double y) {
  if (std::abs(y) >= 1.0)
    throw InverseDomain("f_inverse: |y| >= 1 (y = " + fmt17(y) + ")");
  return y / std::sqrt(1.0 - y * y);
}

struct PicardConfig {
  double lambda = 0.0;
  double epsilon = 0.0;  // 0: use default_epsilon(lambda)
  int grid_n = 4096;     // grid intervals on [0, R]
  int max_iter = 80;
  double tol = 1e-12;
  int sign = +1;  // +1 gives u''(0) = +sqrt(1+lambda); -1 the mirrored branch
  std::uint32_t probe_seed = 20260809;
};

/// Ball radius actually used: 0.3 by default, shrunk for lambda in (-1,0)
/// where the radicand positivity requires epsilon < sqrt(1-lambda^2)/(-lambda).
inline double default_epsilon(double lambda) {
  double eps = 0.3;
  if (lambda > -1.0 && lambda < 0.0)
    eps = std::min(eps, 0.9 * std::sqrt(1.0 - lambda * lambda) / (-lambda));
  return eps;
}

/// Grid endpoint R = 0.9 * min{1/sqrt(M), eps/2, sqrt(2) eps / sqrt(M(4+eps^2))}
/// with M = 2+2*lambda; the 0.9 factor keeps the inequality strict.
inline double picard_radius(double lambda, double epsilon) {
  if (lambda < -1.0)
    throw NoSolution("picard_radius: lambda < -1 admits no axis-orthogonal solution");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw BadEpsilon("picard_radius: epsilon must lie in (0,1)");
  if (lambda > -1.0 && lambda < 0.0 &&
      epsilon >= std::sqrt(1.0 - lambda * lambda) / (-lambda))
    throw BadEpsilon("picard_radius: epsilon too large for lambda in (-1,0)");
  const double M = 2.0 + 2.0 * lambda;
  const double b1 = 1.0 / std::sqrt(M);  // inf when M = 0
  const double b2 = epsilon / 2.0;
  const double b3 = std::sqrt(2.0) * epsilon / std::sqrt(M * (4.0 + epsilon * epsilon));
  return 0.9 * std::min({b1, b2, b3});
}

/// A C^1 grid function on [0,R]: values and derivative samples.
struct PicardCandidate {
  std::vector<double> u;
  std::vector<double> up;
};

inline double c1_norm(const PicardCandidate& c) {
  double mu = 0.0, mup = 0.0;
  for (double v : c.u) mu = std::max(mu, std::abs(v));
  for (double v : c.up) mup = std::max(mup, std::abs(v));
  return mu + mup;
}

inline double c1_distance(const PicardCandidate& a, const PicardCandidate& b) {
  double du = 0.0, dup = 0.0;
  for (std::size_t i = 0; i < a.u.size(); ++i) du = std::max(du, std::abs(a.u[i] - b.u[i]));
  for (std::size_t i = 0; i < a.up.size(); ++i)
    dup = std::max(dup, std::abs(a.up[i] - b.up[i]));
  return du + dup;
}

/// One application of the fixed-point operator
///   (T u)(r) = int_0^r f^{-1}( sqrt( int_0^s t g(u'(t)) dt ) ) ds
/// with both nested integrals by composite trapezoid on the shared grid.
inline PicardCandidate apply_T(const PicardCandidate& cand, double lambda,
                               const std::vector<double>& grid, int sign = +1) {
  const std::size_t n = grid.size();
  PicardCandidate out;
  out.u.assign(n, 0.0);
  out.up.assign(n, 0.0);

  std::vector<double> integrand(n);
  for (std::size_t i = 0; i < n; ++i) integrand[i] = grid[i] * g_aux(lambda, cand.up[i]);

  double inner = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0)
      inner += 0.5 * (integrand[i - 1] + integrand[i]) * (grid[i] - grid[i - 1]);
    if (inner < 0.0)
      throw NegativeRadicand("apply_T: inner integral negative at r = " + fmt17(grid[i]));
    out.up[i] = sign * f_inverse(std::sqrt(inner));
    if (i > 0) out.u[i] = out.u[i - 1] + 0.5 * (out.up[i - 1] + out.up[i]) * (grid[i] - grid[i - 1]);
  }
  return out;
}

/// Radial graph u(r) on [0,R] produced by the fixed-point iteration, with
/// diagnostics.
struct PicardSolution {
  double lambda = 0.0;
  double epsilon = 0.0;
  double R = 0.0;
  std::vector<double> r, u, up;
  int iterations_used = 0;
  std::vector<double> contraction_factors;  // ||u_{k+1}-u_k|| / ||u_k-u_{k-1}||
  bool converged = false;
  double final_distance = 0.0;
};

inline std::vector<double> make_grid(double R, int n) {
  std::vector<double> grid(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) grid[static_cast<std::size_t>(i)] = R * i / n;
  grid.back() = R;
  return grid;
}

/// Solve the singular axis IVP by iterating T from u0 = 0. For lambda = -1
/// the exact solution u = 0 is returned; lambda < -1 throws NoSolution.
/// On stalled convergence the radius is halved and the solve retried, up to
/// five times.
inline PicardSolution solve_picard(const PicardConfig& cfg) {
  if (cfg.lambda < -1.0)
    throw NoSolution("solve_picard: no solution for lambda < -1");
  const double eps = cfg.epsilon > 0.0 ? cfg.epsilon : default_epsilon(cfg.lambda);
  const int n = std::max(64, cfg.grid_n);

  PicardSolution sol;
  sol.lambda = cfg.lambda;
  sol.epsilon = eps;

  if (cfg.lambda == -1.0) {
    sol.R = picard_radius(cfg.lambda, eps);
    sol.r = make_grid(sol.R, n);
    sol.u.assign(sol.r.size(), 0.0);
    sol.up.assign(sol.r.size(), 0.0);
    sol.converged = true;
    return sol;
  }

  double R = picard_radius(cfg.lambda, eps);
  for (int attempt = 0; attempt < 5; ++attempt, R *= 0.5) {
    const auto grid = make_grid(R, n);
    PicardCandidate u;
    u.u.assign(grid.size(), 0.0);
    u.up.assign(grid.size(), 0.0);

    std::vector<double> factors;
    double prev_dist = -1.0;
    for (int k = 0; k < cfg.max_iter; ++k) {
      PicardCandidate next = apply_T(u, cfg.lambda, grid, cfg.sign);
      const double dist = c1_distance(next, u);
      if (prev_dist > 0.0) factors.push_back(dist / prev_dist);
      prev_dist = dist;
      u = std::move(next);
      if (dist < cfg.tol) {
        sol.R = R;
        sol.r = grid;
        sol.u = std::move(u.u);
        sol.up = std::move(u.up);
        sol.iterations_used = k + 1;
        sol.contraction_factors = std::move(factors);
        sol.converged = true;
        sol.final_distance = dist;
        return sol;
      }
    }
    log_info("solve_picard: no convergence at R = " + fmt17(R) + ", halving");
  }
  throw NoConvergence("solve_picard: fixed-point iteration stalled after 5 radius halvings");
}

/// Finite-difference estimate of u''(0) from the converged grid (u'(0) = 0).
inline double u_second_derivative_at_zero(const PicardSolution& sol) {
  return sol.up[1] / sol.r[1];
}

/// Empirical contraction factor max ||Tu - Tw|| / ||u - w|| over random
/// admissible pairs (smooth random polynomials scaled into the epsilon-ball).
inline double contraction_probe(const PicardConfig& cfg, int trials) {
  const double eps = cfg.epsilon > 0.0 ? cfg.epsilon : default_epsilon(cfg.lambda);
  const double R = picard_radius(cfg.lambda, eps);
  const int n = std::max(64, cfg.grid_n);
  const auto grid = make_grid(R, n);

  std::mt19937 rng(cfg.probe_seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> scale(0.1, 1.0);

  const auto random_candidate = [&]() {
    std::array<double, 5> c{};
    for (auto& v : c) v = coef(rng);
    PicardCandidate cand;
    cand.up.resize(grid.size());
    cand.u.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double t = grid[i] / R;
      cand.up[i] = c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * c[4])));
    }
    cand.u[0] = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
      cand.u[i] = cand.u[i - 1] + 0.5 * (cand.up[i - 1] + cand.up[i]) * (grid[i] - grid[i - 1]);
    const double norm = c1_norm(cand);
    const double factor = norm > 0.0 ? scale(rng) * eps / norm : 0.0;
    for (auto& v : cand.u) v *= factor;
    for (auto& v : cand.up) v *= factor;
    return cand;
  };

  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const PicardCandidate u = random_candidate();
    const PicardCandidate w = random_candidate();
    const double duw = c1_distance(u, w);
    if (duw < 1e-14) continue;
    const PicardCandidate Tu = apply_T(u, cfg.lambda, grid, cfg.sign);
    const PicardCandidate Tw = apply_T(w, cfg.lambda, grid, cfg.sign);
    worst = std::max(worst, c1_distance(Tu, Tw) / duw);
  }
  return worst;
}

/// Regular state handed to the arc-length integrator at r = R, plus the
/// bookkeeping integrals accumulated over [0, R].
struct HandoffState {
  profile::ProfileState state;  // s = arc length from the axis, x = R
  double x_integral = 0.0;      // integral of x ds over the radial segment
};

inline HandoffState handoff(const PicardSolution& sol) {
  if (!sol.converged) throw NotConverged("handoff: Picard iteration did not converge");
  HandoffState h;
  double arc = 0.0, xint = 0.0;
  for (std::size_t i = 1; i < sol.r.size(); ++i) {
    const double dr = sol.r[i] - sol.r[i - 1];
    const double w0 = std::sqrt(1.0 + sol.up[i - 1] * sol.up[i - 1]);
    const double w1 = std::sqrt(1.0 + sol.up[i] * sol.up[i]);
    arc += 0.5 * (w0 + w1) * dr;
    xint += 0.5 * (sol.r[i - 1] * w0 + sol.r[i] * w1) * dr;
  }
  h.state = {arc, sol.R, sol.u.back(), std::atan(sol.up.back())};
  h.x_integral = xint;
  return h;
}

/// CSV export: '#' diagnostics then r,u,u_prime rows.
inline void write_picard_csv(std::ostream& os, const PicardSolution& sol) {
  os << "# lambda=" << fmt17(sol.lambda) << " epsilon=" << fmt17(sol.epsilon)
     << " R=" << fmt17(sol.R) << '\n';
  os << "# iterations_used=" << sol.iterations_used << '\n';
  os << "# contraction_factors=";
  for (std::size_t i = 0; i < sol.contraction_factors.size(); ++i)
    os << (i ? ";" : "") << fmt17(sol.contraction_factors[i]);
  os << '\n';
  os << "r,u,u_prime\n";
  for (std::size_t i = 0; i < sol.r.size(); ++i)
    os << fmt17(sol.r[i]) << ',' << fmt17(sol.u[i]) << ',' << fmt17(sol.up[i]) << '\n';
}

}  // namespace tlab::picard
