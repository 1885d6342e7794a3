#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "tlab/errors.hpp"
#include "tlab/vec3.hpp"

namespace tlab {

namespace detail {

/// Central-difference step scaled to the parameter magnitude.
inline double fd_step(double p) { return 1e-4 * (1.0 + std::abs(p)); }

constexpr double kDegenerateTol = 1e-10;
constexpr double kCurvatureTol = 1e-10;

}  // namespace detail

/// Parametrized surface sampler. Analytic partial derivatives are optional;
/// where they are missing, second-order central differences of position are
/// used instead.
struct SurfacePatch {
  using Sampler = std::function<Vec3(double, double)>;

  Sampler position;
  Sampler d_s, d_t;           // first partials (optional)
  Sampler d_ss, d_st, d_tt;   // second partials (optional)

  // parameter rectangle [s0,s1] x [t0,t1]
  double s0 = 0.0, s1 = 1.0, t0 = 0.0, t1 = 1.0;

  bool contains(double s, double t) const {
    return s >= s0 && s <= s1 && t >= t0 && t <= t1;
  }

  Vec3 eval(double s, double t) const { return position(s, t); }

  Vec3 partial_s(double s, double t) const {
    if (d_s) return d_s(s, t);
    const double h = detail::fd_step(s);
    return (position(s + h, t) - position(s - h, t)) / (2.0 * h);
  }

  Vec3 partial_t(double s, double t) const {
    if (d_t) return d_t(s, t);
    const double h = detail::fd_step(t);
    return (position(s, t + h) - position(s, t - h)) / (2.0 * h);
  }

  Vec3 partial_ss(double s, double t) const {
    if (d_ss) return d_ss(s, t);
    const double h = detail::fd_step(s);
    return (position(s + h, t) - position(s, t) * 2.0 + position(s - h, t)) / (h * h);
  }

  Vec3 partial_tt(double s, double t) const {
    if (d_tt) return d_tt(s, t);
    const double h = detail::fd_step(t);
    return (position(s, t + h) - position(s, t) * 2.0 + position(s, t - h)) / (h * h);
  }

  Vec3 partial_st(double s, double t) const {
    if (d_st) return d_st(s, t);
    const double h = detail::fd_step(s);
    const double k = detail::fd_step(t);
    return (position(s + h, t + k) - position(s + h, t - k) -
            position(s - h, t + k) + position(s - h, t - k)) / (4.0 * h * k);
  }

  /// Copy of this patch with the analytic derivative samplers stripped, so
  /// everything falls back to finite differences.
  SurfacePatch numeric_only() const {
    SurfacePatch p;
    p.position = position;
    p.s0 = s0; p.s1 = s1; p.t0 = t0; p.t1 = t1;
    return p;
  }
};

/// First and second fundamental forms plus the unit normal at one point.
struct FundamentalForms {
  double E = 0, F = 0, G = 0;       // first form
  double L = 0, M = 0, Ncoef = 0;   // second form
  Vec3 normal;                      // unit normal d_s x d_t / |.|
};

inline FundamentalForms fundamental_forms(const SurfacePatch& patch, double s, double t) {
  const Vec3 xs = patch.partial_s(s, t);
  const Vec3 xt = patch.partial_t(s, t);
  const Vec3 nn = cross(xs, xt);
  const double nn_len = nn.norm();
  if (nn_len < detail::kDegenerateTol)
    throw DegeneratePoint("fundamental_forms: |d_s x d_t| < 1e-10");
  const Vec3 n = nn / nn_len;

  FundamentalForms f;
  f.E = dot(xs, xs);
  f.F = dot(xs, xt);
  f.G = dot(xt, xt);
  f.L = dot(patch.partial_ss(s, t), n);
  f.M = dot(patch.partial_st(s, t), n);
  f.Ncoef = dot(patch.partial_tt(s, t), n);
  f.normal = n;
  return f;
}

inline double gauss_curvature(const SurfacePatch& patch, double s, double t) {
  const FundamentalForms f = fundamental_forms(patch, s, t);
  return (f.L * f.Ncoef - f.M * f.M) / (f.E * f.G - f.F * f.F);
}

inline Vec3 unit_normal(const SurfacePatch& patch, double s, double t) {
  const Vec3 nn = cross(patch.partial_s(s, t), patch.partial_t(s, t));
  const double len = nn.norm();
  if (len < detail::kDegenerateTol)
    throw DegeneratePoint("unit_normal: |d_s x d_t| < 1e-10");
  return nn / len;
}

/// Pointwise residual K - <N,v> - lambda of the translator equation.
/// Zero iff the point satisfies the equation for this orientation.
inline double translator_residual(const SurfacePatch& patch, const Vec3& v,
                                  double lambda, double s, double t) {
  const FundamentalForms f = fundamental_forms(patch, s, t);
  const double K = (f.L * f.Ncoef - f.M * f.M) / (f.E * f.G - f.F * f.F);
  return K - dot(f.normal, v) - lambda;
}

/// Space curve sampler with optional analytic derivatives.
struct CurveSampler {
  using Fn = std::function<Vec3(double)>;
  Fn position;
  Fn d1, d2, d3;  // optional

  Vec3 eval(double s) const { return position(s); }

  Vec3 deriv1(double s) const {
    if (d1) return d1(s);
    const double h = detail::fd_step(s);
    return (position(s + h) - position(s - h)) / (2.0 * h);
  }
  Vec3 deriv2(double s) const {
    if (d2) return d2(s);
    const double h = detail::fd_step(s);
    return (position(s + h) - position(s) * 2.0 + position(s - h)) / (h * h);
  }
  Vec3 deriv3(double s) const {
    if (d3) return d3(s);
    const double h = detail::fd_step(s);
    // third-order central difference
    return (position(s + 2 * h) - position(s + h) * 2.0 + position(s - h) * 2.0 -
            position(s - 2 * h)) / (2.0 * h * h * h);
  }
};

/// Orthonormal right-handed Frenet frame with curvature and torsion.
struct FrenetFrame {
  Vec3 t, n, b;
  double kappa = 0.0;
  double tau = 0.0;
};

/// Frenet data of a C^3 curve at parameter s (any regular parametrization).
/// Throws VanishingCurvature where kappa <= 1e-10.
inline FrenetFrame frenet_frame(const CurveSampler& curve, double s) {
  const Vec3 c1 = curve.deriv1(s);
  const Vec3 c2 = curve.deriv2(s);
  const Vec3 c3 = curve.deriv3(s);
  const double speed = c1.norm();
  const Vec3 c1xc2 = cross(c1, c2);
  const double cl = c1xc2.norm();
  const double kappa = cl / (speed * speed * speed);
  if (kappa < detail::kCurvatureTol)
    throw VanishingCurvature("frenet_frame: kappa < 1e-10");

  FrenetFrame f;
  f.t = c1 / speed;
  f.b = c1xc2 / cl;
  f.n = cross(f.b, f.t);
  f.kappa = kappa;
  f.tau = det3(c1, c2, c3) / (cl * cl);
  return f;
}

}  // namespace tlab
