#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include "tlab/errors.hpp"
#include "tlab/io.hpp"
#include "tlab/surface.hpp"
#include "tlab/vec3.hpp"

namespace tlab::families {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEdgeMargin = 1e-3;  // keeps apex / ruling edge out of the rectangle

enum class FamilyKind { plane, cylinder, cone, tangent_of_helix, rotational, translation, ruled };

inline const char* kind_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::plane: return "plane";
    case FamilyKind::cylinder: return "cylinder";
    case FamilyKind::cone: return "cone";
    case FamilyKind::tangent_of_helix: return "tangent_of_helix";
    case FamilyKind::rotational: return "rotational";
    case FamilyKind::translation: return "translation";
    case FamilyKind::ruled: return "ruled";
  }
  return "?";
}

/// What a family constructor promises: the surface kind, its exact lambda and
/// flow speed (already negated when the orientation is reversed), and the
/// geometric parameters.
struct FamilyDescriptor {
  FamilyKind kind{};
  double lambda = 0.0;
  Vec3 v{0, 0, 1};
  bool reversed = false;
  std::map<std::string, double> params;

  std::string to_kv() const {
    std::ostringstream os;
    os << "kind=" << kind_name(kind) << '\n';
    os << "lambda=" << fmt17(lambda) << '\n';
    os << "v_x=" << fmt17(v.x) << '\n' << "v_y=" << fmt17(v.y) << '\n'
       << "v_z=" << fmt17(v.z) << '\n';
    os << "reversed=" << (reversed ? 1 : 0) << '\n';
    for (const auto& [k, val] : params) os << k << '=' << fmt17(val) << '\n';
    return os.str();
  }
};

/// A constructed family: descriptor plus the sampled patch.
struct Family {
  FamilyDescriptor desc;
  SurfacePatch patch;
};

/// Flip the patch orientation by reversing the t parameter direction; the
/// computed normal changes sign, the point set does not.
inline SurfacePatch reverse_orientation(const SurfacePatch& p) {
  SurfacePatch q;
  const double tsum = p.t0 + p.t1;
  q.s0 = p.s0; q.s1 = p.s1; q.t0 = p.t0; q.t1 = p.t1;
  q.position = [p, tsum](double s, double t) { return p.position(s, tsum - t); };
  if (p.d_s) q.d_s = [p, tsum](double s, double t) { return p.d_s(s, tsum - t); };
  if (p.d_t) q.d_t = [p, tsum](double s, double t) { return -p.d_t(s, tsum - t); };
  if (p.d_ss) q.d_ss = [p, tsum](double s, double t) { return p.d_ss(s, tsum - t); };
  if (p.d_st) q.d_st = [p, tsum](double s, double t) { return -p.d_st(s, tsum - t); };
  if (p.d_tt) q.d_tt = [p, tsum](double s, double t) { return p.d_tt(s, tsum - t); };
  return q;
}

inline Family apply_reversal(Family fam, bool reversed) {
  if (!reversed) return fam;
  fam.desc.reversed = true;
  fam.desc.v = -fam.desc.v;
  fam.patch = reverse_orientation(fam.patch);
  return fam;
}

/// Plane through `point` with unit `normal`; lambda = -<normal, v>.
inline Family make_plane(const Vec3& normal, const Vec3& point, const Vec3& v,
                         bool reversed = false) {
  const Vec3 n = normal.normalized();
  const Vec3 e1 = any_orthogonal(n);
  const Vec3 e2 = cross(n, e1);  // e1 x e2 = n

  Family fam;
  fam.desc.kind = FamilyKind::plane;
  fam.desc.lambda = -dot(n, v);
  fam.desc.v = v;
  fam.desc.params = {{"n_x", n.x}, {"n_y", n.y}, {"n_z", n.z},
                     {"p_x", point.x}, {"p_y", point.y}, {"p_z", point.z}};
  fam.patch.position = [point, e1, e2](double s, double t) { return point + s * e1 + t * e2; };
  fam.patch.d_s = [e1](double, double) { return e1; };
  fam.patch.d_t = [e2](double, double) { return e2; };
  fam.patch.d_ss = fam.patch.d_st = fam.patch.d_tt = [](double, double) { return Vec3{}; };
  fam.patch.s0 = -1; fam.patch.s1 = 1; fam.patch.t0 = -1; fam.patch.t1 = 1;
  return apply_reversal(std::move(fam), reversed);
}

/// Circular cylinder of given radius about an axis through the origin.
/// lambda = 0 with the flow speed along the axis.
inline Family make_cylinder(double radius, const Vec3& axis, bool reversed = false) {
  if (!(radius > 0.0)) throw NonPositiveRadius("make_cylinder: radius must be positive");
  const Vec3 u = axis.normalized();
  const Vec3 e1 = any_orthogonal(u);
  const Vec3 e2 = cross(u, e1);

  Family fam;
  fam.desc.kind = FamilyKind::cylinder;
  fam.desc.lambda = 0.0;
  fam.desc.v = u;
  fam.desc.params = {{"radius", radius},
                     {"axis_x", u.x}, {"axis_y", u.y}, {"axis_z", u.z}};
  fam.patch.position = [radius, u, e1, e2](double s, double t) {
    return radius * (std::cos(t) * e1 + std::sin(t) * e2) + s * u;
  };
  fam.patch.d_s = [u](double, double) { return u; };
  fam.patch.d_t = [radius, e1, e2](double, double t) {
    return radius * (-std::sin(t) * e1 + std::cos(t) * e2);
  };
  fam.patch.d_ss = fam.patch.d_st = [](double, double) { return Vec3{}; };
  fam.patch.d_tt = [radius, e1, e2](double, double t) {
    return radius * (-std::cos(t) * e1 - std::sin(t) * e2);
  };
  fam.patch.s0 = -2; fam.patch.s1 = 2; fam.patch.t0 = 0; fam.patch.t1 = 2 * kPi;
  return apply_reversal(std::move(fam), reversed);
}

/// Rotational patch (x(s) cos t, x(s) sin t, z(s)) from an arc-length profile
/// with analytic derivatives; the computed normal is (-z' cos t, -z' sin t, x').
inline SurfacePatch rotational_patch(std::function<double(double)> x,
                                     std::function<double(double)> z,
                                     std::function<double(double)> xp,
                                     std::function<double(double)> zp,
                                     std::function<double(double)> xpp,
                                     std::function<double(double)> zpp,
                                     double s0, double s1) {
  SurfacePatch p;
  p.position = [x, z](double s, double t) -> Vec3 {
    return {x(s) * std::cos(t), x(s) * std::sin(t), z(s)};
  };
  p.d_s = [xp, zp](double s, double t) -> Vec3 {
    return {xp(s) * std::cos(t), xp(s) * std::sin(t), zp(s)};
  };
  p.d_t = [x](double s, double t) -> Vec3 {
    return {-x(s) * std::sin(t), x(s) * std::cos(t), 0.0};
  };
  p.d_ss = [xpp, zpp](double s, double t) -> Vec3 {
    return {xpp(s) * std::cos(t), xpp(s) * std::sin(t), zpp(s)};
  };
  p.d_st = [xp](double s, double t) -> Vec3 {
    return {-xp(s) * std::sin(t), xp(s) * std::cos(t), 0.0};
  };
  p.d_tt = [x](double s, double t) -> Vec3 {
    return {-x(s) * std::cos(t), -x(s) * std::sin(t), 0.0};
  };
  p.s0 = s0; p.s1 = s1; p.t0 = 0; p.t1 = 2 * kPi;
  return p;
}

/// Rotational cone of inner angle theta0 in (0, pi/2), apex at the origin and
/// excluded from the rectangle; lambda = -cos(theta0) with speed (0,0,1).
inline Family make_cone(double theta0, bool reversed = false) {
  if (!(theta0 > 0.0 && theta0 < 0.5 * kPi))
    throw BadAngle("make_cone: theta0 must lie strictly inside (0, pi/2)");
  const double c0 = std::cos(theta0), s0 = std::sin(theta0);

  Family fam;
  fam.desc.kind = FamilyKind::cone;
  fam.desc.lambda = -c0;
  fam.desc.v = {0, 0, 1};
  fam.desc.params = {{"theta0", theta0}};
  fam.patch = rotational_patch(
      [c0](double s) { return s * c0; }, [s0](double s) { return s * s0; },
      [c0](double) { return c0; }, [s0](double) { return s0; },
      [](double) { return 0.0; }, [](double) { return 0.0; }, kEdgeMargin, 2.0);
  return apply_reversal(std::move(fam), reversed);
}

/// Arc-length circular helix (a cos(s/c), a sin(s/c), b s/c), c = sqrt(a^2+b^2).
inline CurveSampler helix_curve(double a, double b) {
  const double c = std::sqrt(a * a + b * b);
  CurveSampler g;
  g.position = [a, b, c](double s) -> Vec3 {
    return {a * std::cos(s / c), a * std::sin(s / c), b * s / c};
  };
  g.d1 = [a, b, c](double s) -> Vec3 {
    return {-a / c * std::sin(s / c), a / c * std::cos(s / c), b / c};
  };
  g.d2 = [a, c](double s) -> Vec3 {
    return {-a / (c * c) * std::cos(s / c), -a / (c * c) * std::sin(s / c), 0.0};
  };
  g.d3 = [a, c](double s) -> Vec3 {
    return {a / (c * c * c) * std::sin(s / c), -a / (c * c * c) * std::cos(s / c), 0.0};
  };
  return g;
}

/// Tangent surface of the circular helix, t > 0 branch: K = 0 and
/// lambda = a / sqrt(a^2 + b^2) with speed (0,0,1).
inline Family make_tangent_of_helix(double a, double b, bool reversed = false) {
  if (!(a > 0.0) || b == 0.0)
    throw BadParameters("make_tangent_of_helix: need a > 0 and b != 0");
  const double c = std::sqrt(a * a + b * b);
  const CurveSampler gamma = helix_curve(a, b);

  Family fam;
  fam.desc.kind = FamilyKind::tangent_of_helix;
  fam.desc.lambda = a / c;
  fam.desc.v = {0, 0, 1};
  fam.desc.params = {{"a", a}, {"b", b}};
  fam.patch.position = [gamma](double s, double t) { return gamma.eval(s) + t * gamma.d1(s); };
  fam.patch.d_s = [gamma](double s, double t) { return gamma.d1(s) + t * gamma.d2(s); };
  fam.patch.d_t = [gamma](double s, double) { return gamma.d1(s); };
  fam.patch.d_ss = [gamma](double s, double t) { return gamma.d2(s) + t * gamma.d3(s); };
  fam.patch.d_st = [gamma](double s, double) { return gamma.d2(s); };
  fam.patch.d_tt = [](double, double) { return Vec3{}; };
  fam.patch.s0 = 0; fam.patch.s1 = 2 * kPi * c;
  fam.patch.t0 = kEdgeMargin; fam.patch.t1 = 2.0;
  return apply_reversal(std::move(fam), reversed);
}

/// Ruled surface gamma(s) + t w(s); gamma arc-length, w unit, and for the
/// non-cylindrical constructor gamma is the striction line (<gamma',w'> = 0).
struct RuledSurface {
  CurveSampler gamma;
  CurveSampler w;
  double s0 = 0.0, s1 = 1.0;
};

namespace detail {

inline void validate_ruled(const RuledSurface& r, bool require_striction) {
  const double tol = (r.gamma.d1 && r.w.d1) ? 1e-9 : 1e-5;
  for (int i = 0; i <= 8; ++i) {
    const double s = r.s0 + (r.s1 - r.s0) * i / 8.0;
    if (std::abs(r.gamma.deriv1(s).norm() - 1.0) > tol)
      throw BadParameters("ruled surface: base curve is not arc-length");
    if (std::abs(r.w.eval(s).norm() - 1.0) > tol)
      throw BadParameters("ruled surface: ruling direction is not unit");
    if (require_striction && std::abs(dot(r.gamma.deriv1(s), r.w.deriv1(s))) > tol)
      throw BadParameters("ruled surface: base curve is not the striction line");
  }
}

}  // namespace detail

inline RuledSurface make_ruled(CurveSampler gamma, CurveSampler w, double s0, double s1) {
  RuledSurface r{std::move(gamma), std::move(w), s0, s1};
  detail::validate_ruled(r, /*require_striction=*/true);
  return r;
}

/// Tangent surface of an arc-length curve: rulings along gamma'.
inline RuledSurface make_tangent_surface(const CurveSampler& gamma, double s0, double s1) {
  RuledSurface r;
  r.gamma = gamma;
  r.w.position = [gamma](double s) { return gamma.deriv1(s); };
  if (gamma.d2) r.w.d1 = [gamma](double s) { return gamma.d2(s); };
  if (gamma.d3) r.w.d2 = [gamma](double s) { return gamma.d3(s); };
  r.s0 = s0; r.s1 = s1;
  detail::validate_ruled(r, true);
  return r;
}

/// alpha = det(gamma', w, w') / |w'|^2. Throws CylindricalRuling when w' ~ 0.
inline double ruled_alpha(const RuledSurface& r, double s) {
  const Vec3 wp = r.w.deriv1(s);
  const double wp2 = wp.squared_norm();
  if (wp2 < 1e-10 * 1e-10)
    throw CylindricalRuling("ruled_alpha: |w'| < 1e-10 (cylindrical ruling)");
  return det3(r.gamma.deriv1(s), r.w.eval(s), wp) / wp2;
}

/// Closed forms K = -alpha^2/(alpha^2+t^2)^2 and
/// N = (alpha w' + t w' x w) / (|w'| sqrt(alpha^2+t^2)).
inline std::pair<double, Vec3> ruled_K_N(const RuledSurface& r, double s, double t) {
  const double alpha = ruled_alpha(r, s);
  const double den = alpha * alpha + t * t;
  if (den < 1e-20)
    throw StrictionPoint("ruled_K_N: alpha = t = 0 (central point of the ruling)");
  const double K = -alpha * alpha / (den * den);
  const Vec3 wp = r.w.deriv1(s);
  const Vec3 N = (alpha * wp + t * cross(wp, r.w.eval(s))) / (wp.norm() * std::sqrt(den));
  return {K, N};
}

inline SurfacePatch ruled_patch(const RuledSurface& r, double t0, double t1) {
  SurfacePatch p;
  const CurveSampler g = r.gamma, w = r.w;
  p.position = [g, w](double s, double t) { return g.eval(s) + t * w.eval(s); };
  p.d_s = [g, w](double s, double t) { return g.deriv1(s) + t * w.deriv1(s); };
  p.d_t = [w](double s, double) { return w.eval(s); };
  p.d_ss = [g, w](double s, double t) { return g.deriv2(s) + t * w.deriv2(s); };
  p.d_st = [w](double s, double) { return w.deriv1(s); };
  p.d_tt = [](double, double) { return Vec3{}; };
  p.s0 = r.s0; p.s1 = r.s1; p.t0 = t0; p.t1 = t1;
  return p;
}

/// Scalar C^3 function with optional analytic derivatives (finite differences
/// otherwise).
struct RealFunction {
  std::function<double(double)> f, d1, d2, d3;

  double eval(double x) const { return f(x); }
  double deriv1(double x) const {
    if (d1) return d1(x);
    const double h = tlab::detail::fd_step(x);
    return (f(x + h) - f(x - h)) / (2 * h);
  }
  double deriv2(double x) const {
    if (d2) return d2(x);
    const double h = tlab::detail::fd_step(x);
    return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
  }
  double deriv3(double x) const {
    if (d3) return d3(x);
    const double h = tlab::detail::fd_step(x);
    return (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) / (2 * h * h * h);
  }
};

/// Translation surface z = f(x) + g(y) with its exact equation residual
///   f'' g'' W1^-2 - W1^(-1/2) W2 - lambda,
/// W1 = 1 + f'^2 + g'^2, W2 = -v1 f' - v2 g' + v3.
struct TranslationSurface {
  RealFunction f, g;
  Vec3 v{0, 0, 1};
  double lambda = 0.0;
  SurfacePatch patch;

  double W1(double x, double y) const {
    const double fp = f.deriv1(x), gp = g.deriv1(y);
    return 1.0 + fp * fp + gp * gp;
  }
  double W2(double x, double y) const {
    return -v.x * f.deriv1(x) - v.y * g.deriv1(y) + v.z;
  }
  /// Residual of the separable-variables form of the translator equation.
  double fg_residual(double x, double y) const {
    const double w1 = W1(x, y);
    return f.deriv2(x) * g.deriv2(y) / (w1 * w1) - W2(x, y) / std::sqrt(w1) - lambda;
  }
};

inline TranslationSurface make_translation_surface(RealFunction f, RealFunction g,
                                                   const Vec3& v, double lambda,
                                                   double x0 = -1, double x1 = 1,
                                                   double y0 = -1, double y1 = 1) {
  TranslationSurface ts;
  ts.f = std::move(f);
  ts.g = std::move(g);
  ts.v = v;
  ts.lambda = lambda;
  const RealFunction& rf = ts.f;
  const RealFunction& rg = ts.g;
  ts.patch.position = [rf, rg](double x, double y) -> Vec3 {
    return {x, y, rf.eval(x) + rg.eval(y)};
  };
  ts.patch.d_s = [rf](double x, double) -> Vec3 { return {1, 0, rf.deriv1(x)}; };
  ts.patch.d_t = [rg](double, double y) -> Vec3 { return {0, 1, rg.deriv1(y)}; };
  ts.patch.d_ss = [rf](double x, double) -> Vec3 { return {0, 0, rf.deriv2(x)}; };
  ts.patch.d_st = [](double, double) { return Vec3{}; };
  ts.patch.d_tt = [rg](double, double y) -> Vec3 { return {0, 0, rg.deriv2(y)}; };
  ts.patch.s0 = x0; ts.patch.s1 = x1; ts.patch.t0 = y0; ts.patch.t1 = y1;
  return ts;
}

/// Max |K - <N,v> - lambda| over an ns x nt sample grid of the rectangle.
inline double family_max_residual(const Family& fam, int ns = 32, int nt = 32) {
  double worst = 0.0;
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < nt; ++j) {
      const double s = fam.patch.s0 + (fam.patch.s1 - fam.patch.s0) * (i + 0.5) / ns;
      const double t = fam.patch.t0 + (fam.patch.t1 - fam.patch.t0) * (j + 0.5) / nt;
      worst = std::max(worst, std::abs(translator_residual(fam.patch, fam.desc.v,
                                                           fam.desc.lambda, s, t)));
    }
  }
  return worst;
}

/// Rebuild a parametric family from key=value text (plane, cylinder, cone,
/// tangent_of_helix). Sampler-backed kinds cannot round-trip through text.
inline Family family_from_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  const auto num = [&kv](const std::string& key, double fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stod(it->second);
  };
  const bool reversed = num("reversed", 0) != 0;
  const std::string kind = kv.count("kind") ? kv["kind"] : "";
  if (kind == "plane") {
    const Vec3 n{num("n_x", 0), num("n_y", 0), num("n_z", 1)};
    const Vec3 p{num("p_x", 0), num("p_y", 0), num("p_z", 0)};
    Vec3 v{num("v_x", 0), num("v_y", 0), num("v_z", 1)};
    if (reversed) v = -v;  // constructor re-applies the reversal
    return make_plane(n, p, v, reversed);
  }
  if (kind == "cylinder")
    return make_cylinder(num("radius", 1), {num("axis_x", 0), num("axis_y", 0), num("axis_z", 1)},
                         reversed);
  if (kind == "cone") return make_cone(num("theta0", kPi / 4), reversed);
  if (kind == "tangent_of_helix")
    return make_tangent_of_helix(num("a", 1), num("b", 1), reversed);
  throw BadParameters("family_from_kv: unsupported kind '" + kind + "'");
}

}  // namespace tlab::families
