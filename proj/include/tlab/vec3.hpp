#pragma once

#include <cmath>

namespace tlab {

/// Ambient vector/point in R^3.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double c) const { return {c * x, c * y, c * z}; }
  constexpr Vec3 operator/(double c) const { return {x / c, y / c, z / c}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double c) { x *= c; y *= c; z *= c; return *this; }

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  constexpr double squared_norm() const { return x * x + y * y + z * z; }
  Vec3 normalized() const { return *this / norm(); }
};

constexpr Vec3 operator*(double c, const Vec3& v) { return v * c; }

constexpr double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// Determinant of the 3x3 matrix with rows a, b, c (scalar triple product).
constexpr double det3(const Vec3& a, const Vec3& b, const Vec3& c) {
  return dot(a, cross(b, c));
}

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// Some unit vector orthogonal to v (|v| > 0).
inline Vec3 any_orthogonal(const Vec3& v) {
  const Vec3 trial = std::abs(v.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  return cross(v, trial).normalized();
}

}  // namespace tlab
