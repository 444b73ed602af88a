#pragma once

#include <array>
#include <cmath>

namespace muslx {

/// Spatial point; the second coordinate is ignored in one dimension.
using Point = std::array<double, 2>;
/// Gradient-space vector, same convention as Point.
using Vec2 = std::array<double, 2>;
/// Row-major 2x2 matrix.
using Mat2 = std::array<double, 4>;

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec2& a) { return std::hypot(a[0], a[1]); }
inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator*(double s, const Vec2& a) { return {s * a[0], s * a[1]}; }

inline Mat2 operator+(const Mat2& a, const Mat2& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}
inline Mat2 scaled_identity(double s) { return {s, 0.0, 0.0, s}; }
/// s * a a^T
inline Mat2 outer(double s, const Vec2& a) {
  return {s * a[0] * a[0], s * a[0] * a[1], s * a[1] * a[0], s * a[1] * a[1]};
}

}  // namespace muslx
