#pragma once

#include <cmath>

namespace lsfem {

/// Planar point / vector. 1D meshes use the x component only (y == 0),
/// space-time meshes interpret y as the time coordinate.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

/// Symmetric 2x2 tensor used for the diffusion coefficient K.
struct Mat2 {
  double a00 = 0.0, a01 = 0.0, a10 = 0.0, a11 = 0.0;

  Vec2 apply(Vec2 v) const { return {a00 * v.x + a01 * v.y, a10 * v.x + a11 * v.y}; }

  static Mat2 isotropic(double alpha) { return {alpha, 0.0, 0.0, alpha}; }
  /// diag(alpha, 0): spatial diffusion only, no diffusion in time.
  static Mat2 spacetime(double alpha) { return {alpha, 0.0, 0.0, 0.0}; }
};

inline double cross2(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

}  // namespace lsfem
