#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace idp {

/// Tolerance (meters) for endpoint coincidence, colinearity and crossing tests.
inline constexpr double kGeomEps = 1e-9;

/// Rounds an edge or turn weight to a multiple of 2^-40. Path sums of snapped
/// weights are exact below 2^13, so paths made of the same pieces in another
/// order tie exactly and the lexicographic tie rules see the tie.
inline double snap_weight(double w) { return std::ldexp(std::nearbyint(std::ldexp(w, 40)), -40); }

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend constexpr Point operator*(Point a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point a, Point b) = default;
};

constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(b - a); }

inline bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline Point unit(Point v) {
  const double n = norm(v);
  if (!(n > 0.0)) throw std::invalid_argument("unit: zero-length direction");
  return {v.x / n, v.y / n};
}

/// Counterclockwise normal.
constexpr Point perp(Point v) { return {-v.y, v.x}; }

/// Twice the signed area of (a, b, c); positive when c is left of a->b.
constexpr double orient(Point a, Point b, Point c) { return cross(b - a, c - a); }

/// Polar angle of v in [0, 2*pi).
inline double angle_of(Point v) {
  double a = std::atan2(v.y, v.x);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a -= kTwoPi;
  return a;
}

/// Maps an angle difference into (-pi, pi].
inline double wrap_signed(double a) {
  a = std::fmod(a, kTwoPi);
  if (a <= -kPi) a += kTwoPi;
  if (a > kPi) a -= kTwoPi;
  return a;
}

/// Angle between two directions of travel, in [0, pi]; 0 is a straight
/// continuation. Inputs must be unit vectors.
inline double deflection_angle(Point dir_in, Point dir_out) {
  const double n_in = norm(dir_in);
  const double n_out = norm(dir_out);
  if (n_in == 0.0 || n_out == 0.0)
    throw std::invalid_argument("deflection_angle: zero-length direction");
  if (std::abs(n_in - 1.0) > 1e-9 || std::abs(n_out - 1.0) > 1e-9)
    throw std::invalid_argument("deflection_angle: directions must be unit length");
  return std::atan2(std::abs(cross(dir_in, dir_out)), dot(dir_in, dir_out));
}

/// Distance from p to the closed segment [a, b].
inline double point_segment_distance(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  double t = dot(p - a, ab) / len2;
  t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
  return distance(p, a + t * ab);
}

/// True when p lies within eps of the open segment (a, b) and farther than
/// eps from both endpoints.
inline bool strictly_inside_segment(Point p, Point a, Point b, double eps = kGeomEps) {
  const Point ab = b - a;
  const double len = norm(ab);
  if (len <= 2.0 * eps) return false;
  if (std::abs(cross(ab, p - a)) / len > eps) return false;
  const double along = dot(p - a, ab) / len;
  return along > eps && along < len - eps;
}

/// Proper crossing of the open segments (p, q) and (a, b): each segment has
/// its endpoints strictly on opposite sides of the other's supporting line,
/// by more than eps. Endpoint touches and colinear overlaps do not count.
inline bool properly_crosses(Point p, Point q, Point a, Point b, double eps = kGeomEps) {
  const Point pq = q - p;
  const Point ab = b - a;
  const double len_pq = norm(pq);
  const double len_ab = norm(ab);
  if (len_pq == 0.0 || len_ab == 0.0) return false;
  const double da = cross(pq, a - p) / len_pq;
  const double db = cross(pq, b - p) / len_pq;
  if (!((da > eps && db < -eps) || (da < -eps && db > eps))) return false;
  const double dp = cross(ab, p - a) / len_ab;
  const double dq = cross(ab, q - a) / len_ab;
  return (dp > eps && dq < -eps) || (dp < -eps && dq > eps);
}

}  // namespace idp
