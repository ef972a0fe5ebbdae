#pragma once

#include <cmath>
#include <string>

#include "vpgeo/errors.hpp"

namespace vpgeo {

/// Points closer than this are treated as coincident (RoI-relative units).
inline constexpr double kEpsDegenerate = 1e-9;

/// Threshold on the 2x2 cross term below which two lines count as parallel.
inline constexpr double kEpsParallel = 1e-12;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(const Point2& a, const Point2& b) {
  return {a.x + b.x, a.y + b.y};
}

inline Point2 operator-(const Point2& a, const Point2& b) {
  return {a.x - b.x, a.y - b.y};
}

inline double distance(const Point2& p, const Point2& q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  return std::sqrt(dx * dx + dy * dy);
}

/// Homogeneous line m*x + n*y + l = 0, stored unit-normalized:
/// sqrt(m^2 + n^2) == 1 and the first nonzero of (m, n) is positive. The
/// normalization makes the concurrency determinant scale-free, so loss
/// magnitudes are comparable across edges.
struct Line2H {
  double m = 0.0;
  double n = 0.0;
  double l = 0.0;

  /// Normalize arbitrary coefficients into the canonical representation.
  static Line2H from_coefficients(double m, double n, double l) {
    const double s = std::sqrt(m * m + n * n);
    if (!(s > 1e-150)) {
      throw DegenerateLine("line coefficients have (m, n) == (0, 0)");
    }
    Line2H out{m / s, n / s, l / s};
    if (out.m < 0.0 || (out.m == 0.0 && out.n < 0.0)) {
      out.m = -out.m;
      out.n = -out.n;
      out.l = -out.l;
    }
    return out;
  }

  /// Signed distance of (x, y) from the line; exact incidence gives 0.
  double eval(const Point2& p) const { return m * p.x + n * p.y + l; }
};

/// Line joining two points, computed as the homogeneous cross product
/// (p.x, p.y, 1) x (q.x, q.y, 1), then canonicalized. Symmetric in its
/// arguments: line_through(p, q) == line_through(q, p) exactly.
inline Line2H line_through(const Point2& p, const Point2& q) {
  const double a = p.y - q.y;
  const double b = q.x - p.x;
  const double s = std::sqrt(a * a + b * b);
  if (s <= kEpsDegenerate) {
    throw DegenerateLine("line through coincident points");
  }
  const double c = p.x * q.y - p.y * q.x;
  Line2H out{a / s, b / s, c / s};
  if (a < 0.0 || (a == 0.0 && b < 0.0)) {
    out.m = -out.m;
    out.n = -out.n;
    out.l = -out.l;
  }
  return out;
}

/// Determinant of the stacked coefficient rows. Zero exactly when the three
/// lines share a common point, including a point at infinity (three mutually
/// parallel lines).
inline double concurrency_det(const Line2H& l1, const Line2H& l2,
                              const Line2H& l3) {
  return l1.m * (l2.n * l3.l - l2.l * l3.n) -
         l1.n * (l2.m * l3.l - l2.l * l3.m) +
         l1.l * (l2.m * l3.n - l2.n * l3.m);
}

/// Intersection of two non-parallel lines.
inline Point2 lines_intersection(const Line2H& l1, const Line2H& l2) {
  const double cross = l1.m * l2.n - l1.n * l2.m;
  if (std::abs(cross) <= kEpsParallel) {
    throw ParallelLines("lines are parallel within tolerance");
  }
  return {(-l1.l * l2.n + l2.l * l1.n) / cross,
          (-l1.m * l2.l + l2.m * l1.l) / cross};
}

}  // namespace vpgeo
