#pragma once

#include <array>
#include <cmath>

#include "vpgeo/cuboid.hpp"
#include "vpgeo/errors.hpp"
#include "vpgeo/projective.hpp"

namespace vpgeo {

/// A scalar loss together with its derivative with respect to the 16 vertex
/// coordinates, laid out (x0, y0, ..., x7, y7).
struct LossValue {
  double value = 0.0;
  std::array<double, 16> grad{};
};

/// Weights of the surrounding multi-task objective. Only lambda2 multiplies
/// a term computed here; lambda1 and lambda3 belong to the detection and
/// classification heads and are carried so the full formula is representable.
struct LossWeights {
  double lambda1 = 1.0;
  double lambda2 = 0.1;
  double lambda3 = 1.0;
};

namespace detail {

/// Canonicalized line plus the Jacobian of its coefficients with respect to
/// the defining endpoints (p.x, p.y, q.x, q.y). The unit normalization is
/// differentiated (quotient rule), not treated as a constant, so downstream
/// gradients agree with finite differences of the actual loss.
struct LineWithJacobian {
  Line2H line;
  // jac[k][t]: d(coefficient k of {m, n, l}) / d(parameter t of {px, py, qx, qy})
  std::array<std::array<double, 4>, 3> jac{};
};

inline LineWithJacobian line_through_jacobian(const Point2& p,
                                              const Point2& q) {
  const double a = p.y - q.y;
  const double b = q.x - p.x;
  const double s2 = a * a + b * b;
  const double s = std::sqrt(s2);
  if (s <= kEpsDegenerate) {
    throw DegenerateLine("line through coincident points");
  }
  const double c = p.x * q.y - p.y * q.x;
  const double sign = (a < 0.0 || (a == 0.0 && b < 0.0)) ? -1.0 : 1.0;

  // Raw coefficient derivatives per parameter (px, py, qx, qy).
  const std::array<double, 4> da = {0.0, 1.0, 0.0, -1.0};
  const std::array<double, 4> db = {-1.0, 0.0, 1.0, 0.0};
  const std::array<double, 4> dc = {q.y, -q.x, -p.y, p.x};

  const double inv_s = 1.0 / s;
  const double inv_s3 = inv_s / s2;

  LineWithJacobian out;
  out.line = {sign * a * inv_s, sign * b * inv_s, sign * c * inv_s};
  for (std::size_t t = 0; t < 4; ++t) {
    const double ds = a * da[t] + b * db[t];  // s * ds/dt
    out.jac[0][t] = sign * (da[t] * inv_s - a * ds * inv_s3);
    out.jac[1][t] = sign * (db[t] * inv_s - b * ds * inv_s3);
    out.jac[2][t] = sign * (dc[t] * inv_s - c * ds * inv_s3);
  }
  return out;
}

/// det([r1; r2; r3]) and its gradient with respect to each coefficient row,
/// via the triple-product form D = r1 . (r2 x r3).
struct DetWithGrad {
  double det = 0.0;
  std::array<std::array<double, 3>, 3> row_grad{};
};

inline std::array<double, 3> cross3(const Line2H& u, const Line2H& v) {
  return {u.n * v.l - u.l * v.n, u.l * v.m - u.m * v.l,
          u.m * v.n - u.n * v.m};
}

inline DetWithGrad det3_with_grad(const Line2H& r1, const Line2H& r2,
                                  const Line2H& r3) {
  DetWithGrad out;
  out.row_grad[0] = cross3(r2, r3);
  out.row_grad[1] = cross3(r3, r1);
  out.row_grad[2] = cross3(r1, r2);
  out.det =
      r1.m * out.row_grad[0][0] + r1.n * out.row_grad[0][1] + r1.l * out.row_grad[0][2];
  return out;
}

/// Accumulate 2 * det * d(det)/d(vertex coords) for one line triple.
inline void accumulate_squared_det_grad(
    const DetWithGrad& d, const std::array<int, 3>& which_edges,
    const DirectionGroup& group,
    const std::array<LineWithJacobian, 4>& lines,
    std::array<double, 16>& grad) {
  const double factor = 2.0 * d.det;
  for (std::size_t r = 0; r < 3; ++r) {
    const int e = which_edges[r];
    const auto& edge = group.edges[static_cast<std::size_t>(e)];
    const auto& lj = lines[static_cast<std::size_t>(e)];
    for (std::size_t t = 0; t < 4; ++t) {
      double g = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        g += d.row_grad[r][k] * lj.jac[k][t];
      }
      const int vertex = (t < 2) ? edge[0] : edge[1];
      grad[static_cast<std::size_t>(2 * vertex) + (t % 2)] += factor * g;
    }
  }
}

}  // namespace detail

/// Vanishing-point regularization for one edge direction. With the group's
/// ordered edges (e1, e2, e3, e4), the value is D1^2 + D2^2 where D1 is the
/// concurrency determinant of the lines through (e1, e2, e3) and D2 of the
/// lines through (e1, e4, e3); the two diagonal lines are shared between the
/// triples. Requires RoI-relative input: the determinant is not scale-free
/// across frames, so image-frame cuboids are rejected rather than converted.
inline LossValue vp_loss_direction(const Cuboid2D& c, Direction dir) {
  if (c.frame != Frame::RoiRelative) {
    throw FrameMismatch("vp_loss_direction expects a RoI-relative cuboid");
  }
  const DirectionGroup group = direction_edges(dir);
  std::array<detail::LineWithJacobian, 4> lines;
  for (std::size_t e = 0; e < 4; ++e) {
    const auto& pair = group.edges[e];
    lines[e] = detail::line_through_jacobian(
        c.vertices[static_cast<std::size_t>(pair[0])],
        c.vertices[static_cast<std::size_t>(pair[1])]);
  }

  const auto d1 =
      detail::det3_with_grad(lines[0].line, lines[1].line, lines[2].line);
  const auto d2 =
      detail::det3_with_grad(lines[0].line, lines[3].line, lines[2].line);

  LossValue out;
  out.value = d1.det * d1.det + d2.det * d2.det;
  detail::accumulate_squared_det_grad(d1, {0, 1, 2}, group, lines, out.grad);
  detail::accumulate_squared_det_grad(d2, {0, 3, 2}, group, lines, out.grad);
  return out;
}

/// Full vanishing-point loss: the sum over the F, R, and S directions.
/// Zero (to rounding) exactly when all six determinants vanish, which a
/// pinhole projection of a true 3D box guarantees.
inline LossValue vp_loss(const Cuboid2D& c) {
  const LossValue f = vp_loss_direction(c, Direction::F);
  const LossValue r = vp_loss_direction(c, Direction::R);
  const LossValue s = vp_loss_direction(c, Direction::S);
  LossValue out;
  out.value = f.value + r.value + s.value;
  for (std::size_t i = 0; i < 16; ++i) {
    out.grad[i] = f.grad[i] + r.grad[i] + s.grad[i];
  }
  return out;
}

/// Smooth-L1 regression loss, reduced as the mean over the 16 coordinates:
/// phi(d) = 0.5 d^2 for |d| < 1, |d| - 0.5 otherwise. The gradient is taken
/// with respect to `pred`.
inline LossValue smooth_l1(const std::array<double, 16>& pred,
                           const std::array<double, 16>& target) {
  LossValue out;
  for (std::size_t i = 0; i < 16; ++i) {
    const double d = pred[i] - target[i];
    if (std::abs(d) < 1.0) {
      out.value += 0.5 * d * d;
      out.grad[i] = d / 16.0;
    } else {
      out.value += std::abs(d) - 0.5;
      out.grad[i] = (d > 0.0 ? 1.0 : -1.0) / 16.0;
    }
  }
  out.value /= 16.0;
  return out;
}

/// Combined regression objective for the 3D branch: smooth-L1 against the
/// target vertices plus the vanishing-point regularization of the prediction.
inline LossValue loss_3dbranch(const Cuboid2D& pred, const Cuboid2D& target) {
  if (pred.frame != Frame::RoiRelative || target.frame != Frame::RoiRelative) {
    throw FrameMismatch("loss_3dbranch expects RoI-relative cuboids");
  }
  const LossValue reg = smooth_l1(coordinates(pred), coordinates(target));
  const LossValue vp = vp_loss(pred);
  LossValue out;
  out.value = reg.value + vp.value;
  for (std::size_t i = 0; i < 16; ++i) {
    out.grad[i] = reg.grad[i] + vp.grad[i];
  }
  return out;
}

}  // namespace vpgeo
