#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "vpgeo/cuboid.hpp"
#include "vpgeo/errors.hpp"
#include "vpgeo/rng.hpp"

namespace vpgeo {

/// Minimum camera-frame depth for a projectable point (world units).
inline constexpr double kEpsDepth = 1e-6;

/// Pinhole camera. World and camera coordinates share the image convention:
/// x right, y down, z along the optical axis, so the vertical world axis is
/// y and "up" means negative y. rotation maps world to camera directions,
/// translation is applied after it: X_cam = R * X_world + t.
struct Camera {
  double focal = 1.0;
  Point2 principal{};
  std::array<double, 9> rotation = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  std::array<double, 3> translation = {0, 0, 0};
};

/// World-space box: center, (length, width, height) extents, and yaw about
/// the vertical axis. Yaw zero points the length axis along world x.
struct Box3D {
  std::array<double, 3> center{};
  std::array<double, 3> dims = {1, 1, 1};
  double yaw = 0.0;
};

/// A generated scene: the world box, the camera, the exact projection with
/// the labeling convention of Cuboid2D, and the tight 2D bounds.
struct Scene {
  Box3D box3d;
  Camera camera;
  Cuboid2D cuboid;
  Box2D bbox;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::array<double, 3> rotate(const std::array<double, 9>& r,
                                    const std::array<double, 3>& v) {
  return {r[0] * v[0] + r[1] * v[1] + r[2] * v[2],
          r[3] * v[0] + r[4] * v[1] + r[5] * v[2],
          r[6] * v[0] + r[7] * v[1] + r[8] * v[2]};
}

inline std::array<double, 3> rotate_transposed(const std::array<double, 9>& r,
                                               const std::array<double, 3>& v) {
  return {r[0] * v[0] + r[3] * v[1] + r[6] * v[2],
          r[1] * v[0] + r[4] * v[1] + r[7] * v[2],
          r[2] * v[0] + r[5] * v[1] + r[8] * v[2]};
}

inline std::array<double, 9> matmul3(const std::array<double, 9>& a,
                                     const std::array<double, 9>& b) {
  std::array<double, 9> out{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) {
        acc += a[static_cast<std::size_t>(3 * i + k)] *
               b[static_cast<std::size_t>(3 * k + j)];
      }
      out[static_cast<std::size_t>(3 * i + j)] = acc;
    }
  }
  return out;
}

inline std::array<double, 9> rotation_about_x(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {1, 0, 0, 0, c, -s, 0, s, c};
}

inline std::array<double, 9> rotation_about_z(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c, -s, 0, s, c, 0, 0, 0, 1};
}

}  // namespace detail

/// World coordinates of the eight labeled corners. Index 0 starts at
/// (+length/2, +width/2) on the roof (the minimum-y face); the roof cycle
/// runs 0 -> 1 -> 2 -> 3 and vertex i+4 sits directly below vertex i, which
/// reproduces the edge-direction tables of the cuboid module.
inline std::array<std::array<double, 3>, 8> box_corners(const Box3D& b) {
  const double cy = std::cos(b.yaw);
  const double sy = std::sin(b.yaw);
  const std::array<double, 3> axis_len = {cy, 0.0, sy};
  const std::array<double, 3> axis_wid = {-sy, 0.0, cy};
  const double hl = b.dims[0] / 2.0;
  const double hw = b.dims[1] / 2.0;
  const double hh = b.dims[2] / 2.0;

  // (length sign, width sign) per roof vertex 0..3.
  constexpr std::array<std::array<double, 2>, 4> roof_signs = {
      {{+1, +1}, {+1, -1}, {-1, -1}, {-1, +1}}};

  std::array<std::array<double, 3>, 8> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t axis = 0; axis < 3; ++axis) {
      const double offset = roof_signs[i][0] * hl * axis_len[axis] +
                            roof_signs[i][1] * hw * axis_wid[axis];
      out[i][axis] = b.center[axis] + offset;
      out[i + 4][axis] = b.center[axis] + offset;
    }
    out[i][1] -= hh;      // roof: up is -y
    out[i + 4][1] += hh;  // bottom
  }
  return out;
}

inline Point2 project_point(const std::array<double, 3>& world,
                            const Camera& cam) {
  const auto r = detail::rotate(cam.rotation, world);
  const std::array<double, 3> p = {r[0] + cam.translation[0],
                                   r[1] + cam.translation[1],
                                   r[2] + cam.translation[2]};
  if (p[2] <= kEpsDepth) {
    throw BehindCamera("point has non-positive depth");
  }
  return {cam.focal * p[0] / p[2] + cam.principal.x,
          cam.focal * p[1] / p[2] + cam.principal.y};
}

/// Exact pinhole projection of the eight labeled corners. Because the world
/// edges of each direction group are parallel in 3D, the projected lines of
/// a group are concurrent, so vp_loss of the result vanishes to rounding.
inline Cuboid2D project_cuboid(const Box3D& b, const Camera& cam) {
  const auto corners = box_corners(b);
  Cuboid2D out;
  out.frame = Frame::Image;
  for (std::size_t i = 0; i < 8; ++i) {
    out.vertices[i] = project_point(corners[i], cam);
  }
  return out;
}

/// Tight axis-aligned bounds of the projected vertices.
inline Box2D bounding_box(const Cuboid2D& c) {
  double min_x = c.vertices[0].x, max_x = c.vertices[0].x;
  double min_y = c.vertices[0].y, max_y = c.vertices[0].y;
  for (const auto& v : c.vertices) {
    min_x = std::min(min_x, v.x);
    max_x = std::max(max_x, v.x);
    min_y = std::min(min_y, v.y);
    max_y = std::max(max_y, v.y);
  }
  return {min_x, min_y, max_x - min_x, max_y - min_y};
}

/// Deterministic per-seed scene inside a 256x256 image. Sampling ranges are
/// chosen for clear perspective convergence without near-degenerate quads:
/// depth 4-20 units, yaw uniform, dims in [1,3]x[1,2]x[1,2], a camera pitch
/// so vertical edges generally meet at a finite point. Rejection-samples
/// until all eight vertices land inside the image with margin.
inline Scene random_scene(std::uint64_t seed) {
  CounterRng rng(seed);
  constexpr double kImage = 256.0;
  constexpr double kMargin = 8.0;
  constexpr double kPi = 3.14159265358979323846;

  for (int attempt = 0; attempt < 1000; ++attempt) {
    Camera cam;
    cam.focal = rng.next_uniform(120.0, 280.0);
    cam.principal = {kImage / 2.0, kImage / 2.0};
    const double pitch = rng.next_uniform(-0.40, 0.40);
    const double roll = rng.next_uniform(-0.15, 0.15);
    cam.rotation = detail::matmul3(detail::rotation_about_x(pitch),
                                   detail::rotation_about_z(roll));
    cam.translation = {rng.next_uniform(-1.0, 1.0), rng.next_uniform(-1.0, 1.0),
                       rng.next_uniform(-1.0, 1.0)};

    Box3D box;
    box.dims = {rng.next_uniform(1.0, 3.0), rng.next_uniform(1.0, 2.0),
                rng.next_uniform(1.0, 2.0)};
    box.yaw = rng.next_uniform(0.0, 2.0 * kPi);

    // Place the box center so it projects near the image center, then map
    // back to world coordinates.
    const double depth = rng.next_uniform(4.0, 20.0);
    const double u = rng.next_uniform(96.0, 160.0);
    const double v = rng.next_uniform(96.0, 160.0);
    const std::array<double, 3> center_cam = {
        (u - cam.principal.x) * depth / cam.focal,
        (v - cam.principal.y) * depth / cam.focal, depth};
    const std::array<double, 3> offset = {center_cam[0] - cam.translation[0],
                                          center_cam[1] - cam.translation[1],
                                          center_cam[2] - cam.translation[2]};
    box.center = detail::rotate_transposed(cam.rotation, offset);

    Cuboid2D projected;
    try {
      projected = project_cuboid(box, cam);
    } catch (const BehindCamera&) {
      continue;
    }

    bool inside = true;
    for (const auto& p : projected.vertices) {
      if (p.x < kMargin || p.x > kImage - kMargin || p.y < kMargin ||
          p.y > kImage - kMargin) {
        inside = false;
        break;
      }
    }
    if (!inside) {
      continue;
    }
    const Box2D bounds = bounding_box(projected);
    if (bounds.w < 8.0 || bounds.h < 8.0) {
      continue;
    }
    return {box, cam, projected, bounds, seed};
  }
  throw NumericError("scene sampling failed to converge");
}

/// Add zero-mean Gaussian noise (std sigma, in the cuboid's own units) to
/// every coordinate. Draws are consumed x-then-y in vertex order.
inline Cuboid2D perturb(const Cuboid2D& c, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) {
    throw ValidationError("sigma must be non-negative");
  }
  CounterRng rng(seed);
  Cuboid2D out = c;
  for (auto& v : out.vertices) {
    v.x += sigma * rng.next_normal();
    v.y += sigma * rng.next_normal();
  }
  return out;
}

}  // namespace vpgeo
