#pragma once

#include <array>
#include <cmath>

#include "vpgeo/errors.hpp"
#include "vpgeo/projective.hpp"

namespace vpgeo {

/// Coordinate frame of a projected cuboid. Image: pixels, origin top-left,
/// y down. RoiRelative: offsets from the 2D box center, normalized by the
/// box width/height, so a cuboid inside its box lands in [-0.5, 0.5].
enum class Frame { Image, RoiRelative };

/// The three edge directions of the box: F runs front-to-rear along the
/// vehicle length, R is vertical (roof-to-ground), S runs across the width.
enum class Direction { F, R, S };

/// A face is named for the direction it faces, so the Front quad is spanned
/// by S-direction and vertical edges.
enum class Face { Front, Roof, Side };

/// Axis-aligned 2D anchor box, top-left corner plus size, in pixels.
struct Box2D {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
};

/// Projected 3D bounding box: eight labeled image-plane vertices.
///
/// Labeling convention (fixed so every downstream table is deterministic):
/// vertices 0-3 are the roof quad in cycle order, 4-7 the bottom quad, with
/// vertex i+4 vertically below vertex i. Edges (0,3), (1,2), (5,6), (4,7)
/// run along the F direction; edges (0,1), (3,2), (4,5), (7,6) along S.
struct Cuboid2D {
  std::array<Point2, 8> vertices{};
  Frame frame = Frame::Image;
};

/// Four vertex-disjoint parallel edges of one direction.
struct DirectionGroup {
  Direction direction;
  std::array<std::array<int, 2>, 4> edges;
};

/// One face of the cuboid as an ordered quad. Corner order starts at the
/// smallest vertex index of the face and follows the fixed tables below, so
/// the homography mapped onto a face has a deterministic orientation.
struct FaceQuad {
  Face face;
  std::array<Point2, 4> corners;
};

inline DirectionGroup direction_edges(Direction d) {
  switch (d) {
    case Direction::F:
      return {Direction::F, {{{0, 3}, {1, 2}, {5, 6}, {4, 7}}}};
    case Direction::R:
      return {Direction::R, {{{0, 4}, {1, 5}, {2, 6}, {3, 7}}}};
    default:
      return {Direction::S, {{{0, 1}, {3, 2}, {4, 5}, {7, 6}}}};
  }
}

namespace detail {

inline constexpr std::array<int, 4> face_indices(Face f) {
  switch (f) {
    case Face::Roof:
      return {0, 1, 2, 3};
    case Face::Front:
      return {0, 1, 5, 4};
    default:  // Side
      return {1, 2, 6, 5};
  }
}

}  // namespace detail

inline FaceQuad face_quad(const Cuboid2D& c, Face f) {
  const auto idx = detail::face_indices(f);
  FaceQuad out{f, {}};
  for (int k = 0; k < 4; ++k) {
    out.corners[static_cast<std::size_t>(k)] =
        c.vertices[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])];
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (distance(out.corners[static_cast<std::size_t>(i)],
                   out.corners[static_cast<std::size_t>(j)]) <=
          kEpsDegenerate) {
        throw DegenerateQuad("face quad has coincident corners");
      }
    }
  }
  return out;
}

/// Map image-frame vertices into the box-relative frame:
/// x' = (x - bx - bw/2) / bw, y' = (y - by - bh/2) / bh.
inline Cuboid2D to_roi_relative(const Cuboid2D& c, const Box2D& b) {
  if (c.frame != Frame::Image) {
    throw FrameMismatch("to_roi_relative expects an image-frame cuboid");
  }
  if (!(b.w > 0.0) || !(b.h > 0.0)) {
    throw ValidationError("box width and height must be positive");
  }
  Cuboid2D out;
  out.frame = Frame::RoiRelative;
  for (std::size_t i = 0; i < 8; ++i) {
    out.vertices[i].x = (c.vertices[i].x - b.x - b.w / 2.0) / b.w;
    out.vertices[i].y = (c.vertices[i].y - b.y - b.h / 2.0) / b.h;
  }
  return out;
}

/// Exact algebraic inverse of to_roi_relative.
inline Cuboid2D from_roi_relative(const Cuboid2D& c, const Box2D& b) {
  if (c.frame != Frame::RoiRelative) {
    throw FrameMismatch("from_roi_relative expects a RoI-relative cuboid");
  }
  if (!(b.w > 0.0) || !(b.h > 0.0)) {
    throw ValidationError("box width and height must be positive");
  }
  Cuboid2D out;
  out.frame = Frame::Image;
  for (std::size_t i = 0; i < 8; ++i) {
    out.vertices[i].x = c.vertices[i].x * b.w + b.x + b.w / 2.0;
    out.vertices[i].y = c.vertices[i].y * b.h + b.y + b.h / 2.0;
  }
  return out;
}

/// Flatten to the 16-coordinate layout used by losses and gradients:
/// (x0, y0, x1, y1, ..., x7, y7).
inline std::array<double, 16> coordinates(const Cuboid2D& c) {
  std::array<double, 16> out{};
  for (std::size_t i = 0; i < 8; ++i) {
    out[2 * i] = c.vertices[i].x;
    out[2 * i + 1] = c.vertices[i].y;
  }
  return out;
}

inline Cuboid2D cuboid_from_coordinates(const std::array<double, 16>& coords,
                                        Frame frame) {
  Cuboid2D out;
  out.frame = frame;
  for (std::size_t i = 0; i < 8; ++i) {
    out.vertices[i] = {coords[2 * i], coords[2 * i + 1]};
  }
  return out;
}

}  // namespace vpgeo
