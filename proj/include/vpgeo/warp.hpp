#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "vpgeo/cuboid.hpp"
#include "vpgeo/errors.hpp"
#include "vpgeo/projective.hpp"

namespace vpgeo {

/// Collinearity threshold on the triangle area of any corner triple.
inline constexpr double kEpsCollinear = 1e-9;

/// 3x3 projective map, row-major, with the last entry fixed to 1.
struct Homography {
  std::array<double, 9> entries = {1, 0, 0, 0, 1, 0, 0, 0, 1};

  /// Apply and dehomogenize.
  Point2 apply(const Point2& p) const {
    const double w = entries[6] * p.x + entries[7] * p.y + entries[8];
    return {(entries[0] * p.x + entries[1] * p.y + entries[2]) / w,
            (entries[3] * p.x + entries[4] * p.y + entries[5]) / w};
  }

  double det() const {
    const auto& h = entries;
    return h[0] * (h[4] * h[8] - h[5] * h[7]) -
           h[1] * (h[3] * h[8] - h[5] * h[6]) +
           h[2] * (h[3] * h[7] - h[4] * h[6]);
  }
};

/// Dense H x W x C grid of scalar samples, row-major with channel as the
/// fastest-varying index. Stored as 64-bit values; the on-disk format is
/// 32-bit (see save_fmap/load_fmap).
struct FeatureMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;
  std::vector<double> data;

  static FeatureMap zeros(std::size_t h, std::size_t w, std::size_t c) {
    FeatureMap f;
    f.height = h;
    f.width = w;
    f.channels = c;
    f.data.assign(h * w * c, 0.0);
    return f;
  }

  double& at(std::size_t y, std::size_t x, std::size_t c) {
    return data[(y * width + x) * channels + c];
  }
  double at(std::size_t y, std::size_t x, std::size_t c) const {
    return data[(y * width + x) * channels + c];
  }
};

namespace detail {

inline void check_no_collinear_triple(const std::array<Point2, 4>& pts,
                                      const char* which) {
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      for (int k = j + 1; k < 4; ++k) {
        const Point2& a = pts[static_cast<std::size_t>(i)];
        const Point2& b = pts[static_cast<std::size_t>(j)];
        const Point2& c = pts[static_cast<std::size_t>(k)];
        const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
        if (std::abs(cross) / 2.0 <= kEpsCollinear) {
          throw DegenerateConfiguration(
              std::string("collinear corner triple in ") + which);
        }
      }
    }
  }
}

/// Gaussian elimination with partial pivoting on an 8x8 system.
inline std::array<double, 8> solve8(std::array<std::array<double, 9>, 8>& aug) {
  for (int col = 0; col < 8; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 8; ++r) {
      if (std::abs(aug[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
          std::abs(aug[static_cast<std::size_t>(pivot)][static_cast<std::size_t>(col)])) {
        pivot = r;
      }
    }
    if (std::abs(aug[static_cast<std::size_t>(pivot)][static_cast<std::size_t>(col)]) <= 1e-12) {
      throw DegenerateConfiguration("singular correspondence system");
    }
    std::swap(aug[static_cast<std::size_t>(col)], aug[static_cast<std::size_t>(pivot)]);
    const double inv = 1.0 / aug[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
    for (int r = col + 1; r < 8; ++r) {
      const double factor = aug[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] * inv;
      if (factor == 0.0) continue;
      for (int c = col; c < 9; ++c) {
        aug[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
            factor * aug[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
      }
    }
  }
  std::array<double, 8> x{};
  for (int r = 7; r >= 0; --r) {
    double acc = aug[static_cast<std::size_t>(r)][8];
    for (int c = r + 1; c < 8; ++c) {
      acc -= aug[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
    }
    x[static_cast<std::size_t>(r)] = acc / aug[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
  }
  return x;
}

}  // namespace detail

/// Homography from four point correspondences (direct linear transform with
/// the H33 = 1 parameterization): maps dst_corners onto src_quad, i.e.
/// H * (t, 1) ~ (q, 1) for each pair. The backward direction suits warping:
/// iterate over target pixels and look up where they come from.
inline Homography dlt_homography(const std::array<Point2, 4>& dst_corners,
                                 const std::array<Point2, 4>& src_quad) {
  detail::check_no_collinear_triple(dst_corners, "destination corners");
  detail::check_no_collinear_triple(src_quad, "source quad");

  std::array<std::array<double, 9>, 8> aug{};
  for (std::size_t i = 0; i < 4; ++i) {
    const Point2& t = dst_corners[i];
    const Point2& q = src_quad[i];
    aug[2 * i] = {t.x, t.y, 1.0, 0.0, 0.0, 0.0, -q.x * t.x, -q.x * t.y, q.x};
    aug[2 * i + 1] = {0.0, 0.0, 0.0, t.x, t.y, 1.0, -q.y * t.x, -q.y * t.y, q.y};
  }
  const auto h = detail::solve8(aug);
  Homography out;
  out.entries = {h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], 1.0};
  if (std::abs(out.det()) <= 1e-12) {
    throw DegenerateConfiguration("homography is singular");
  }
  return out;
}

/// Bilinear interpolation with pixel centers at integer + 0.5. Taps outside
/// the valid grid contribute zero, so samples fade to zero across the border
/// and vanish entirely beyond half a pixel outside it.
inline double bilinear_sample(const FeatureMap& f, double x, double y,
                              std::size_t channel) {
  const double u = x - 0.5;
  const double v = y - 0.5;
  const double fx0 = std::floor(u);
  const double fy0 = std::floor(v);
  const double ax = u - fx0;
  const double ay = v - fy0;
  const long long x0 = static_cast<long long>(fx0);
  const long long y0 = static_cast<long long>(fy0);

  double acc = 0.0;
  for (int dy = 0; dy < 2; ++dy) {
    for (int dx = 0; dx < 2; ++dx) {
      const long long xi = x0 + dx;
      const long long yi = y0 + dy;
      if (xi < 0 || yi < 0 || xi >= static_cast<long long>(f.width) ||
          yi >= static_cast<long long>(f.height)) {
        continue;
      }
      const double wgt = (dx ? ax : 1.0 - ax) * (dy ? ay : 1.0 - ay);
      acc += wgt * f.at(static_cast<std::size_t>(yi),
                        static_cast<std::size_t>(xi), channel);
    }
  }
  return acc;
}

/// Warp the content of an arbitrary quad onto a fixed-size grid. Output
/// pixel (i, j) is a single bilinear sample of the source at the image of
/// its center (j + 0.5, i + 0.5) under the backward homography from the
/// canonical rectangle (0,0)-(out_w,out_h) to the quad.
inline FeatureMap perspective_roi(const FeatureMap& f,
                                  const std::array<Point2, 4>& quad,
                                  std::size_t out_h, std::size_t out_w) {
  if (out_h < 1 || out_w < 1) {
    throw ValidationError("output size must be at least 1x1");
  }
  const std::array<Point2, 4> target = {
      Point2{0.0, 0.0}, Point2{static_cast<double>(out_w), 0.0},
      Point2{static_cast<double>(out_w), static_cast<double>(out_h)},
      Point2{0.0, static_cast<double>(out_h)}};
  const Homography h = dlt_homography(target, quad);

  FeatureMap out = FeatureMap::zeros(out_h, out_w, f.channels);
  for (std::size_t i = 0; i < out_h; ++i) {
    for (std::size_t j = 0; j < out_w; ++j) {
      const Point2 t{static_cast<double>(j) + 0.5, static_cast<double>(i) + 0.5};
      const double w =
          h.entries[6] * t.x + h.entries[7] * t.y + h.entries[8];
      if (std::abs(w) <= 1e-12) {
        continue;  // maps to infinity: nothing to sample
      }
      const Point2 s{(h.entries[0] * t.x + h.entries[1] * t.y + h.entries[2]) / w,
                     (h.entries[3] * t.x + h.entries[4] * t.y + h.entries[5]) / w};
      for (std::size_t c = 0; c < f.channels; ++c) {
        out.at(i, j, c) = bilinear_sample(f, s.x, s.y, c);
      }
    }
  }
  return out;
}

inline FeatureMap perspective_roi(const FeatureMap& f, const FaceQuad& quad,
                                  std::size_t out_h, std::size_t out_w) {
  return perspective_roi(f, quad.corners, out_h, out_w);
}

/// Axis-aligned pooling with one bilinear sample per output pixel, at the
/// box-mapped center. Agrees with perspective_roi on the box's rectangle
/// quad; kept as a direct computation so the two can cross-check each other.
inline FeatureMap roi_align(const FeatureMap& f, const Box2D& box,
                            std::size_t out_h, std::size_t out_w) {
  if (out_h < 1 || out_w < 1) {
    throw ValidationError("output size must be at least 1x1");
  }
  FeatureMap out = FeatureMap::zeros(out_h, out_w, f.channels);
  for (std::size_t i = 0; i < out_h; ++i) {
    for (std::size_t j = 0; j < out_w; ++j) {
      const double sx =
          box.x + (static_cast<double>(j) + 0.5) * box.w / static_cast<double>(out_w);
      const double sy =
          box.y + (static_cast<double>(i) + 0.5) * box.h / static_cast<double>(out_h);
      for (std::size_t c = 0; c < f.channels; ++c) {
        out.at(i, j, c) = bilinear_sample(f, sx, sy, c);
      }
    }
  }
  return out;
}

// ----------------------------------------------------------------------------
// FMAP container: magic "FMAP", then H, W, C as unsigned 32-bit little-endian,
// then H*W*C IEEE-754 32-bit little-endian values, row-major, channel-minor.

namespace detail {

inline void put_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

inline std::uint32_t get_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

inline std::string encode_fmap(const FeatureMap& f) {
  std::string out;
  out.reserve(16 + 4 * f.data.size());
  out += "FMAP";
  detail::put_u32le(out, static_cast<std::uint32_t>(f.height));
  detail::put_u32le(out, static_cast<std::uint32_t>(f.width));
  detail::put_u32le(out, static_cast<std::uint32_t>(f.channels));
  for (double v : f.data) {
    const float narrowed = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &narrowed, sizeof(bits));
    detail::put_u32le(out, bits);
  }
  return out;
}

inline FeatureMap decode_fmap(const std::string& bytes) {
  if (bytes.size() < 16 || bytes.compare(0, 4, "FMAP") != 0) {
    throw ValidationError("not an FMAP file (bad magic or truncated header)");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t h = detail::get_u32le(p + 4);
  const std::uint32_t w = detail::get_u32le(p + 8);
  const std::uint32_t c = detail::get_u32le(p + 12);
  const std::uint64_t count =
      static_cast<std::uint64_t>(h) * w * c;
  if (count > (1ull << 28)) {
    throw ValidationError("FMAP dimensions unreasonably large");
  }
  if (bytes.size() != 16 + 4 * count) {
    throw IoError("FMAP payload size does not match header");
  }
  FeatureMap f = FeatureMap::zeros(h, w, c);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint32_t bits = detail::get_u32le(p + 16 + 4 * i);
    float v;
    std::memcpy(&v, &bits, sizeof(v));
    if (!std::isfinite(v)) {
      throw ValidationError("FMAP contains non-finite values");
    }
    f.data[i] = static_cast<double>(v);
  }
  return f;
}

inline void save_fmap(const FeatureMap& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open for writing: " + path);
  }
  const std::string bytes = encode_fmap(f);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

inline FeatureMap load_fmap(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open: " + path);
  }
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return decode_fmap(bytes);
}

}  // namespace vpgeo
