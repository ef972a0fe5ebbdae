#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vpgeo/cuboid.hpp"
#include "vpgeo/errors.hpp"
#include "vpgeo/projective.hpp"

namespace vpgeo {

/// Interleaved 8-bit RGB raster.
struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;
};

namespace detail {

inline int next_ppm_token(std::istream& in, std::string& token) {
  token.clear();
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (std::isspace(ch)) {
      ch = in.get();
    } else {
      break;
    }
  }
  while (ch != EOF && !std::isspace(ch) && ch != '#') {
    token.push_back(static_cast<char>(ch));
    ch = in.get();
  }
  return ch;
}

inline unsigned parse_ppm_uint(const std::string& token, const char* what) {
  if (token.empty() ||
      !std::all_of(token.begin(), token.end(),
                   [](unsigned char c) { return std::isdigit(c); })) {
    throw ValidationError(std::string("bad PPM ") + what);
  }
  return static_cast<unsigned>(std::stoul(token));
}

}  // namespace detail

/// Reads binary (P6) or ASCII (P3) PPM with maxval up to 255.
inline RgbImage load_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open: " + path);
  }
  std::string token;
  detail::next_ppm_token(in, token);
  const bool binary = token == "P6";
  if (!binary && token != "P3") {
    throw ValidationError("not a PPM file (want P6 or P3)");
  }
  detail::next_ppm_token(in, token);
  const unsigned width = detail::parse_ppm_uint(token, "width");
  detail::next_ppm_token(in, token);
  const unsigned height = detail::parse_ppm_uint(token, "height");
  const int after_maxval = detail::next_ppm_token(in, token);
  const unsigned maxval = detail::parse_ppm_uint(token, "maxval");
  if (width == 0 || height == 0 || maxval == 0 || maxval > 255) {
    throw ValidationError("unsupported PPM dimensions or maxval");
  }
  if (static_cast<std::uint64_t>(width) * height > (1ull << 26)) {
    throw ValidationError("PPM unreasonably large");
  }

  RgbImage img;
  img.width = width;
  img.height = height;
  const std::size_t count = static_cast<std::size_t>(width) * height * 3;
  img.pixels.resize(count);

  if (binary) {
    if (after_maxval == EOF) {
      throw IoError("truncated PPM header");
    }
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count) {
      throw IoError("truncated PPM pixel data");
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      detail::next_ppm_token(in, token);
      const unsigned v = detail::parse_ppm_uint(token, "sample");
      if (v > maxval) {
        throw ValidationError("PPM sample exceeds maxval");
      }
      img.pixels[i] = static_cast<std::uint8_t>(v);
    }
  }
  if (maxval != 255) {
    for (auto& p : img.pixels) {
      p = static_cast<std::uint8_t>((p * 255u + maxval / 2) / maxval);
    }
  }
  return img;
}

namespace detail {

inline std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  static const char table[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t v = (static_cast<std::uint32_t>(bytes[i]) << 16) |
                            (static_cast<std::uint32_t>(bytes[i + 1]) << 8) |
                            bytes[i + 2];
    out.push_back(table[(v >> 18) & 63]);
    out.push_back(table[(v >> 12) & 63]);
    out.push_back(table[(v >> 6) & 63]);
    out.push_back(table[v & 63]);
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = static_cast<std::uint32_t>(bytes[i]) << 16;
    out.push_back(table[(v >> 18) & 63]);
    out.push_back(table[(v >> 12) & 63]);
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (static_cast<std::uint32_t>(bytes[i]) << 16) |
                            (static_cast<std::uint32_t>(bytes[i + 1]) << 8);
    out.push_back(table[(v >> 18) & 63]);
    out.push_back(table[(v >> 12) & 63]);
    out.push_back(table[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

inline void put_u16le(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
}

inline void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

/// 24-bit uncompressed BMP, the one raster format SVG viewers accept from a
/// data URI without extra dependencies here.
inline std::vector<std::uint8_t> encode_bmp(const RgbImage& img) {
  const std::size_t row_bytes = (img.width * 3 + 3) / 4 * 4;
  const std::size_t pixel_bytes = row_bytes * img.height;
  const std::uint32_t file_size =
      static_cast<std::uint32_t>(14 + 40 + pixel_bytes);

  std::vector<std::uint8_t> out;
  out.reserve(file_size);
  out.push_back('B');
  out.push_back('M');
  put_u32le(out, file_size);
  put_u32le(out, 0);
  put_u32le(out, 14 + 40);
  put_u32le(out, 40);
  put_u32le(out, static_cast<std::uint32_t>(img.width));
  put_u32le(out, static_cast<std::uint32_t>(img.height));
  put_u16le(out, 1);
  put_u16le(out, 24);
  put_u32le(out, 0);
  put_u32le(out, static_cast<std::uint32_t>(pixel_bytes));
  put_u32le(out, 2835);
  put_u32le(out, 2835);
  put_u32le(out, 0);
  put_u32le(out, 0);

  for (std::size_t row = img.height; row-- > 0;) {
    const std::size_t base = row * img.width * 3;
    for (std::size_t x = 0; x < img.width; ++x) {
      out.push_back(img.pixels[base + 3 * x + 2]);
      out.push_back(img.pixels[base + 3 * x + 1]);
      out.push_back(img.pixels[base + 3 * x]);
    }
    for (std::size_t pad = img.width * 3; pad < row_bytes; ++pad) {
      out.push_back(0);
    }
  }
  return out;
}

inline std::string fmt(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << v;
  return s.str();
}

}  // namespace detail

/// SVG overlay of a cuboid in image coordinates: the twelve edges colored by
/// direction group, each group's estimated vanishing point (intersection of
/// two opposite edge lines) with dashed convergence rays, and indexed vertex
/// markers. An optional raster is embedded behind the drawing. The viewBox
/// covers the content but never grows past four image diagonals from the
/// center, so far-away vanishing points cannot stretch it without bound.
inline std::string render_overlay_svg(const Cuboid2D& cuboid,
                                      const RgbImage* background = nullptr) {
  if (cuboid.frame != Frame::Image) {
    throw FrameMismatch("overlay expects image-frame coordinates");
  }

  struct GroupStyle {
    Direction dir;
    const char* color;
    const char* label;
  };
  const std::array<GroupStyle, 3> groups = {
      GroupStyle{Direction::F, "#d64545", "F"},
      GroupStyle{Direction::R, "#3a7ca5", "R"},
      GroupStyle{Direction::S, "#4f9d69", "S"}};

  double min_x = cuboid.vertices[0].x, max_x = cuboid.vertices[0].x;
  double min_y = cuboid.vertices[0].y, max_y = cuboid.vertices[0].y;
  for (const Point2& v : cuboid.vertices) {
    min_x = std::min(min_x, v.x);
    max_x = std::max(max_x, v.x);
    min_y = std::min(min_y, v.y);
    max_y = std::max(max_y, v.y);
  }
  if (background != nullptr) {
    min_x = std::min(min_x, 0.0);
    min_y = std::min(min_y, 0.0);
    max_x = std::max(max_x, static_cast<double>(background->width));
    max_y = std::max(max_y, static_cast<double>(background->height));
  }
  const double cx = (min_x + max_x) / 2.0;
  const double cy = (min_y + max_y) / 2.0;
  const double diag = std::max(1.0, std::hypot(max_x - min_x, max_y - min_y));
  const double cap = 4.0 * diag;

  struct VpMark {
    Point2 at;
    const GroupStyle* style;
    std::vector<Point2> ray_from;
  };
  std::vector<VpMark> marks;

  for (const GroupStyle& g : groups) {
    const DirectionGroup group = direction_edges(g.dir);
    std::optional<Point2> vp;
    try {
      const Line2H a =
          line_through(cuboid.vertices[static_cast<std::size_t>(group.edges[0][0])],
                       cuboid.vertices[static_cast<std::size_t>(group.edges[0][1])]);
      const Line2H b =
          line_through(cuboid.vertices[static_cast<std::size_t>(group.edges[2][0])],
                       cuboid.vertices[static_cast<std::size_t>(group.edges[2][1])]);
      vp = lines_intersection(a, b);
    } catch (const NumericError&) {
      // parallel or collapsed edges: no finite estimate for this group
    }
    if (!vp) continue;

    VpMark mark;
    mark.at = *vp;
    mark.style = &g;
    for (const auto& e : group.edges) {
      const Point2& p = cuboid.vertices[static_cast<std::size_t>(e[0])];
      const Point2& q = cuboid.vertices[static_cast<std::size_t>(e[1])];
      mark.ray_from.push_back(distance(p, *vp) <= distance(q, *vp) ? p : q);
    }
    marks.push_back(mark);
    if (std::hypot(vp->x - cx, vp->y - cy) <= cap) {
      min_x = std::min(min_x, vp->x);
      max_x = std::max(max_x, vp->x);
      min_y = std::min(min_y, vp->y);
      max_y = std::max(max_y, vp->y);
    }
  }

  const double pad = 0.05 * std::max(max_x - min_x, max_y - min_y) + 4.0;
  const double vb_x = min_x - pad;
  const double vb_y = min_y - pad;
  const double vb_w = (max_x - min_x) + 2.0 * pad;
  const double vb_h = (max_y - min_y) + 2.0 * pad;

  using detail::fmt;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt(vb_x)
      << " " << fmt(vb_y) << " " << fmt(vb_w) << " " << fmt(vb_h)
      << "\" width=\"" << fmt(vb_w) << "\" height=\"" << fmt(vb_h) << "\">\n";

  if (background != nullptr) {
    const std::vector<std::uint8_t> bmp = detail::encode_bmp(*background);
    svg << "  <image x=\"0\" y=\"0\" width=\"" << background->width
        << "\" height=\"" << background->height
        << "\" image-rendering=\"pixelated\" "
           "href=\"data:image/bmp;base64,"
        << detail::base64_encode(bmp) << "\"/>\n";
  }

  for (const VpMark& mark : marks) {
    for (const Point2& from : mark.ray_from) {
      svg << "  <line x1=\"" << fmt(from.x) << "\" y1=\"" << fmt(from.y)
          << "\" x2=\"" << fmt(mark.at.x) << "\" y2=\"" << fmt(mark.at.y)
          << "\" stroke=\"" << mark.style->color
          << "\" stroke-width=\"0.6\" stroke-dasharray=\"4 3\" "
             "opacity=\"0.55\"/>\n";
    }
  }

  for (const GroupStyle& g : groups) {
    const DirectionGroup group = direction_edges(g.dir);
    for (const auto& e : group.edges) {
      const Point2& p = cuboid.vertices[static_cast<std::size_t>(e[0])];
      const Point2& q = cuboid.vertices[static_cast<std::size_t>(e[1])];
      svg << "  <line x1=\"" << fmt(p.x) << "\" y1=\"" << fmt(p.y)
          << "\" x2=\"" << fmt(q.x) << "\" y2=\"" << fmt(q.y) << "\" stroke=\""
          << g.color << "\" stroke-width=\"1.5\"/>\n";
    }
  }

  for (const VpMark& mark : marks) {
    svg << "  <circle cx=\"" << fmt(mark.at.x) << "\" cy=\"" << fmt(mark.at.y)
        << "\" r=\"3\" fill=\"" << mark.style->color << "\"/>\n";
    svg << "  <text x=\"" << fmt(mark.at.x + 5.0) << "\" y=\""
        << fmt(mark.at.y - 5.0) << "\" font-size=\"10\" fill=\""
        << mark.style->color << "\">" << mark.style->label << "</text>\n";
  }

  for (std::size_t i = 0; i < 8; ++i) {
    const Point2& v = cuboid.vertices[i];
    svg << "  <circle cx=\"" << fmt(v.x) << "\" cy=\"" << fmt(v.y)
        << "\" r=\"2\" fill=\"#222\"/>\n";
    svg << "  <text x=\"" << fmt(v.x + 3.0) << "\" y=\"" << fmt(v.y - 3.0)
        << "\" font-size=\"8\" fill=\"#222\">" << i << "</text>\n";
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace vpgeo
