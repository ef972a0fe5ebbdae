#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vpgeo/cuboid.hpp"
#include "vpgeo/errors.hpp"
#include "vpgeo/fusion.hpp"
#include "vpgeo/json_io.hpp"
#include "vpgeo/metrics.hpp"
#include "vpgeo/refine.hpp"
#include "vpgeo/render.hpp"
#include "vpgeo/rng.hpp"
#include "vpgeo/synth.hpp"
#include "vpgeo/vploss.hpp"
#include "vpgeo/warp.hpp"

namespace vpgeo {

/// Exit codes: 0 success, 1 bad input or flags, 2 file I/O failure,
/// 3 numeric or degenerate-geometry failure.
struct CommandOutcome {
  int exit_code = 0;
  std::string message;
};

namespace detail {

inline double parse_double(const std::string& text, const char* what) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ValidationError(std::string("cannot parse ") + what + ": \"" +
                          text + "\"");
  }
  return value;
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  parts.push_back(current);
  return parts;
}

inline std::array<Point2, 4> parse_quad(const std::string& text) {
  const std::vector<std::string> parts = split(text, ',');
  if (parts.size() != 8) {
    throw ValidationError(
        "--quad wants 8 comma-separated numbers: x0,y0,x1,y1,x2,y2,x3,y3");
  }
  std::array<Point2, 4> quad;
  for (std::size_t i = 0; i < 4; ++i) {
    quad[i].x = parse_double(parts[2 * i], "quad coordinate");
    quad[i].y = parse_double(parts[2 * i + 1], "quad coordinate");
  }
  return quad;
}

inline std::pair<std::size_t, std::size_t> parse_size(const std::string& text) {
  const std::vector<std::string> parts = split(text, 'x');
  if (parts.size() != 2) {
    throw ValidationError("--size wants HxW, e.g. 7x7");
  }
  const double h = parse_double(parts[0], "output height");
  const double w = parse_double(parts[1], "output width");
  if (h < 1.0 || w < 1.0 || h != std::floor(h) || w != std::floor(w)) {
    throw ValidationError("--size wants positive integers, e.g. 7x7");
  }
  return {static_cast<std::size_t>(h), static_cast<std::size_t>(w)};
}

inline Cuboid2D to_roi_frame(const CuboidRecord& rec) {
  return rec.cuboid.frame == Frame::RoiRelative
             ? rec.cuboid
             : to_roi_relative(rec.cuboid, rec.bbox);
}

inline Cuboid2D to_image_frame(const CuboidRecord& rec) {
  return rec.cuboid.frame == Frame::Image
             ? rec.cuboid
             : from_roi_relative(rec.cuboid, rec.bbox);
}

}  // namespace detail

/// Parses and executes one invocation. `args` excludes the program name;
/// normal output goes to `out`, diagnostics to `err`.
inline CommandOutcome run(const std::vector<std::string>& args,
                          std::ostream& out, std::ostream& err) {
  CLI::App app{"Projective cuboid toolkit: synthetic pinhole scenes, "
               "vanishing-point losses, perspective warping, compact "
               "bilinear pooling, and evaluation metrics."};
  app.name("vpgeo");
  app.require_subcommand(1);

  // synth ---------------------------------------------------------------
  auto* synth_cmd = app.add_subcommand(
      "synth", "Generate random pinhole scenes with exact projections");
  std::size_t synth_count = 0;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  synth_cmd->add_option("--count", synth_count, "number of scenes")
      ->required();
  synth_cmd->add_option("--seed", synth_seed, "master seed")->required();
  synth_cmd->add_option("--out", synth_out, "output scenes JSON path")
      ->required();
  synth_cmd->callback([&] {
    if (synth_count < 1) {
      throw ValidationError("--count must be at least 1");
    }
    CounterRng rng(synth_seed);
    std::vector<std::uint64_t> seeds(synth_count);
    for (auto& s : seeds) s = rng.next_u64();
    std::vector<Scene> scenes;
    scenes.reserve(synth_count);
    for (std::uint64_t s : seeds) scenes.push_back(random_scene(s));
    write_text_file(synth_out, dump_json(scenes_file_to_json(synth_seed, scenes)));
  });

  // loss ----------------------------------------------------------------
  auto* loss_cmd = app.add_subcommand(
      "loss", "Vanishing-point loss of a cuboid (per direction and total)");
  std::string loss_cuboid;
  loss_cmd->add_option("--cuboid", loss_cuboid, "cuboid JSON path")
      ->required();
  loss_cmd->callback([&] {
    const CuboidRecord rec =
        cuboid_record_from_json(load_json_file(loss_cuboid));
    const Cuboid2D roi = detail::to_roi_frame(rec);
    Json directions;
    directions["f"] = vp_loss_direction(roi, Direction::F).value;
    directions["r"] = vp_loss_direction(roi, Direction::R).value;
    directions["s"] = vp_loss_direction(roi, Direction::S).value;
    Json j;
    j["directions"] = directions;
    j["vp_loss"] = vp_loss(roi).value;
    out << dump_json(j);
  });

  // fit -----------------------------------------------------------------
  auto* fit_cmd = app.add_subcommand(
      "fit", "Two-arm gradient-descent refinement study over scenes");
  std::string fit_in, fit_report;
  RefineConfig fit_cfg;
  fit_cmd->add_option("--in", fit_in, "scenes JSON path")->required();
  fit_cmd->add_option("--sigma", fit_cfg.sigma, "perturbation std")
      ->capture_default_str();
  fit_cmd->add_option("--lambda-vp", fit_cfg.lambda_vp,
                      "weight on the vanishing-point term")
      ->capture_default_str();
  fit_cmd->add_option("--steps", fit_cfg.steps, "gradient steps")
      ->capture_default_str();
  fit_cmd->add_option("--report", fit_report, "output report JSON path")
      ->required();
  fit_cmd->callback([&] {
    std::uint64_t file_seed = 0;
    const std::vector<Scene> scenes =
        scenes_from_json(load_json_file(fit_in), &file_seed);
    // The noise stream continues where scene-seed derivation stopped, so a
    // study over a synth-produced file matches refinement_study(count, cfg,
    // seed) exactly.
    CounterRng rng(file_seed);
    for (std::size_t i = 0; i < scenes.size(); ++i) rng.next_u64();
    const std::uint64_t noise_master = rng.next_u64();
    const StudyReport report =
        refinement_study_over(scenes, fit_cfg, noise_master, file_seed);
    write_text_file(fit_report, dump_json(study_report_to_json(report)));
  });

  // warp ----------------------------------------------------------------
  auto* warp_cmd = app.add_subcommand(
      "warp", "Perspective-warp one quad of a feature map onto a grid");
  std::string warp_fmap, warp_quad, warp_out;
  std::string warp_size = "7x7";
  warp_cmd->add_option("--fmap", warp_fmap, "input FMAP path")->required();
  warp_cmd
      ->add_option("--quad", warp_quad,
                   "source quad x0,y0,x1,y1,x2,y2,x3,y3")
      ->required();
  warp_cmd->add_option("--size", warp_size, "output grid HxW")
      ->capture_default_str();
  warp_cmd->add_option("--out", warp_out, "output FMAP path")->required();
  warp_cmd->callback([&] {
    const FeatureMap f = load_fmap(warp_fmap);
    const std::array<Point2, 4> quad = detail::parse_quad(warp_quad);
    const auto [h, w] = detail::parse_size(warp_size);
    save_fmap(perspective_roi(f, quad, h, w), warp_out);
  });

  // sketch --------------------------------------------------------------
  auto* sketch_cmd = app.add_subcommand(
      "sketch", "Compact bilinear pooling of two JSON vectors");
  std::string sketch_x, sketch_y, sketch_out;
  std::size_t sketch_dim = 16000;
  std::uint64_t sketch_seed = 0;
  sketch_cmd->add_option("x", sketch_x, "first vector JSON path")->required();
  sketch_cmd->add_option("y", sketch_y, "second vector JSON path")
      ->required();
  sketch_cmd->add_option("--dim", sketch_dim, "pooled dimension")
      ->capture_default_str();
  sketch_cmd->add_option("--seed", sketch_seed, "plan seed")->required();
  sketch_cmd->add_option("--out", sketch_out,
                         "output JSON path (stdout when omitted)");
  sketch_cmd->callback([&] {
    const FeatureVector x =
        feature_vector_from_json(load_json_file(sketch_x));
    const FeatureVector y =
        feature_vector_from_json(load_json_file(sketch_y));
    const SketchPlan plan_x =
        make_sketch_plan(x.size(), sketch_dim, stream_u64(sketch_seed, 0));
    const SketchPlan plan_y =
        make_sketch_plan(y.size(), sketch_dim, stream_u64(sketch_seed, 1));
    const Json j = mcb_pool(x, y, plan_x, plan_y);
    if (sketch_out.empty()) {
      out << dump_json(j);
    } else {
      write_text_file(sketch_out, dump_json(j));
    }
  });

  // metrics ---------------------------------------------------------------
  auto* metrics_cmd = app.add_subcommand(
      "metrics", "PCK and cuboid quality of a prediction vs ground truth");
  std::string metrics_pred, metrics_gt;
  metrics_cmd->add_option("--pred", metrics_pred, "predicted cuboid JSON")
      ->required();
  metrics_cmd->add_option("--gt", metrics_gt, "ground-truth cuboid JSON")
      ->required();
  metrics_cmd->callback([&] {
    const CuboidRecord pred =
        cuboid_record_from_json(load_json_file(metrics_pred));
    const CuboidRecord gt = cuboid_record_from_json(load_json_file(metrics_gt));
    Json j;
    j["pck"] = pck(pred.cuboid, gt.cuboid, gt.bbox, PckConfig{});
    j["cq_pred"] = cuboid_quality(detail::to_roi_frame(pred));
    j["cq_gt"] = cuboid_quality(detail::to_roi_frame(gt));
    out << dump_json(j);
  });

  // verify ----------------------------------------------------------------
  auto* verify_cmd = app.add_subcommand(
      "verify", "Precision-recall sweep and AP over scored pairs");
  std::string verify_pairs;
  verify_cmd->add_option("--pairs", verify_pairs, "scored pairs JSON path")
      ->required();
  verify_cmd->callback([&] {
    const std::vector<ScoredPair> pairs =
        scored_pairs_from_json(load_json_file(verify_pairs));
    out << dump_json(pr_curve_to_json(pr_curve(pairs)));
  });

  // render ----------------------------------------------------------------
  auto* render_cmd = app.add_subcommand(
      "render", "SVG overlay with estimated vanishing points");
  std::string render_cuboid, render_background, render_out;
  render_cmd->add_option("--cuboid", render_cuboid, "cuboid JSON path")
      ->required();
  render_cmd->add_option("--background", render_background,
                         "optional PPM background");
  render_cmd->add_option("--out", render_out, "output SVG path")->required();
  render_cmd->callback([&] {
    const CuboidRecord rec =
        cuboid_record_from_json(load_json_file(render_cuboid));
    const Cuboid2D image_cuboid = detail::to_image_frame(rec);
    std::optional<RgbImage> background;
    if (!render_background.empty()) {
      background = load_ppm(render_background);
    }
    write_text_file(
        render_out,
        render_overlay_svg(image_cuboid,
                           background ? &*background : nullptr));
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    return {0, ""};
  } catch (const CLI::Success&) {
    out << app.help();
    return {0, ""};
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << app.help();
    return {1, e.what()};
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return {1, e.what()};
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return {2, e.what()};
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return {3, e.what()};
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return {1, e.what()};
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return {3, e.what()};
  }
}

}  // namespace vpgeo
