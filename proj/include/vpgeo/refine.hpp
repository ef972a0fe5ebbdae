#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "vpgeo/cuboid.hpp"
#include "vpgeo/errors.hpp"
#include "vpgeo/metrics.hpp"
#include "vpgeo/rng.hpp"
#include "vpgeo/synth.hpp"
#include "vpgeo/vploss.hpp"

namespace vpgeo {

struct RefineConfig {
  std::size_t steps = 200;
  double learning_rate = 0.05;
  double lambda_vp = 0.1;
  double sigma = 0.02;
};

struct RefineResult {
  Cuboid2D cuboid;
  /// Objective values: the starting point first, then one entry per
  /// completed update (steps + 1 entries unless the run aborted).
  std::vector<double> trace;
  /// True when an iterate collapsed an edge and the run stopped early;
  /// `cuboid` then holds the last valid iterate.
  bool aborted = false;
};

namespace detail {

inline void check_refine_config(const RefineConfig& cfg) {
  if (cfg.steps < 1) throw ValidationError("steps must be at least 1");
  if (!(cfg.learning_rate > 0.0)) {
    throw ValidationError("learning rate must be positive");
  }
  if (cfg.lambda_vp < 0.0) {
    throw ValidationError("vanishing-point weight must be nonnegative");
  }
  if (cfg.sigma < 0.0) throw ValidationError("sigma must be nonnegative");
}

}  // namespace detail

/// Plain gradient descent on
///   f(x) = smooth_l1(x, anchor) + lambda_vp * vp_loss(x)
/// where the anchor is the (noisy) input itself. With lambda_vp = 0 the
/// anchor is already the minimizer, so the refiner is the identity map.
inline RefineResult refine_cuboid(const Cuboid2D& noisy,
                                  const RefineConfig& cfg) {
  if (noisy.frame != Frame::RoiRelative) {
    throw FrameMismatch("refinement expects RoI-relative coordinates");
  }
  detail::check_refine_config(cfg);

  const std::array<double, 16> anchor = coordinates(noisy);
  std::array<double, 16> x = anchor;

  auto evaluate = [&](const std::array<double, 16>& v,
                      std::array<double, 16>& grad) -> double {
    const LossValue anchor_term = smooth_l1(v, anchor);
    double value = anchor_term.value;
    grad = anchor_term.grad;
    if (cfg.lambda_vp != 0.0) {
      const Cuboid2D c = cuboid_from_coordinates(v, Frame::RoiRelative);
      const LossValue vp = vp_loss(c);
      value += cfg.lambda_vp * vp.value;
      for (std::size_t i = 0; i < 16; ++i) {
        grad[i] += cfg.lambda_vp * vp.grad[i];
      }
    }
    return value;
  };

  RefineResult result;
  std::array<double, 16> grad{};
  try {
    result.trace.push_back(evaluate(x, grad));
    for (std::size_t step = 0; step < cfg.steps; ++step) {
      std::array<double, 16> next = x;
      for (std::size_t i = 0; i < 16; ++i) {
        next[i] -= cfg.learning_rate * grad[i];
      }
      std::array<double, 16> next_grad{};
      const double value = evaluate(next, next_grad);
      x = next;
      grad = next_grad;
      result.trace.push_back(value);
    }
  } catch (const DegenerateLine&) {
    result.aborted = true;
  }
  result.cuboid = cuboid_from_coordinates(x, Frame::RoiRelative);
  return result;
}

/// Per-arm outcome for one scene of a study.
struct ArmOutcome {
  double pck = 0.0;
  double cq = 0.0;
  double vertex_error = 0.0;
  bool aborted = false;
};

struct StudyRow {
  std::uint64_t scene_seed = 0;
  ArmOutcome vp;
  ArmOutcome baseline;
};

struct ArmAggregate {
  double mean_pck = 0.0;
  double mean_cq = 0.0;
  double mean_vertex_error = 0.0;
};

struct StudyReport {
  RefineConfig config;
  std::uint64_t seed = 0;
  std::vector<StudyRow> rows;
  ArmAggregate vp;
  ArmAggregate baseline;
};

namespace detail {

inline ArmOutcome run_arm(const Cuboid2D& noisy_roi, const Scene& scene,
                          const Cuboid2D& gt_image, const RefineConfig& cfg) {
  const RefineResult r = refine_cuboid(noisy_roi, cfg);
  const Cuboid2D refined_image = from_roi_relative(r.cuboid, scene.bbox);
  ArmOutcome out;
  out.aborted = r.aborted;
  out.pck = pck(refined_image, gt_image, scene.bbox, PckConfig{0.1});
  out.cq = cuboid_quality(r.cuboid);
  double err = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    err += distance(refined_image.vertices[i], gt_image.vertices[i]);
  }
  out.vertex_error = err / 8.0;
  return out;
}

}  // namespace detail

/// Study over caller-provided scenes. Noise seed for scene i is drawn from
/// the noise master stream, so the scenes and the noise are decoupled.
inline StudyReport refinement_study_over(const std::vector<Scene>& scenes,
                                         const RefineConfig& cfg,
                                         std::uint64_t noise_master,
                                         std::uint64_t report_seed) {
  if (scenes.empty()) {
    throw ValidationError("study needs at least one scene");
  }
  detail::check_refine_config(cfg);

  StudyReport report;
  report.config = cfg;
  report.seed = report_seed;

  RefineConfig base_cfg = cfg;
  base_cfg.lambda_vp = 0.0;

  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const Scene& scene = scenes[i];
    const Cuboid2D& gt_image = scene.cuboid;
    const Cuboid2D gt_roi = to_roi_relative(gt_image, scene.bbox);
    const std::uint64_t noise_seed =
        stream_u64(noise_master, static_cast<std::uint64_t>(i));
    const Cuboid2D noisy_roi = perturb(gt_roi, cfg.sigma, noise_seed);

    StudyRow row;
    row.scene_seed = scene.seed;
    row.vp = detail::run_arm(noisy_roi, scene, gt_image, cfg);
    row.baseline = detail::run_arm(noisy_roi, scene, gt_image, base_cfg);
    report.rows.push_back(row);
  }

  const double n = static_cast<double>(report.rows.size());
  for (const StudyRow& row : report.rows) {
    report.vp.mean_pck += row.vp.pck / n;
    report.vp.mean_cq += row.vp.cq / n;
    report.vp.mean_vertex_error += row.vp.vertex_error / n;
    report.baseline.mean_pck += row.baseline.pck / n;
    report.baseline.mean_cq += row.baseline.cq / n;
    report.baseline.mean_vertex_error += row.baseline.vertex_error / n;
  }
  return report;
}

/// Self-contained study: scenes and noise both derive from one master seed.
inline StudyReport refinement_study(std::size_t n_scenes,
                                    const RefineConfig& cfg,
                                    std::uint64_t seed) {
  if (n_scenes < 1) {
    throw ValidationError("study needs at least one scene");
  }
  CounterRng rng(seed);
  std::vector<Scene> scenes;
  scenes.reserve(n_scenes);
  std::vector<std::uint64_t> scene_seeds(n_scenes);
  for (std::size_t i = 0; i < n_scenes; ++i) {
    scene_seeds[i] = rng.next_u64();
  }
  const std::uint64_t noise_master = rng.next_u64();
  for (std::size_t i = 0; i < n_scenes; ++i) {
    scenes.push_back(random_scene(scene_seeds[i]));
  }
  return refinement_study_over(scenes, cfg, noise_master, seed);
}

}  // namespace vpgeo
