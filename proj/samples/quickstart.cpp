// Tour of the library: synthesize a scene, measure its projective
// consistency, corrupt it, refine it back, and glance at the metrics.
#include <iostream>

#include "vpgeo/vpgeo.hpp"

int main() {
  using namespace vpgeo;

  const Scene scene = random_scene(42);
  std::cout << "scene seed 42: bbox " << scene.bbox.w << "x" << scene.bbox.h
            << " px\n";

  const Cuboid2D gt_roi = to_roi_relative(scene.cuboid, scene.bbox);
  std::cout << "vp loss of the exact projection: " << vp_loss(gt_roi).value
            << "\n";

  const Cuboid2D noisy = perturb(gt_roi, 0.02, 7);
  std::cout << "vp loss after sigma=0.02 noise:  " << vp_loss(noisy).value
            << "\n";

  RefineConfig cfg;
  const RefineResult refined = refine_cuboid(noisy, cfg);
  std::cout << "vp loss after refinement:        "
            << vp_loss(refined.cuboid).value << "\n";

  const Cuboid2D refined_image = from_roi_relative(refined.cuboid, scene.bbox);
  std::cout << "pck vs ground truth:             "
            << pck(refined_image, scene.cuboid, scene.bbox) << "\n";
  std::cout << "cuboid quality (noisy -> refined): " << cuboid_quality(noisy)
            << " -> " << cuboid_quality(refined.cuboid) << "\n";

  // Perspective pooling of the cuboid's front face from a synthetic ramp map.
  FeatureMap ramp = FeatureMap::zeros(32, 32, 1);
  for (std::size_t y = 0; y < 32; ++y) {
    for (std::size_t x = 0; x < 32; ++x) {
      ramp.at(y, x, 0) = static_cast<double>(x + y);
    }
  }
  const Box2D face_box{4, 4, 16, 16};
  const FeatureMap pooled = roi_align(ramp, face_box, 7, 7);
  std::cout << "pooled 7x7 corner samples: " << pooled.at(0, 0, 0) << ", "
            << pooled.at(6, 6, 0) << "\n";

  // Compact bilinear fusion of two small vectors.
  const FeatureVector a{1.0, 2.0, 3.0, 4.0};
  const FeatureVector b{0.5, -1.0, 2.0};
  const SketchPlan plan_a = make_sketch_plan(a.size(), 16, 11);
  const SketchPlan plan_b = make_sketch_plan(b.size(), 16, 12);
  const FeatureVector pooled_ab = mcb_pool(a, b, plan_a, plan_b);
  std::cout << "mcb pooled dimension: " << pooled_ab.size() << "\n";
  return 0;
}
