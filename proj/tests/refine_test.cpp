#include <array>
#include <cmath>
#include <cstdint>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "vpgeo/refine.hpp"

using vpgeo::coordinates;
using vpgeo::Cuboid2D;
using vpgeo::FrameMismatch;
using vpgeo::perturb;
using vpgeo::refine_cuboid;
using vpgeo::RefineConfig;
using vpgeo::refinement_study;
using vpgeo::RefineResult;
using vpgeo::Scene;
using vpgeo::StudyReport;
using vpgeo::ValidationError;
using vpgeo::vp_loss;

TEST(RefineCuboid, ZeroVpWeightIsTheIdentityMap) {
  const Cuboid2D noisy = testsupport::random_roi_cuboid(11, 0.05);
  RefineConfig cfg;
  cfg.lambda_vp = 0.0;
  const RefineResult r = refine_cuboid(noisy, cfg);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(r.cuboid.vertices[i].x, noisy.vertices[i].x);
    EXPECT_EQ(r.cuboid.vertices[i].y, noisy.vertices[i].y);
  }
  EXPECT_FALSE(r.aborted);
  // The anchor term is zero at the anchor and stays there.
  for (double v : r.trace) EXPECT_EQ(v, 0.0);
}

TEST(RefineCuboid, PerfectInputStaysPut) {
  const Cuboid2D exact = testsupport::random_roi_cuboid(12);
  ASSERT_LE(vp_loss(exact).value, 1e-12);
  const RefineResult r = refine_cuboid(exact, RefineConfig{});
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_NEAR(r.cuboid.vertices[i].x, exact.vertices[i].x, 1e-6);
    EXPECT_NEAR(r.cuboid.vertices[i].y, exact.vertices[i].y, 1e-6);
  }
}

TEST(RefineCuboid, TraceHasStepsPlusOneEntries) {
  const Cuboid2D noisy = testsupport::random_roi_cuboid(13, 0.02);
  RefineConfig cfg;
  cfg.steps = 37;
  const RefineResult r = refine_cuboid(noisy, cfg);
  ASSERT_FALSE(r.aborted);
  EXPECT_EQ(r.trace.size(), 38u);
}

TEST(RefineCuboid, FirstTraceEntryIsTheInitialObjective) {
  const Cuboid2D noisy = testsupport::random_roi_cuboid(14, 0.02);
  RefineConfig cfg;
  const RefineResult r = refine_cuboid(noisy, cfg);
  // At the anchor the smooth-L1 term vanishes, so the initial objective is
  // lambda_vp times the raw vanishing-point loss.
  EXPECT_DOUBLE_EQ(r.trace.front(), cfg.lambda_vp * vp_loss(noisy).value);
}

TEST(RefineCuboid, ReducesVpLossOnNoisyInput) {
  int improved = 0;
  for (std::uint64_t seed = 20; seed < 40; ++seed) {
    const Cuboid2D noisy = testsupport::random_roi_cuboid(seed, 0.02);
    const RefineResult r = refine_cuboid(noisy, RefineConfig{});
    if (r.aborted) continue;
    if (vp_loss(r.cuboid).value < vp_loss(noisy).value) ++improved;
  }
  EXPECT_GE(improved, 18);
}

TEST(RefineCuboid, ObjectiveTraceMostlyNonIncreasing) {
  int monotone_steps = 0;
  int total_steps = 0;
  for (std::uint64_t seed = 40; seed < 55; ++seed) {
    const Cuboid2D noisy = testsupport::random_roi_cuboid(seed, 0.02);
    const RefineResult r = refine_cuboid(noisy, RefineConfig{});
    if (r.aborted) continue;
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
      ++total_steps;
      if (r.trace[i] <= r.trace[i - 1] + 1e-12) ++monotone_steps;
    }
  }
  ASSERT_GT(total_steps, 0);
  EXPECT_GE(static_cast<double>(monotone_steps),
            0.95 * static_cast<double>(total_steps));
}

TEST(RefineCuboid, StaysNearTheAnchorAtDefaultSettings) {
  for (std::uint64_t seed = 60; seed < 70; ++seed) {
    const double sigma = 0.02;
    const Cuboid2D noisy = testsupport::random_roi_cuboid(seed, sigma);
    const RefineResult r = refine_cuboid(noisy, RefineConfig{});
    if (r.aborted) continue;
    for (std::size_t i = 0; i < 8; ++i) {
      const double moved =
          vpgeo::distance(r.cuboid.vertices[i], noisy.vertices[i]);
      EXPECT_LE(moved, 10.0 * sigma) << "seed=" << seed << " i=" << i;
    }
  }
}

TEST(RefineCuboid, DeterministicGivenInput) {
  const Cuboid2D noisy = testsupport::random_roi_cuboid(15, 0.03);
  const RefineResult a = refine_cuboid(noisy, RefineConfig{});
  const RefineResult b = refine_cuboid(noisy, RefineConfig{});
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i], b.trace[i]);
  }
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(a.cuboid.vertices[i].x, b.cuboid.vertices[i].x);
    EXPECT_EQ(a.cuboid.vertices[i].y, b.cuboid.vertices[i].y);
  }
}

TEST(RefineCuboid, ImageFrameRejected) {
  const Scene s = testsupport::unit_cube_scene();
  EXPECT_THROW(refine_cuboid(s.cuboid, RefineConfig{}), FrameMismatch);
}

TEST(RefineCuboid, BadConfigRejected) {
  const Cuboid2D noisy = testsupport::random_roi_cuboid(16, 0.02);
  RefineConfig cfg;
  cfg.steps = 0;
  EXPECT_THROW(refine_cuboid(noisy, cfg), ValidationError);
  cfg = RefineConfig{};
  cfg.learning_rate = 0.0;
  EXPECT_THROW(refine_cuboid(noisy, cfg), ValidationError);
  cfg = RefineConfig{};
  cfg.lambda_vp = -0.1;
  EXPECT_THROW(refine_cuboid(noisy, cfg), ValidationError);
  cfg = RefineConfig{};
  cfg.sigma = -1.0;
  EXPECT_THROW(refine_cuboid(noisy, cfg), ValidationError);
}

TEST(RefineCuboid, CollapsedEdgeAbortsWithLastValidIterate) {
  // A cuboid with two coincident vertices makes the very first evaluation
  // throw, leaving an empty trace and the input unchanged.
  Cuboid2D degenerate = testsupport::random_roi_cuboid(17, 0.02);
  degenerate.vertices[3] = degenerate.vertices[0];
  const RefineResult r = refine_cuboid(degenerate, RefineConfig{});
  EXPECT_TRUE(r.aborted);
  EXPECT_TRUE(r.trace.empty());
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(r.cuboid.vertices[i].x, degenerate.vertices[i].x);
    EXPECT_EQ(r.cuboid.vertices[i].y, degenerate.vertices[i].y);
  }
}

TEST(RefinementStudy, ZeroNoiseMakesBothArmsPerfect) {
  RefineConfig cfg;
  cfg.sigma = 0.0;
  cfg.steps = 50;
  const StudyReport report = refinement_study(5, cfg, 2026);
  EXPECT_EQ(report.rows.size(), 5u);
  EXPECT_DOUBLE_EQ(report.vp.mean_pck, 1.0);
  EXPECT_DOUBLE_EQ(report.baseline.mean_pck, 1.0);
  for (const auto& row : report.rows) {
    EXPECT_FALSE(row.vp.aborted);
    EXPECT_FALSE(row.baseline.aborted);
    // The baseline arm never moves the normalized coordinates, but the
    // error is measured in image units after mapping back through the box,
    // and that round trip costs a few ulps.
    EXPECT_LE(row.baseline.vertex_error, 1e-12);
  }
}

TEST(RefinementStudy, DeterministicPerSeed) {
  RefineConfig cfg;
  cfg.steps = 20;
  const StudyReport a = refinement_study(4, cfg, 77);
  const StudyReport b = refinement_study(4, cfg, 77);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].scene_seed, b.rows[i].scene_seed);
    EXPECT_EQ(a.rows[i].vp.cq, b.rows[i].vp.cq);
    EXPECT_EQ(a.rows[i].vp.vertex_error, b.rows[i].vp.vertex_error);
    EXPECT_EQ(a.rows[i].baseline.cq, b.rows[i].baseline.cq);
  }
  EXPECT_EQ(a.vp.mean_cq, b.vp.mean_cq);
  EXPECT_EQ(a.seed, 77u);
}

TEST(RefinementStudy, VpArmImprovesQualityAtModestNoise) {
  RefineConfig cfg;
  cfg.steps = 100;
  const StudyReport report = refinement_study(20, cfg, 501);
  EXPECT_GT(report.vp.mean_cq, report.baseline.mean_cq);
}

TEST(RefinementStudy, StudyOverUsesScenesAsGiven) {
  std::vector<Scene> scenes;
  for (std::uint64_t seed = 300; seed < 303; ++seed) {
    scenes.push_back(vpgeo::random_scene(seed));
  }
  RefineConfig cfg;
  cfg.steps = 10;
  const StudyReport report =
      vpgeo::refinement_study_over(scenes, cfg, 999, 1000);
  ASSERT_EQ(report.rows.size(), 3u);
  EXPECT_EQ(report.rows[0].scene_seed, 300u);
  EXPECT_EQ(report.rows[2].scene_seed, 302u);
  EXPECT_EQ(report.seed, 1000u);
  EXPECT_THROW(vpgeo::refinement_study_over({}, cfg, 1, 2), ValidationError);
}

TEST(RefinementStudy, ConfigEchoedInReport) {
  RefineConfig cfg;
  cfg.steps = 5;
  cfg.learning_rate = 0.01;
  cfg.lambda_vp = 0.2;
  cfg.sigma = 0.01;
  const StudyReport report = refinement_study(2, cfg, 3);
  EXPECT_EQ(report.config.steps, 5u);
  EXPECT_DOUBLE_EQ(report.config.learning_rate, 0.01);
  EXPECT_DOUBLE_EQ(report.config.lambda_vp, 0.2);
  EXPECT_DOUBLE_EQ(report.config.sigma, 0.01);
}

TEST(RefinementStudy, ZeroScenesRejected) {
  EXPECT_THROW(refinement_study(0, RefineConfig{}, 1), ValidationError);
}
