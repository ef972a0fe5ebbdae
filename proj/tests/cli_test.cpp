#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "vpgeo/cli.hpp"

using vpgeo::CommandOutcome;
using vpgeo::CuboidRecord;
using vpgeo::Json;
using vpgeo::Scene;

namespace {

struct CliRun {
  CommandOutcome outcome;
  std::string out;
  std::string err;
};

CliRun run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const CommandOutcome outcome = vpgeo::run(args, out, err);
  return {outcome, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return ::testing::TempDir() + "cli_" + name;
}

void write_sample_cuboid(const std::string& path) {
  const Scene s = testsupport::unit_cube_scene();
  vpgeo::write_text_file(
      path, vpgeo::dump_json(
                vpgeo::cuboid_record_to_json(CuboidRecord{s.cuboid, s.bbox})));
}

}  // namespace

TEST(CliLoss, PerfectCuboidReportsVanishingLoss) {
  const std::string path = temp_path("perfect.json");
  write_sample_cuboid(path);
  const CliRun r = run_cli({"loss", "--cuboid", path});
  EXPECT_EQ(r.outcome.exit_code, 0);
  EXPECT_EQ(r.err, "");
  const Json j = vpgeo::parse_json(r.out);
  EXPECT_LE(j.at("vp_loss").get<double>(), 1e-12);
  EXPECT_LE(j.at("directions").at("f").get<double>(), 1e-12);
  EXPECT_LE(j.at("directions").at("r").get<double>(), 1e-12);
  EXPECT_LE(j.at("directions").at("s").get<double>(), 1e-12);
  std::remove(path.c_str());
}

TEST(CliLoss, DirectionTermsSumToTotal) {
  const std::string path = temp_path("noisy.json");
  const Scene s = vpgeo::random_scene(88);
  const vpgeo::Cuboid2D noisy = vpgeo::perturb(s.cuboid, 1.5, 9);
  vpgeo::write_text_file(
      path, vpgeo::dump_json(
                vpgeo::cuboid_record_to_json(CuboidRecord{noisy, s.bbox})));
  const CliRun r = run_cli({"loss", "--cuboid", path});
  ASSERT_EQ(r.outcome.exit_code, 0);
  const Json j = vpgeo::parse_json(r.out);
  const double total = j.at("vp_loss").get<double>();
  const double sum = j.at("directions").at("f").get<double>() +
                     j.at("directions").at("r").get<double>() +
                     j.at("directions").at("s").get<double>();
  EXPECT_DOUBLE_EQ(total, sum);
  EXPECT_GT(total, 0.0);
  std::remove(path.c_str());
}

TEST(CliSynth, DeterministicAcrossRuns) {
  const std::string a = temp_path("scenes_a.json");
  const std::string b = temp_path("scenes_b.json");
  const CliRun ra =
      run_cli({"synth", "--count", "4", "--seed", "2024", "--out", a});
  const CliRun rb =
      run_cli({"synth", "--count", "4", "--seed", "2024", "--out", b});
  ASSERT_EQ(ra.outcome.exit_code, 0) << ra.err;
  ASSERT_EQ(rb.outcome.exit_code, 0) << rb.err;
  EXPECT_EQ(vpgeo::read_text_file(a), vpgeo::read_text_file(b));

  const Json j = vpgeo::load_json_file(a);
  EXPECT_EQ(j.at("count").get<std::size_t>(), 4u);
  EXPECT_EQ(j.at("seed").get<std::uint64_t>(), 2024u);
  EXPECT_EQ(j.at("scenes").size(), 4u);
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST(CliSynth, GeneratedScenesHaveVanishingLoss) {
  const std::string scenes_path = temp_path("scenes_loss.json");
  const CliRun rs =
      run_cli({"synth", "--count", "3", "--seed", "7", "--out", scenes_path});
  ASSERT_EQ(rs.outcome.exit_code, 0) << rs.err;

  const std::vector<Scene> scenes =
      vpgeo::scenes_from_json(vpgeo::load_json_file(scenes_path));
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const std::string cuboid_path =
        temp_path("cuboid_" + std::to_string(i) + ".json");
    vpgeo::write_text_file(
        cuboid_path,
        vpgeo::dump_json(vpgeo::cuboid_record_to_json(
            CuboidRecord{scenes[i].cuboid, scenes[i].bbox})));
    const CliRun rl = run_cli({"loss", "--cuboid", cuboid_path});
    ASSERT_EQ(rl.outcome.exit_code, 0);
    EXPECT_LE(vpgeo::parse_json(rl.out).at("vp_loss").get<double>(), 1e-12);
    std::remove(cuboid_path.c_str());
  }
  std::remove(scenes_path.c_str());
}

TEST(CliFit, MatchesTheLibraryStudyByteForByte) {
  const std::string scenes_path = temp_path("fit_scenes.json");
  const std::string report_path = temp_path("fit_report.json");
  const CliRun rs =
      run_cli({"synth", "--count", "3", "--seed", "90", "--out", scenes_path});
  ASSERT_EQ(rs.outcome.exit_code, 0) << rs.err;
  const CliRun rf = run_cli({"fit", "--in", scenes_path, "--steps", "50",
                             "--report", report_path});
  ASSERT_EQ(rf.outcome.exit_code, 0) << rf.err;

  vpgeo::RefineConfig cfg;
  cfg.steps = 50;
  const vpgeo::StudyReport expected = vpgeo::refinement_study(3, cfg, 90);
  EXPECT_EQ(vpgeo::read_text_file(report_path),
            vpgeo::dump_json(vpgeo::study_report_to_json(expected)));
  std::remove(scenes_path.c_str());
  std::remove(report_path.c_str());
}

TEST(CliFit, ReportIsDeterministic) {
  const std::string scenes_path = temp_path("fit_det_scenes.json");
  const std::string ra = temp_path("fit_det_a.json");
  const std::string rb = temp_path("fit_det_b.json");
  ASSERT_EQ(run_cli({"synth", "--count", "2", "--seed", "5", "--out",
                     scenes_path})
                .outcome.exit_code,
            0);
  ASSERT_EQ(run_cli({"fit", "--in", scenes_path, "--steps", "30", "--report",
                     ra})
                .outcome.exit_code,
            0);
  ASSERT_EQ(run_cli({"fit", "--in", scenes_path, "--steps", "30", "--report",
                     rb})
                .outcome.exit_code,
            0);
  EXPECT_EQ(vpgeo::read_text_file(ra), vpgeo::read_text_file(rb));
  std::remove(scenes_path.c_str());
  std::remove(ra.c_str());
  std::remove(rb.c_str());
}

TEST(CliWarp, ConstantMapStaysConstant) {
  const std::string in_path = temp_path("const.fmap");
  const std::string out_path = temp_path("const_out.fmap");
  vpgeo::FeatureMap f = vpgeo::FeatureMap::zeros(4, 4, 1);
  for (auto& v : f.data) v = 2.5;
  vpgeo::save_fmap(f, in_path);
  const CliRun r = run_cli({"warp", "--fmap", in_path, "--quad",
                            "0,0,4,0,4,4,0,4", "--size", "3x3", "--out",
                            out_path});
  ASSERT_EQ(r.outcome.exit_code, 0) << r.err;
  const vpgeo::FeatureMap warped = vpgeo::load_fmap(out_path);
  EXPECT_EQ(warped.height, 3u);
  EXPECT_EQ(warped.width, 3u);
  for (double v : warped.data) EXPECT_NEAR(v, 2.5, 1e-6);
  std::remove(in_path.c_str());
  std::remove(out_path.c_str());
}

TEST(CliWarp, DefaultSizeIsSevenBySeven) {
  const std::string in_path = temp_path("seven.fmap");
  const std::string out_path = temp_path("seven_out.fmap");
  vpgeo::save_fmap(vpgeo::FeatureMap::zeros(8, 8, 2), in_path);
  const CliRun r = run_cli({"warp", "--fmap", in_path, "--quad",
                            "1,1,6,1,6,6,1,6", "--out", out_path});
  ASSERT_EQ(r.outcome.exit_code, 0) << r.err;
  const vpgeo::FeatureMap warped = vpgeo::load_fmap(out_path);
  EXPECT_EQ(warped.height, 7u);
  EXPECT_EQ(warped.width, 7u);
  EXPECT_EQ(warped.channels, 2u);
  std::remove(in_path.c_str());
  std::remove(out_path.c_str());
}

TEST(CliWarp, CollinearQuadFailsWithNumericExit) {
  const std::string in_path = temp_path("collinear.fmap");
  vpgeo::save_fmap(vpgeo::FeatureMap::zeros(4, 4, 1), in_path);
  const CliRun r = run_cli({"warp", "--fmap", in_path, "--quad",
                            "0,0,1,1,2,2,3,0", "--out",
                            temp_path("never.fmap")});
  EXPECT_EQ(r.outcome.exit_code, 3);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  std::remove(in_path.c_str());
}

TEST(CliWarp, BadSizeStringRejected) {
  const std::string in_path = temp_path("badsize.fmap");
  vpgeo::save_fmap(vpgeo::FeatureMap::zeros(4, 4, 1), in_path);
  const CliRun r = run_cli({"warp", "--fmap", in_path, "--quad",
                            "0,0,4,0,4,4,0,4", "--size", "7x", "--out",
                            temp_path("never2.fmap")});
  EXPECT_EQ(r.outcome.exit_code, 1);
  std::remove(in_path.c_str());
}

TEST(CliSketch, MatchesTheLibraryPooling) {
  const std::string x_path = temp_path("vec_x.json");
  const std::string y_path = temp_path("vec_y.json");
  const std::string out_path = temp_path("pooled.json");
  vpgeo::write_text_file(x_path, "[1.0, 2.0, 3.0]\n");
  vpgeo::write_text_file(y_path, "[0.5, -1.0]\n");
  const CliRun r = run_cli({"sketch", x_path, y_path, "--dim", "8", "--seed",
                            "3", "--out", out_path});
  ASSERT_EQ(r.outcome.exit_code, 0) << r.err;

  const vpgeo::FeatureVector x = {1.0, 2.0, 3.0};
  const vpgeo::FeatureVector y = {0.5, -1.0};
  const auto plan_x = vpgeo::make_sketch_plan(3, 8, vpgeo::stream_u64(3, 0));
  const auto plan_y = vpgeo::make_sketch_plan(2, 8, vpgeo::stream_u64(3, 1));
  const vpgeo::FeatureVector expected = vpgeo::mcb_pool(x, y, plan_x, plan_y);

  const vpgeo::FeatureVector got =
      vpgeo::feature_vector_from_json(vpgeo::load_json_file(out_path));
  ASSERT_EQ(got.size(), expected.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i], expected[i]);
  }
  std::remove(x_path.c_str());
  std::remove(y_path.c_str());
  std::remove(out_path.c_str());
}

TEST(CliSketch, WritesToStdoutWithoutOutFlag) {
  const std::string x_path = temp_path("vec_x2.json");
  const std::string y_path = temp_path("vec_y2.json");
  vpgeo::write_text_file(x_path, "[1.0]\n");
  vpgeo::write_text_file(y_path, "[2.0]\n");
  const CliRun r =
      run_cli({"sketch", x_path, y_path, "--dim", "4", "--seed", "1"});
  ASSERT_EQ(r.outcome.exit_code, 0) << r.err;
  const Json j = vpgeo::parse_json(r.out);
  EXPECT_TRUE(j.is_array());
  EXPECT_EQ(j.size(), 4u);
  std::remove(x_path.c_str());
  std::remove(y_path.c_str());
}

TEST(CliMetrics, PerfectPredictionScoresCeiling) {
  const std::string pred = temp_path("pred.json");
  const std::string gt = temp_path("gt.json");
  write_sample_cuboid(pred);
  write_sample_cuboid(gt);
  const CliRun r = run_cli({"metrics", "--pred", pred, "--gt", gt});
  ASSERT_EQ(r.outcome.exit_code, 0) << r.err;
  const Json j = vpgeo::parse_json(r.out);
  EXPECT_DOUBLE_EQ(j.at("pck").get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(j.at("cq_pred").get<double>(), 27.631021115928547);
  EXPECT_DOUBLE_EQ(j.at("cq_gt").get<double>(), 27.631021115928547);
  std::remove(pred.c_str());
  std::remove(gt.c_str());
}

TEST(CliMetrics, NoisyPredictionScoresLower) {
  const std::string pred = temp_path("pred_noisy.json");
  const std::string gt = temp_path("gt_clean.json");
  const Scene s = testsupport::unit_cube_scene();
  const vpgeo::Cuboid2D noisy = vpgeo::perturb(s.cuboid, 5.0, 31);
  vpgeo::write_text_file(
      pred, vpgeo::dump_json(
                vpgeo::cuboid_record_to_json(CuboidRecord{noisy, s.bbox})));
  write_sample_cuboid(gt);
  const CliRun r = run_cli({"metrics", "--pred", pred, "--gt", gt});
  ASSERT_EQ(r.outcome.exit_code, 0) << r.err;
  const Json j = vpgeo::parse_json(r.out);
  EXPECT_LT(j.at("pck").get<double>(), 1.0);
  EXPECT_LT(j.at("cq_pred").get<double>(), 27.631021115928547);
  std::remove(pred.c_str());
  std::remove(gt.c_str());
}

TEST(CliVerify, ThreePairFixture) {
  const std::string pairs = temp_path("pairs.json");
  vpgeo::write_text_file(pairs,
                         "[{\"score\": 0.9, \"same_category\": true},"
                         " {\"score\": 0.8, \"same_category\": false},"
                         " {\"score\": 0.7, \"same_category\": true}]\n");
  const CliRun r = run_cli({"verify", "--pairs", pairs});
  ASSERT_EQ(r.outcome.exit_code, 0) << r.err;
  const Json j = vpgeo::parse_json(r.out);
  EXPECT_DOUBLE_EQ(j.at("ap").get<double>(), 5.0 / 6.0);
  EXPECT_EQ(j.at("points").size(), 3u);
  std::remove(pairs.c_str());
}

TEST(CliVerify, NoPositivesFailsWithInputExit) {
  const std::string pairs = temp_path("pairs_neg.json");
  vpgeo::write_text_file(pairs,
                         "[{\"score\": 0.9, \"same_category\": false}]\n");
  const CliRun r = run_cli({"verify", "--pairs", pairs});
  EXPECT_EQ(r.outcome.exit_code, 1);
  std::remove(pairs.c_str());
}

TEST(CliRender, ProducesAnSvgDocument) {
  const std::string cuboid = temp_path("render_cuboid.json");
  const std::string svg = temp_path("overlay.svg");
  write_sample_cuboid(cuboid);
  const CliRun r = run_cli({"render", "--cuboid", cuboid, "--out", svg});
  ASSERT_EQ(r.outcome.exit_code, 0) << r.err;
  const std::string text = vpgeo::read_text_file(svg);
  EXPECT_NE(text.find("<svg"), std::string::npos);
  EXPECT_NE(text.find("</svg>"), std::string::npos);
  EXPECT_NE(text.find("<line"), std::string::npos);
  EXPECT_NE(text.find("<circle"), std::string::npos);
  std::remove(cuboid.c_str());
  std::remove(svg.c_str());
}

TEST(CliRender, AcceptsPpmBackground) {
  const std::string cuboid = temp_path("render_bg_cuboid.json");
  const std::string ppm = temp_path("bg.ppm");
  const std::string svg = temp_path("overlay_bg.svg");
  write_sample_cuboid(cuboid);
  std::string ppm_bytes = "P6\n4 4\n255\n";
  for (int i = 0; i < 4 * 4 * 3; ++i) ppm_bytes.push_back(static_cast<char>(i));
  vpgeo::write_text_file(ppm, ppm_bytes);
  const CliRun r = run_cli(
      {"render", "--cuboid", cuboid, "--background", ppm, "--out", svg});
  ASSERT_EQ(r.outcome.exit_code, 0) << r.err;
  const std::string text = vpgeo::read_text_file(svg);
  EXPECT_NE(text.find("image"), std::string::npos);
  EXPECT_NE(text.find("base64"), std::string::npos);
  std::remove(cuboid.c_str());
  std::remove(ppm.c_str());
  std::remove(svg.c_str());
}

TEST(CliErrors, MissingSubcommandShowsHelp) {
  const CliRun r = run_cli({});
  EXPECT_EQ(r.outcome.exit_code, 1);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST(CliErrors, HelpExitsCleanly) {
  const CliRun r = run_cli({"--help"});
  EXPECT_EQ(r.outcome.exit_code, 0);
  EXPECT_NE(r.out.find("synth"), std::string::npos);
  EXPECT_NE(r.out.find("loss"), std::string::npos);
}

TEST(CliErrors, UnknownSubcommandRejected) {
  const CliRun r = run_cli({"frobnicate"});
  EXPECT_EQ(r.outcome.exit_code, 1);
}

TEST(CliErrors, MissingInputFileGivesIoExit) {
  const CliRun r =
      run_cli({"loss", "--cuboid", "/nonexistent/nowhere.json"});
  EXPECT_EQ(r.outcome.exit_code, 2);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST(CliErrors, MalformedJsonGivesInputExit) {
  const std::string path = temp_path("broken.json");
  vpgeo::write_text_file(path, "{not json");
  const CliRun r = run_cli({"loss", "--cuboid", path});
  EXPECT_EQ(r.outcome.exit_code, 1);
  std::remove(path.c_str());
}

TEST(CliErrors, DegenerateCuboidGivesNumericExit) {
  const std::string path = temp_path("degenerate.json");
  const Scene s = testsupport::unit_cube_scene();
  vpgeo::Cuboid2D broken = s.cuboid;
  broken.vertices[3] = broken.vertices[0];
  vpgeo::write_text_file(
      path, vpgeo::dump_json(
                vpgeo::cuboid_record_to_json(CuboidRecord{broken, s.bbox})));
  const CliRun r = run_cli({"loss", "--cuboid", path});
  EXPECT_EQ(r.outcome.exit_code, 3);
  std::remove(path.c_str());
}

TEST(CliErrors, SynthZeroCountRejected) {
  const CliRun r = run_cli(
      {"synth", "--count", "0", "--seed", "1", "--out", temp_path("x.json")});
  EXPECT_EQ(r.outcome.exit_code, 1);
}
