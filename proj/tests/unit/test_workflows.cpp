#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "posesym/error.hpp"
#include "posesym/io.hpp"
#include "posesym/pose_metric.hpp"
#include "posesym/workflows.hpp"

using namespace posesym;
using namespace posesym::testing;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = POSESYM_FIXTURE_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("posesym_wf_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double frac(const nlohmann::json& j, const std::string& key) {
  return j.at(key + "_num").get<double>() / j.at(key + "_den").get<double>();
}

}  // namespace

TEST_SUITE("workflows") {
  TEST_CASE("three-scene fixture reproduces the hand evaluation") {
    const auto obj = load_object(kFixtures / "brick" / "brick.json");
    const auto expected = io::read_json_file(kFixtures / "eval3" / "expected.json");
    workflows::EvaluateConfig cfg;
    cfg.per_scene_ap = true;
    const auto res = workflows::evaluate(obj, kFixtures / "eval3" / "gt", kFixtures / "eval3" / "pred", cfg);
    const auto& rep = res.report;
    for (const auto& scene : rep.at("scenes")) {
      const auto& exp = expected.at("scenes").at(scene.at("name").get<std::string>());
      CHECK(scene.at("tp").size() == exp.at("tp").get<std::size_t>());
      CHECK(scene.at("fp").size() == exp.at("fp").get<std::size_t>());
      CHECK(scene.at("fn").size() == exp.at("fn").get<std::size_t>());
      CHECK(scene.at("uninteresting_matches") == exp.at("uninteresting_matches"));
      CHECK(scene.at("precision").get<double>() == exp.at("precision").get<double>());
      CHECK(scene.at("recall").get<double>() == exp.at("recall").get<double>());
    }
    const auto& totals = rep.at("totals");
    CHECK(totals.at("tp") == expected.at("totals").at("tp"));
    CHECK(totals.at("fp") == expected.at("totals").at("fp"));
    CHECK(totals.at("fn") == expected.at("totals").at("fn"));
    const auto& curve = expected.at("curve");
    REQUIRE(res.curve.points.size() == curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
      CHECK(res.curve.points[i].threshold == curve[i][0].get<double>());
      CHECK(res.curve.points[i].precision == doctest::Approx(curve[i][1].get<double>() / curve[i][2].get<double>()).epsilon(1e-15));
      CHECK(res.curve.points[i].recall == doctest::Approx(curve[i][3].get<double>() / curve[i][4].get<double>()).epsilon(1e-15));
    }
    CHECK(rep.at("ap").get<double>() == doctest::Approx(frac(expected, "ap")).epsilon(1e-15));
    CHECK(rep.at("ap1").get<double>() == doctest::Approx(frac(expected, "ap1")).epsilon(1e-15));
    CHECK(rep.at("ap3").get<double>() == doctest::Approx(frac(expected, "ap3")).epsilon(1e-15));
    CHECK(rep.at("per_scene_ap").get<double>() == doctest::Approx(frac(expected, "per_scene_ap")).epsilon(1e-15));
    CHECK(rep.at("config").at("delta_o") == 0.5);
    CHECK(rep.at("format_version") == 1);

    const fs::path dir = scratch("eval3");
    workflows::write_evaluation(res, dir / "r.json", dir / "pr.csv");
    const std::string csv = slurp(dir / "pr.csv");
    CHECK(csv.rfind("threshold,precision,recall\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  }

  TEST_CASE("unpaired scene files are listed and abort") {
    const auto obj = load_object(kFixtures / "brick" / "brick.json");
    const fs::path dir = scratch("unpaired");
    fs::create_directories(dir / "pred");
    fs::copy_file(kFixtures / "eval3" / "pred" / "scene_a.jsonl", dir / "pred" / "scene_a.jsonl");
    fs::copy_file(kFixtures / "eval3" / "pred" / "scene_a.jsonl", dir / "pred" / "scene_z.jsonl");
    try {
      workflows::evaluate(obj, kFixtures / "eval3" / "gt", dir / "pred", {});
      FAIL("expected an error");
    } catch (const DataError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("predictions for scene_b") != std::string::npos);
      CHECK(msg.find("predictions for scene_c") != std::string::npos);
      CHECK(msg.find("ground truth for scene_z") != std::string::npos);
    }
  }

  TEST_CASE("empty prediction directory gives recall 0") {
    const auto obj = load_object(kFixtures / "brick" / "brick.json");
    const fs::path dir = scratch("emptypred");
    const auto res = workflows::evaluate(obj, kFixtures / "eval3" / "gt", dir, {});
    CHECK(res.recall.value() == 0.0);
    CHECK_FALSE(res.precision.has_value());
    CHECK(res.ap == 0.0);
    CHECK(res.report.contains("warnings"));
  }

  TEST_CASE("config validation") {
    const auto obj = load_object(kFixtures / "brick" / "brick.json");
    workflows::EvaluateConfig cfg;
    cfg.delta_fraction = 0.0;
    CHECK_THROWS_AS(workflows::evaluate(obj, kFixtures / "eval3" / "gt", kFixtures / "eval3" / "pred", cfg), UsageError);
    cfg.delta_fraction = 0.1;
    cfg.delta_o = 1.5;
    CHECK_THROWS_AS(workflows::evaluate(obj, kFixtures / "eval3" / "gt", kFixtures / "eval3" / "pred", cfg), UsageError);
  }

  TEST_CASE("generated scenes evaluated against themselves score perfectly") {
    const auto obj = load_object(kFixtures / "brick" / "brick.json");
    const fs::path dir = scratch("gen");
    workflows::GenerateConfig g;
    g.scene_count = 3;
    g.instances = 8;
    g.seed = 7;
    workflows::generate_scenes(obj, dir / "gt", g);
    fs::create_directories(dir / "pred");
    for (int k = 0; k < 3; ++k) {
      const std::string name = "scene_00" + std::to_string(k);
      const auto scene = io::read_scene(dir / "gt" / (name + ".json"));
      std::vector<ScoredPose> preds;
      double prev = -1;
      for (const auto& inst : scene.instances) {
        CHECK(inst.occlusion_rate >= prev);  // listed most visible first
        prev = inst.occlusion_rate;
        preds.push_back({inst.pose, 1.0, ""});
      }
      io::write_scored_poses(dir / "pred" / (name + ".jsonl"), preds);
      CHECK(fs::exists(dir / "gt" / (name + "_depth.pgm")));
      CHECK(fs::exists(dir / "gt" / (name + "_ids.pgm")));
    }
    const auto res = workflows::evaluate(obj, dir / "gt", dir / "pred", {});
    CHECK(res.ap == 1.0);
    CHECK(res.report.at("ap1") == 1.0);
    CHECK(res.report.at("ap3") == 1.0);
  }

  TEST_CASE("scene generation is byte-for-byte reproducible") {
    const auto obj = load_object(kFixtures / "brick" / "brick.json");
    const fs::path dir = scratch("repro");
    workflows::GenerateConfig g;
    g.scene_count = 2;
    g.instances = 5;
    g.seed = 7;
    workflows::generate_scenes(obj, dir / "a", g);
    workflows::generate_scenes(obj, dir / "b", g);
    for (const auto& e : fs::directory_iterator(dir / "a")) {
      CHECK(slurp(e.path()) == slurp(dir / "b" / e.path().filename()));
    }
    g.seed = 8;
    workflows::generate_scenes(obj, dir / "c", g);
    CHECK(slurp(dir / "a" / "scene_000.json") != slurp(dir / "c" / "scene_000.json"));
  }

  TEST_CASE("occlusion recomputation matches generation") {
    const auto obj = load_object(kFixtures / "brick" / "brick.json");
    const fs::path dir = scratch("occ");
    workflows::GenerateConfig g;
    g.instances = 10;
    g.seed = 3;
    workflows::generate_scenes(obj, dir, g);
    workflows::occlusion_file(obj, dir / "scene_000.json", dir / "again.json");
    const auto a = io::read_scene(dir / "scene_000.json");
    const auto b = io::read_scene(dir / "again.json");
    REQUIRE(a.instances.size() == b.instances.size());
    for (std::size_t i = 0; i < a.instances.size(); ++i) CHECK(a.instances[i].occlusion_rate == b.instances[i].occlusion_rate);
    CHECK(slurp(dir / "scene_000_ids.pgm") == slurp(dir / "again_ids.pgm"));
    io::SceneFile nocam;
    io::write_scene(dir / "nocam.json", nocam);
    CHECK_THROWS_AS(workflows::occlusion_file(obj, dir / "nocam.json", dir / "x.json"), DataError);
  }

  TEST_CASE("filter and mean shift files") {
    const auto obj = load_object(kFixtures / "brick" / "brick.json");
    const fs::path dir = scratch("files");
    SplitMix64 rng(4);
    const double h = obj.match_threshold();
    const auto planted = planted_votes(obj, rng, 3, 60, h / 3, 4 * h, 0.3);
    io::write_scored_poses(dir / "votes.jsonl", planted.votes);
    MeanShiftParams p;
    p.bandwidth = h;
    CHECK(workflows::meanshift_file(obj, dir / "votes.jsonl", dir / "modes.jsonl", p) == 3);
    const auto modes = io::read_scored_poses(dir / "modes.jsonl");
    REQUIRE(modes.size() == 3);
    CHECK(modes[0].score >= modes[1].score);
    const std::size_t kept = workflows::filter_file(obj, dir / "votes.jsonl", dir / "kept.jsonl", h, 20);
    CHECK(kept == io::read_scored_poses(dir / "kept.jsonl").size());
    CHECK(kept <= 20);
    CHECK(kept >= 3);
  }

  TEST_CASE("annotation: solved instances and rejected ones") {
    const fs::path dir = scratch("annot");
    SplitMix64 rng(5);
    io::CorrespondenceFile f;
    f.cameras = stereo_rig(rng, 0.6);
    std::vector<Eigen::Vector3d> mk;
    for (int i = 0; i < 8; ++i) mk.push_back(0.05 * Eigen::Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)));
    const Pose truth = random_pose(rng, 0.05);
    f.instances.push_back({"good", synthesize_correspondences(truth, mk, f.cameras), std::nullopt});
    // scrambled pixels cannot be explained by any pose
    auto bad = synthesize_correspondences(random_pose(rng, 0.05), mk, f.cameras);
    for (auto& v : bad.views) std::reverse(v.begin(), v.end());
    for (auto& v : bad.views)
      for (std::size_t i = 0; i < v.size(); ++i) v[i].pixel += Eigen::Vector2d(40.0 * (i % 3), -30.0 * (i % 2));
    f.instances.push_back({"bad", bad, std::nullopt});
    io::write_correspondences(dir / "c.json", f);
    const auto s = workflows::annotate_file(dir / "c.json", dir / "scene.json", PnpOptions{});
    CHECK(s.solved == 1);
    CHECK(s.failed == 1);
    const auto scene = io::read_scene(dir / "scene.json");
    REQUIRE(scene.instances.size() == 1);
    const auto obj = make_test_object(TestClass::trivial);
    CHECK(distance(scene.instances[0].pose, truth, obj) < 1e-9);
    CHECK(scene.instance_extras[0].at("id") == "good");
    CHECK(scene.instance_extras[0].at("rms_residual").get<double>() < 1e-8);
    CHECK(scene.extra.at("failed_instances")[0].at("id") == "bad");
  }
}
