#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "posesym/error.hpp"
#include "posesym/pose_metric.hpp"
#include "posesym/pose_space.hpp"
#include "posesym/symmetry.hpp"

using namespace posesym;
using namespace posesym::testing;
using Eigen::Vector3d;

namespace {

std::vector<ScoredPose> scored(const std::vector<Pose>& poses, std::vector<double> scores = {}) {
  std::vector<ScoredPose> out;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    out.push_back({poses[i], scores.empty() ? 1.0 : scores[i], std::to_string(i)});
  }
  return out;
}

}  // namespace

TEST_SUITE("pose_space") {
  TEST_CASE("average of a repeated pose is that pose") {
    SplitMix64 rng(1);
    for (auto c : all_test_classes()) {
      const auto obj = make_test_object(c);
      const Pose p = random_pose(rng, 0.1);
      const auto avg = average(scored({p, p}), obj);
      CHECK_MESSAGE(distance(avg, p, obj) < 1e-12, name(c));
    }
  }

  TEST_CASE("average of two translations is the midpoint") {
    const auto obj = make_test_object(TestClass::trivial);
    Pose a, b;
    a.translation = {0.1, 0.2, 0.3};
    b.translation = {-0.1, 0.0, 0.5};
    const auto avg = average(scored({a, b}), obj);
    CHECK((avg.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    CHECK((avg.translation - Vector3d(0.0, 0.1, 0.4)).norm() < 1e-15);
  }

  TEST_CASE("symmetric copies average to the same class") {
    SplitMix64 rng(2);
    for (auto c : all_test_classes()) {
      const auto obj = make_test_object(c);
      const Pose p = random_pose(rng, 0.1);
      std::vector<Pose> copies;
      for (int k = 0; k < 5; ++k) copies.push_back(p.with_symmetry(random_symmetry(rng, obj)));
      CHECK_MESSAGE(distance(average(scored(copies), obj), p, obj) < 1e-9, name(c));
    }
  }

  TEST_CASE("antipodal axes under rotoreflection: mean matches a grid minimizer") {
    SplitMix64 rng(3);
    const auto obj = make_test_object(TestClass::revolution_flip);
    const double lam = obj.lambda_scalar();
    // axes scattered around +z, some given as their flipped (-z) equivalents
    std::vector<Pose> poses;
    std::vector<double> w;
    for (int k = 0; k < 6; ++k) {
      Pose p;
      p.rotation = so3_exp(Vector3d(0.3 * rng.normal(), 0.3 * rng.normal(), rng.uniform(0, 6)));
      if (k % 2) p.rotation = p.rotation * rotation_x(std::numbers::pi);
      p.translation = Vector3d(rng.normal(), rng.normal(), rng.normal()) * 0.01;
      poses.push_back(p);
      w.push_back(rng.uniform(0.5, 1.0));
    }
    const Pose avg = average(scored(poses, w), obj);
    auto objective = [&](const Pose& q) {
      double s = 0;
      for (std::size_t i = 0; i < poses.size(); ++i) s += w[i] * std::pow(distance(q, poses[i], obj), 2);
      return s;
    };
    // brute-force search over axis directions on a fine spherical grid; the
    // translation optimum is the weighted mean and shared by both
    Pose best = avg;
    double best_val = std::numeric_limits<double>::infinity();
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / n;
      const double r = std::sqrt(1 - z * z);
      const double phi = i * std::numbers::pi * (3.0 - std::sqrt(5.0));
      Pose q;
      q.rotation = rotation_aligning_z(Vector3d(r * std::cos(phi), r * std::sin(phi), z));
      q.translation = avg.translation;
      const double v = objective(q);
      if (v < best_val) {
        best_val = v;
        best = q;
      }
    }
    CHECK(objective(avg) <= best_val + 1e-12);
    CHECK(distance(avg, best, obj) < 0.01 * lam);
  }

  TEST_CASE("average is left-equivariant") {
    SplitMix64 rng(4);
    for (auto c : all_test_classes()) {
      const auto obj = make_test_object(c);
      const Pose center = random_pose(rng, 0.1);
      std::vector<Pose> poses;
      std::vector<double> w;
      for (int k = 0; k < 8; ++k) {
        Pose p = center;
        p.rotation = so3_exp(0.2 * Vector3d(rng.normal(), rng.normal(), rng.normal())) * p.rotation;
        p.translation += 0.005 * Vector3d(rng.normal(), rng.normal(), rng.normal());
        poses.push_back(p.with_symmetry(random_symmetry(rng, obj)));
        w.push_back(rng.uniform(0.1, 1.0));
      }
      const Pose t = random_pose(rng, 1.0);
      std::vector<Pose> moved;
      for (const auto& p : poses) moved.push_back(t.compose(p));
      const Pose a = t.compose(average(scored(poses, w), obj));
      const Pose b = average(scored(moved, w), obj);
      CHECK_MESSAGE(distance(a, b, obj) < 1e-6 * obj.diameter(), name(c));
    }
  }

  TEST_CASE("average errors") {
    const auto obj = make_test_object(TestClass::trivial);
    CHECK_THROWS_AS(average(std::vector<ScoredPose>{}, obj), UsageError);
    const Pose p = Pose::identity();
    CHECK_THROWS_AS(average(scored({p, p}, {0.0, 0.0}), obj), UsageError);
    // half turn apart with equal weight: the mean matrix has rank one
    CHECK_THROWS_AS(average(scored({p, p.with_symmetry(rotation_z(std::numbers::pi))}), obj),
                    NumericalError);
  }

  TEST_CASE("mean shift: one vote, seeded there") {
    SplitMix64 rng(5);
    const auto obj = make_test_object(TestClass::brick);
    const Pose p = random_pose(rng, 0.1);
    MeanShiftParams params;
    params.bandwidth = obj.match_threshold();
    const auto modes = mean_shift(scored({p}), obj, params);
    REQUIRE(modes.size() == 1);
    CHECK(distance(modes[0].pose, p, obj) < 1e-12);
    CHECK(modes[0].iterations == 1);
    CHECK(modes[0].density == doctest::Approx(1.0));
  }

  TEST_CASE("mean shift: symmetric duplicates form one mode") {
    SplitMix64 rng(6);
    for (auto c : {TestClass::brick, TestClass::cyclic6, TestClass::icosahedral,
                   TestClass::revolution_flip}) {
      const auto obj = make_test_object(c);
      const Pose p = random_pose(rng, 0.1);
      const std::vector<Pose> votes{p, p.with_symmetry(random_symmetry(rng, obj))};
      MeanShiftParams params;
      params.bandwidth = obj.match_threshold();
      const auto modes = mean_shift(scored(votes), obj, params);
      REQUIRE_MESSAGE(modes.size() == 1, name(c));
      CHECK(modes[0].density == doctest::Approx(2.0));
    }
  }

  TEST_CASE("mean shift: planted clusters, monotone density") {
    SplitMix64 rng(7);
    for (auto c : {TestClass::brick, TestClass::revolution, TestClass::spherical}) {
      const auto obj = make_test_object(c);
      const double h = obj.match_threshold();
      for (int trial = 0; trial < 5; ++trial) {
        const auto planted = planted_votes(obj, rng, 3, 100, h / 3, 4 * h, 0.3);
        MeanShiftParams params;
        params.bandwidth = h;
        const auto modes = mean_shift(planted.votes, obj, params);
        CHECK_MESSAGE(modes.size() == 3, name(c));
        for (const auto& center : planted.centers) {
          double best = 1e9;
          for (const auto& m : modes) best = std::min(best, distance(m.pose, center, obj));
          CHECK(best < h / 2);
        }
        for (const auto& m : modes) {
          for (std::size_t i = 1; i < m.density_trace.size(); ++i) {
            CHECK(m.density_trace[i] >= m.density_trace[i - 1] * (1 - 1e-12));
          }
        }
      }
    }
  }

  TEST_CASE("mean shift parameter checks and threads") {
    SplitMix64 rng(8);
    const auto obj = make_test_object(TestClass::brick);
    const double h = obj.match_threshold();
    const auto planted = planted_votes(obj, rng, 3, 50, h / 3, 4 * h, 0.3);
    MeanShiftParams params;
    params.bandwidth = 0;
    CHECK_THROWS_AS(mean_shift(planted.votes, obj, params), UsageError);
    params.bandwidth = h;
    const auto single = mean_shift(planted.votes, obj, params);
    params.threads = 3;
    const auto multi = mean_shift(planted.votes, obj, params);
    REQUIRE(single.size() == multi.size());
    for (std::size_t i = 0; i < single.size(); ++i) {
      CHECK(single[i].density == multi[i].density);
      CHECK(single[i].pose.translation == multi[i].pose.translation);
    }
    params.kernel = Kernel::gaussian;
    CHECK(mean_shift(planted.votes, obj, params).size() == 3);
  }

  TEST_CASE("filter: duplicate pair keeps the better one") {
    SplitMix64 rng(9);
    const auto obj = make_test_object(TestClass::trivial);
    const Pose p = random_pose(rng, 0.1);
    const auto kept = filter_duplicates(scored({p, p}, {0.3, 0.7}), obj, obj.match_threshold(), 20);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].score == 0.7);
  }

  TEST_CASE("filter: well separated input keeps top by score, stable") {
    const auto obj = make_test_object(TestClass::trivial);
    std::vector<Pose> poses;
    for (int i = 0; i < 30; ++i) {
      Pose p;
      p.translation = {double(i), 0, 0};
      poses.push_back(p);
    }
    std::vector<double> s(30, 0.5);
    s[29] = 0.9;
    const auto kept = filter_duplicates(scored(poses, s), obj, 0.1, 20);
    REQUIRE(kept.size() == 20);
    CHECK(kept[0].id == "29");
    for (int i = 1; i < 20; ++i) CHECK(kept[i].id == std::to_string(i - 1));
  }

  TEST_CASE("filter: brick half turn is a duplicate only with symmetry") {
    SplitMix64 rng(10);
    const auto brick = make_test_object(TestClass::brick);
    const auto plain = ObjectModel::create(brick.mesh(), ProperSymmetryGroup::trivial());
    const Pose p = random_pose(rng, 0.1);
    const auto hyps = scored({p, p.with_symmetry(rotation_z(std::numbers::pi))}, {0.9, 0.8});
    CHECK(filter_duplicates(hyps, brick, brick.match_threshold(), 20).size() == 1);
    CHECK(filter_duplicates(hyps, plain, plain.match_threshold(), 20).size() == 2);
  }

  TEST_CASE("filter output properties") {
    SplitMix64 rng(11);
    const auto obj = make_test_object(TestClass::cyclic6);
    std::vector<Pose> poses;
    std::vector<double> s;
    for (int i = 0; i < 200; ++i) {
      poses.push_back(random_pose(rng, 0.03));
      s.push_back(std::floor(rng.uniform() * 10) / 10);
    }
    const double r = obj.match_threshold();
    const auto kept = filter_duplicates(scored(poses, s), obj, r, 15);
    CHECK(kept.size() <= 15);
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (i > 0) CHECK(kept[i].score <= kept[i - 1].score);
      for (std::size_t j = 0; j < i; ++j) CHECK(distance(kept[i].pose, kept[j].pose, obj) > r);
    }
    CHECK_THROWS_AS(filter_duplicates(scored(poses, s), obj, -1.0, 5), UsageError);
    CHECK_THROWS_AS(filter_duplicates(scored(poses, s), obj, r, 0), UsageError);
  }
}
