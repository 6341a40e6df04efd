#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numbers>

#include "oracles.hpp"
#include "posesym/error.hpp"
#include "posesym/pose_index.hpp"
#include "posesym/pose_metric.hpp"
#include "posesym/symmetry.hpp"

using namespace posesym;
using namespace posesym::testing;

TEST_SUITE("pose_index") {
  TEST_CASE("empty pose list rejected") {
    const auto obj = make_test_object(TestClass::brick);
    std::vector<Pose> none;
    CHECK_THROWS_AS(PoseIndex(none, obj), UsageError);
  }

  TEST_CASE("single pose found at zero distance") {
    SplitMix64 rng(1);
    const auto obj = make_test_object(TestClass::cyclic6);
    const std::vector<Pose> poses{random_pose(rng, 0.1)};
    const PoseIndex idx(poses, obj);
    const auto hit = idx.nearest(poses[0]);
    CHECK(hit.pose_id == 0);
    CHECK(hit.distance == 0.0);
  }

  TEST_CASE("nearest and radius agree with a linear scan") {
    SplitMix64 rng(2);
    for (auto c : all_test_classes()) {
      const auto obj = make_test_object(c);
      std::vector<Pose> poses;
      for (int i = 0; i < 1000; ++i) poses.push_back(random_pose(rng, 0.2));
      const PoseIndex idx(poses, obj);
      for (int q = 0; q < 100; ++q) {
        const Pose query = random_pose(rng, 0.2);
        const auto hit = idx.nearest(query);
        const auto ref = linear_nearest(poses, query, obj);
        CHECK_MESSAGE(hit.pose_id == ref.id, name(c));
        CHECK(hit.distance == ref.distance);
        const double r = ref.distance * 1.5 + 0.01;
        const auto found = idx.radius_search(query, r);
        const auto expect = linear_radius(poses, query, r, obj);
        REQUIRE(found.size() == expect.size());
        for (std::size_t i = 0; i < found.size(); ++i) {
          CHECK(found[i].pose_id == expect[i].id);
          CHECK(found[i].distance == expect[i].distance);
        }
      }
    }
  }

  TEST_CASE("small translation offset returns that pose at its norm") {
    SplitMix64 rng(3);
    const auto obj = make_test_object(TestClass::trivial);
    std::vector<Pose> poses;
    for (int i = 0; i < 200; ++i) poses.push_back(random_pose(rng, 1.0));
    const PoseIndex idx(poses, obj);
    Pose q = poses[77];
    q.translation += Eigen::Vector3d(1e-4, 0, 0);
    const auto hit = idx.nearest(q);
    CHECK(hit.pose_id == 77);
    CHECK(hit.distance == doctest::Approx(1e-4).epsilon(1e-9));
  }

  TEST_CASE("ties go to the lowest pose id") {
    const auto obj = make_test_object(TestClass::brick);
    SplitMix64 rng(9);
    const Pose p = Pose::identity();
    const std::vector<Pose> poses{random_pose(rng, 1.0), p, p, p};
    const PoseIndex idx(poses, obj);
    CHECK(idx.nearest(p).pose_id == 1);
  }

  TEST_CASE("brick: P and P o Rz(pi) both at distance zero") {
    SplitMix64 rng(4);
    const auto obj = make_test_object(TestClass::brick);
    const Pose p = random_pose(rng, 0.1);
    std::vector<Pose> poses{p.with_symmetry(rotation_z(std::numbers::pi)), random_pose(rng, 0.1), p};
    const PoseIndex idx(poses, obj);
    const auto hits = idx.radius_search(p, 1e-9);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].distance < 1e-12);
    CHECK(hits[1].distance < 1e-12);
    std::vector<std::size_t> ids{hits[0].pose_id, hits[1].pose_id};
    std::sort(ids.begin(), ids.end());
    CHECK(ids == std::vector<std::size_t>{0, 2});
  }

  TEST_CASE("radius zero and infinity") {
    SplitMix64 rng(5);
    const auto obj = make_test_object(TestClass::revolution_flip);
    std::vector<Pose> poses;
    for (int i = 0; i < 50; ++i) poses.push_back(random_pose(rng, 0.1));
    const PoseIndex idx(poses, obj);
    const auto exact = idx.radius_search(poses[10], 0.0);
    REQUIRE(exact.size() == 1);
    CHECK(exact[0].pose_id == 10);
    CHECK(idx.radius_search(poses[10], std::numeric_limits<double>::infinity()).size() == 50);
  }
}
