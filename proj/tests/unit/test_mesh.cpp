#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "oracles.hpp"
#include "posesym/error.hpp"
#include "posesym/mesh.hpp"
#include "posesym/object_model.hpp"
#include "posesym/symmetry.hpp"

using namespace posesym;
using Eigen::Matrix3d;
using Eigen::Vector3d;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("posesym_mesh_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TriangleMesh single_triangle() {
  TriangleMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  m.triangles = {{0, 1, 2}};
  return m;
}

}  // namespace

TEST_SUITE("mesh") {
  TEST_CASE("unit sphere has diameter 2") {
    const auto obj = ObjectModel::create(make_icosphere(1.0, 3), ProperSymmetryGroup::spherical());
    // icosphere vertices lie on the sphere; the centroid sits at the origin
    CHECK(obj.diameter() == doctest::Approx(2.0).epsilon(1e-9));
  }

  TEST_CASE("cube of half-side a: Lambda = a*sqrt(5)/3 * I") {
    for (double a : {0.5, 1.0, 2.5}) {
      const auto obj = ObjectModel::create(make_box(a, a, a), ProperSymmetryGroup::trivial());
      const Matrix3d expected = a * std::sqrt(5.0) / 3.0 * Matrix3d::Identity();
      CHECK((obj.lambda() - expected).norm() < 1e-12 * a);
    }
  }

  TEST_CASE("non-closed rotation list rejected on load") {
    const RotationList g{Matrix3d::Identity(), rotation_z(std::numbers::pi / 2)};
    CHECK_THROWS_AS(ObjectModel::create(make_box(1, 1, 1), ProperSymmetryGroup::finite(g)),
                    DataError);
  }

  TEST_CASE("unit sphere Lambda approaches I/sqrt(3)") {
    const auto obj = ObjectModel::create(make_icosphere(1.0, 5), ProperSymmetryGroup::spherical());
    const Matrix3d expected = Matrix3d::Identity() / std::sqrt(3.0);
    CHECK((obj.lambda() - expected).norm() / expected.norm() < 2e-3);
  }

  TEST_CASE("zero-area surface is an error") {
    TriangleMesh m;
    m.vertices = {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}};
    m.triangles = {{0, 1, 2}};
    CHECK_THROWS_AS(compute_lambda(m), DataError);
    CHECK_THROWS_AS(surface_centroid(m), DataError);
    CHECK_THROWS_AS(ObjectModel::create(m, ProperSymmetryGroup::trivial()), DataError);
  }

  TEST_CASE("cylinder Lambda is diagonal with equal radial terms") {
    const auto obj = ObjectModel::create(make_cylinder(0.3, 1.0, 64), ProperSymmetryGroup::revolution(false));
    const Matrix3d& l = obj.lambda();
    CHECK(std::abs(l(0, 1)) < 1e-12);
    CHECK(std::abs(l(0, 2)) < 1e-12);
    CHECK(std::abs(l(1, 2)) < 1e-12);
    CHECK(l(0, 0) == doctest::Approx(l(1, 1)).epsilon(1e-12));
    CHECK(obj.lambda_scalar() == doctest::Approx(std::hypot(l(0, 0), l(2, 2))).epsilon(1e-14));
  }

  TEST_CASE("revolution group on a non-axial shape is rejected") {
    CHECK_THROWS_AS(ObjectModel::create(make_box(1, 2, 3), ProperSymmetryGroup::revolution(false)),
                    DataError);
  }

  TEST_CASE("surface centroid examples") {
    CHECK(surface_centroid(make_icosphere(1.0, 2)).norm() < 1e-12);
    const TriangleMesh sphere = make_icosphere(1.0, 2);
    const TriangleMesh moved = transformed(sphere, Matrix3d::Identity(), Vector3d(1, 2, 3));
    CHECK((surface_centroid(moved) - surface_centroid(sphere) - Vector3d(1, 2, 3)).norm() < 1e-12);
    CHECK((surface_centroid(single_triangle()) - Vector3d(1.0 / 3, 1.0 / 3, 0)).norm() < 1e-15);
  }

  TEST_CASE("re-centering keeps the original offset") {
    const TriangleMesh moved =
        transformed(make_box(1, 2, 3), Matrix3d::Identity(), Vector3d(5, -1, 2));
    const auto obj = ObjectModel::create(moved, ProperSymmetryGroup::trivial());
    CHECK((obj.origin_offset() - Vector3d(5, -1, 2)).norm() < 1e-12);
    CHECK(surface_centroid(obj.mesh()).norm() < 1e-12);
  }

  TEST_CASE("Lambda under rotation equals (Q Lambda^2 Q^T)^(1/2)") {
    SplitMix64 rng(11);
    const TriangleMesh base = testing::make_test_object(testing::TestClass::trivial).mesh();
    const Matrix3d l = compute_lambda(base);
    for (int k = 0; k < 20; ++k) {
      const Matrix3d q = rng.rotation();
      const Matrix3d lr = compute_lambda(transformed(base, q, Vector3d::Zero()));
      // (QΛ²Qᵀ)^{1/2} = QΛQᵀ for symmetric Λ
      CHECK((lr - q * l * q.transpose()).norm() < 1e-9 * l.norm());
    }
  }

  TEST_CASE("diameter invariant under rigid motion") {
    SplitMix64 rng(5);
    const TriangleMesh base = testing::make_test_object(testing::TestClass::revolution).mesh();
    const double d0 = ObjectModel::create(base, ProperSymmetryGroup::trivial()).diameter();
    for (int k = 0; k < 10; ++k) {
      const auto m = transformed(base, rng.rotation(), Vector3d(rng.normal(), rng.normal(), rng.normal()));
      CHECK(std::abs(ObjectModel::create(m, ProperSymmetryGroup::trivial()).diameter() - d0) < 1e-9);
    }
  }

  TEST_CASE("Lambda agrees with a Monte-Carlo surface estimate") {
    for (auto c : testing::all_test_classes()) {
      const auto obj = testing::make_test_object(c);
      const Matrix3d mc = testing::monte_carlo_lambda(obj.mesh(), 1000000, 99);
      CHECK_MESSAGE((mc - obj.lambda()).norm() / obj.lambda().norm() < 1e-3, testing::name(c));
    }
  }

  TEST_CASE("psd_sqrt clamps tiny negatives and rejects large ones") {
    Matrix3d m = Matrix3d::Zero();
    m(0, 0) = 4.0;
    m(1, 1) = 1.0;
    m(2, 2) = -1e-14;
    const Matrix3d r = psd_sqrt(m);
    CHECK(r(0, 0) == doctest::Approx(2.0));
    CHECK(r(2, 2) == 0.0);
    m(2, 2) = -1e-3;
    CHECK_THROWS_AS(psd_sqrt(m), NumericalError);
  }

  TEST_CASE("discrete Lambda needs samples") {
    std::vector<Vector3d> none;
    CHECK_THROWS_AS(discrete_lambda(none), DataError);
  }

  TEST_CASE("PLY ascii and binary round trip") {
    const fs::path dir = scratch("ply");
    const TriangleMesh m = make_icosphere(0.5, 1);
    save_ply(m, dir / "a.ply");
    const TriangleMesh back = load_mesh(dir / "a.ply");
    REQUIRE(back.vertices.size() == m.vertices.size());
    REQUIRE(back.triangles == m.triangles);
    for (std::size_t i = 0; i < m.vertices.size(); ++i) CHECK((back.vertices[i] - m.vertices[i]).norm() < 1e-15);

    // hand-written binary little endian with an extra property and uchar counts
    std::ofstream out(dir / "b.ply", std::ios::binary);
    out << "ply\nformat binary_little_endian 1.0\ncomment test\nelement vertex 3\n"
           "property float x\nproperty float y\nproperty float z\nproperty uchar red\n"
           "element face 1\nproperty list uchar int vertex_indices\nend_header\n";
    const float v[3][3] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    for (auto& row : v) {
      out.write(reinterpret_cast<const char*>(row), sizeof row);
      const unsigned char red = 7;
      out.write(reinterpret_cast<const char*>(&red), 1);
    }
    const unsigned char three = 3;
    const int idx[3] = {0, 1, 2};
    out.write(reinterpret_cast<const char*>(&three), 1);
    out.write(reinterpret_cast<const char*>(idx), sizeof idx);
    out.close();
    const TriangleMesh b = load_mesh(dir / "b.ply");
    CHECK(b.vertices.size() == 3);
    CHECK(b.triangles.size() == 1);
    CHECK(b.vertices[1].x() == 1.0);
  }

  TEST_CASE("OBJ parsing, negative indices, quads rejected") {
    const fs::path dir = scratch("obj");
    {
      std::ofstream o(dir / "t.obj");
      o << "# tri\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nf -3//1 -2//1 -1//1\n";
    }
    const TriangleMesh t = load_mesh(dir / "t.obj");
    CHECK(t.triangles.size() == 1);
    CHECK(t.triangles[0] == std::array<int, 3>{0, 1, 2});
    {
      std::ofstream o(dir / "q.obj");
      o << "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
    }
    CHECK_THROWS_AS(load_mesh(dir / "q.obj"), DataError);
    {
      std::ofstream o(dir / "q.ply");
      o << "ply\nformat ascii 1.0\nelement vertex 4\nproperty float x\nproperty float y\n"
           "property float z\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n"
           "0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
    }
    CHECK_THROWS_AS(load_mesh(dir / "q.ply"), DataError);
    CHECK_THROWS_AS(load_mesh(dir / "missing.ply"), DataError);
    CHECK_THROWS_AS(load_mesh(dir / "t.stl"), DataError);
  }

  TEST_CASE("object descriptor loading") {
    const auto obj = load_object(fs::path(POSESYM_FIXTURE_DIR) / "brick" / "brick.json");
    CHECK(obj.group().rotations.size() == 2);
    CHECK(obj.diameter() > 0);
    const fs::path dir = scratch("desc");
    save_ply(make_box(1, 1, 1), dir / "m.ply");
    {
      std::ofstream o(dir / "bad.json");
      o << R"({"mesh": "m.ply", "symmetry": {"rotations": [[1,0,0,0,1,0,0,0,1],[0,-1,0,1,0,0,0,0,1]]}})";
    }
    CHECK_THROWS_AS(load_object(dir / "bad.json"), DataError);
    {
      std::ofstream o(dir / "cube.json");
      o << R"({"mesh": "m.ply", "symmetry": {"polyhedral": "octahedral"}})";
    }
    CHECK(load_object(dir / "cube.json").group().rotations.size() == 24);
  }
}
