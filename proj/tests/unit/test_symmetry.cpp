#include <doctest.h>

#include <numbers>

#include "posesym/error.hpp"
#include "posesym/object_model.hpp"
#include "posesym/symmetry.hpp"

using namespace posesym;
using std::numbers::pi;

TEST_SUITE("symmetry") {
  TEST_CASE("identity alone is a group") {
    const RotationList g{Eigen::Matrix3d::Identity()};
    CHECK(validate_group(g));
  }

  TEST_CASE("brick group {I, Rz(pi)} is valid") {
    const RotationList g{Eigen::Matrix3d::Identity(), rotation_z(pi)};
    CHECK(validate_group(g));
  }

  TEST_CASE("quarter turn without its powers is not closed") {
    const RotationList g{Eigen::Matrix3d::Identity(), rotation_z(pi / 2)};
    const auto res = validate_group(g);
    CHECK_FALSE(res);
    CHECK_FALSE(res.diagnostic.empty());
  }

  TEST_CASE("third turn missing Rz(4pi/3) is rejected") {
    const RotationList g{Eigen::Matrix3d::Identity(), rotation_z(2 * pi / 3)};
    CHECK_FALSE(validate_group(g));
  }

  TEST_CASE("improper element and duplicates rejected") {
    Eigen::Matrix3d mirror = Eigen::Matrix3d::Identity();
    mirror(2, 2) = -1;
    CHECK_FALSE(validate_group(RotationList{Eigen::Matrix3d::Identity(), mirror}));
    CHECK_FALSE(validate_group(RotationList{Eigen::Matrix3d::Identity(), Eigen::Matrix3d::Identity()}));
    CHECK_FALSE(validate_group(RotationList{rotation_z(pi)}));  // no identity
  }

  TEST_CASE("cyclic helper passes for n in [1, 24]") {
    for (int n = 1; n <= 24; ++n) {
      const auto g = cyclic_group(n);
      CHECK(g.size() == std::size_t(n));
      CHECK_MESSAGE(validate_group(g), "n = " << n);
    }
  }

  TEST_CASE("dihedral and polyhedral orders") {
    for (int n = 1; n <= 8; ++n) {
      const auto g = dihedral_group(n);
      CHECK(g.size() == std::size_t(2 * n));
      CHECK(validate_group(g));
    }
    CHECK(tetrahedral_group().size() == 12);
    CHECK(octahedral_group().size() == 24);
    CHECK(icosahedral_group().size() == 60);
    CHECK(validate_group(tetrahedral_group()));
    CHECK(validate_group(octahedral_group()));
    CHECK(validate_group(icosahedral_group()));
  }

  TEST_CASE("representative counts per class") {
    CHECK(ProperSymmetryGroup::trivial().representative_count() == 1);
    CHECK(ProperSymmetryGroup::finite(cyclic_group(6)).representative_count() == 6);
    CHECK(ProperSymmetryGroup::revolution(false).representative_count() == 1);
    CHECK(ProperSymmetryGroup::revolution(true).representative_count() == 2);
    CHECK(ProperSymmetryGroup::spherical().representative_count() == 1);
  }

  TEST_CASE("class names round trip") {
    for (auto c : {SymmetryClass::finite, SymmetryClass::revolution,
                   SymmetryClass::revolution_rotoreflection, SymmetryClass::spherical}) {
      CHECK(symmetry_class_from_string(to_string(c)) == c);
    }
    CHECK_THROWS(symmetry_class_from_string("octopus"));
  }

  TEST_CASE("symmetry descriptor parsing") {
    CHECK(parse_symmetry(R"({"cyclic_order": 4})").rotations.size() == 4);
    CHECK(parse_symmetry(R"({"dihedral_order": 3})").rotations.size() == 6);
    CHECK(parse_symmetry(R"({"polyhedral": "octahedral"})").rotations.size() == 24);
    CHECK(parse_symmetry(R"({"class": "spherical"})").cls == SymmetryClass::spherical);
    // quaternion list for {I, Rz(pi)}
    const auto g = parse_symmetry(R"({"rotations": [[1,0,0,0],[0,0,0,1]]})");
    CHECK(g.rotations.size() == 2);
    CHECK(g.rotations[1].isApprox(rotation_z(pi), 1e-12));
    CHECK_THROWS_AS(parse_symmetry(R"({"rotations": [[1,0,0,0,1,0,0,0,1],[0,-1,0,1,0,0,0,0,1]]})"),
                    DataError);
    CHECK_THROWS_AS(parse_symmetry(R"({"cyclic_order": 2, "dihedral_order": 2})"), DataError);
    CHECK_THROWS_AS(parse_symmetry(R"({"cyclic_order": 2, "axis": "x"})"), DataError);
  }
}
