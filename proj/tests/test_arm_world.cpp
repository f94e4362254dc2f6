#include <doctest.h>

#include <cmath>
#include <random>

#include "demo2prog/arm.hpp"
#include "demo2prog/errors.hpp"
#include "demo2prog/scene.hpp"

using namespace demo2prog;

namespace {

ArmModel unit_arm() {
  ArmModel arm;
  arm.link_lengths = Eigen::Vector3d::Ones();
  return arm;
}

CameraModel test_camera() {
  CameraModel cam;
  cam.pixels_per_unit = 32.0;
  cam.principal_point = Vec2(160, 120);
  cam.image_width = 320;
  cam.image_height = 240;
  return cam;
}

}  // namespace

TEST_CASE("forward kinematics of the straight arm") {
  const ArmModel arm = unit_arm();
  const Vec2 p = forward_kinematics(arm, Eigen::Vector3d::Zero());
  CHECK(p.x() == doctest::Approx(3.0));
  CHECK(p.y() == doctest::Approx(0.0));

  const Vec2 up = forward_kinematics(arm, Eigen::Vector3d(M_PI / 2, 0, 0));
  CHECK(up.x() == doctest::Approx(0.0));
  CHECK(up.y() == doctest::Approx(3.0));
}

TEST_CASE("forward kinematics sums link vectors") {
  // (0,1) from the first link, then (1,0) twice after bending back
  const Vec2 p = forward_kinematics(unit_arm(),
                                    Eigen::Vector3d(M_PI / 2, -M_PI / 2, 0));
  CHECK(p.x() == doctest::Approx(2.0));
  CHECK(p.y() == doctest::Approx(1.0));
}

TEST_CASE("forward kinematics rejects wrong dimensions") {
  CHECK_THROWS_AS(forward_kinematics(unit_arm(), Eigen::Vector2d::Zero()),
                  DimensionError);
}

TEST_CASE("projection maps workspace to pixels") {
  const CameraModel cam = test_camera();
  const Vec2 origin = project(cam, Vec2(0, 0));
  CHECK(origin.x() == doctest::Approx(160));
  CHECK(origin.y() == doctest::Approx(120));

  const Vec2 p = project(cam, Vec2(1, 0.5));
  CHECK(p.x() == doctest::Approx(192));
  CHECK(p.y() == doctest::Approx(104));

  const Vec2 q = project(cam, Vec2(-1, 0));
  CHECK(q.x() == doctest::Approx(128));
  CHECK(q.y() == doctest::Approx(120));
}

TEST_CASE("projection is affine: differences scale linearly") {
  const CameraModel cam = test_camera();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-4.0, 4.0);
  for (int i = 0; i < 200; ++i) {
    const Vec2 a(coord(rng), coord(rng));
    const Vec2 b(coord(rng), coord(rng));
    const Vec2 diff = project(cam, a) - project(cam, b);
    CHECK(diff.x() ==
          doctest::Approx(cam.pixels_per_unit * (a - b).x()).epsilon(1e-12));
    CHECK(diff.y() ==
          doctest::Approx(-cam.pixels_per_unit * (a - b).y()).epsilon(1e-12));
  }
}

TEST_CASE("unproject inverts project") {
  const CameraModel cam = test_camera();
  const Vec2 p(1.25, -2.5);
  const Vec2 back = unproject(cam, project(cam, p));
  CHECK(back.x() == doctest::Approx(p.x()));
  CHECK(back.y() == doctest::Approx(p.y()));
}

TEST_CASE("empty scene renders uniform gray") {
  const Image img = render(Scene{}, test_camera());
  REQUIRE(img.width == 320);
  REQUIRE(img.height == 240);
  for (double v : img.pixels) CHECK(v == kBackgroundGray);
}

TEST_CASE("a block renders as a filled square centred on its projection") {
  Scene scene;
  scene.objects.push_back({0, {1, 0, 0}, Vec2(1, 1), 1.0});
  const Image img = render(scene, test_camera());
  // projected centre (192, 88), half extent 32 px: pixels 160..223 x 56..119
  CHECK(img.at(192, 88, 0) == 1.0);
  CHECK(img.at(192, 88, 1) == 0.0);
  CHECK(img.at(160, 88, 0) == 1.0);
  CHECK(img.at(159, 88, 0) == kBackgroundGray);
  CHECK(img.at(223, 88, 0) == 1.0);
  CHECK(img.at(224, 88, 0) == kBackgroundGray);
  CHECK(img.at(192, 56, 0) == 1.0);
  CHECK(img.at(192, 55, 0) == kBackgroundGray);
  CHECK(img.at(192, 119, 0) == 1.0);
  CHECK(img.at(192, 120, 0) == kBackgroundGray);
}

TEST_CASE("later objects overdraw earlier ones") {
  Scene scene;
  scene.objects.push_back({0, {1, 0, 0}, Vec2(0, 0), 0.5});
  scene.objects.push_back({1, {0, 0, 1}, Vec2(0.25, 0), 0.5});
  const Image img = render(scene, test_camera());
  const Vec2 overlap = project(test_camera(), Vec2(0.2, 0));
  CHECK(img.at(static_cast<int>(overlap.x()), static_cast<int>(overlap.y()),
               2) == 1.0);
  CHECK(img.at(static_cast<int>(overlap.x()), static_cast<int>(overlap.y()),
               0) == 0.0);
}

TEST_CASE("rendering is deterministic") {
  Scene scene;
  scene.objects.push_back({0, {1, 0, 0}, Vec2(1, 1), 0.35});
  scene.objects.push_back({1, {0, 1, 0}, Vec2(-1, -1), 0.35});
  CHECK(render(scene, test_camera()) == render(scene, test_camera()));
}

TEST_CASE("scene validation rejects duplicate ids and off-frame objects") {
  Scene dup;
  dup.objects.push_back({0, {1, 0, 0}, Vec2(0, 0), 0.2});
  dup.objects.push_back({0, {0, 1, 0}, Vec2(1, 0), 0.2});
  CHECK_THROWS_AS(dup.validate(test_camera()), ConfigError);

  Scene off;
  off.objects.push_back({0, {1, 0, 0}, Vec2(50, 0), 0.2});
  CHECK_THROWS_AS(off.validate(test_camera()), ConfigError);
}

TEST_CASE("IK returns the seed when it already solves the target") {
  const ArmModel arm = unit_arm();
  const Eigen::Vector3d seed(0.4, -0.2, 0.3);
  const Vec2 target = forward_kinematics(arm, seed);
  const JointState sol = inverse_kinematics(arm, target, seed);
  CHECK((sol - seed).norm() < 1e-6);
}

TEST_CASE("IK reaches a target from the stretched singular pose") {
  const ArmModel arm = unit_arm();
  const JointState sol =
      inverse_kinematics(arm, Vec2(2, 1), Eigen::Vector3d::Zero());
  CHECK((forward_kinematics(arm, sol) - Vec2(2, 1)).norm() < 1e-3);
}

TEST_CASE("IK rejects unreachable targets") {
  CHECK_THROWS_AS(
      inverse_kinematics(unit_arm(), Vec2(10, 0), Eigen::Vector3d::Zero()),
      UnreachableTargetError);
}

TEST_CASE("FK of IK lands on the target across the workspace") {
  const ArmModel arm = unit_arm();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> radius(0.3, 2.9);
  std::uniform_real_distribution<double> angle(0, 2 * M_PI);
  std::uniform_real_distribution<double> joint(-1.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double r = radius(rng);
    const double phi = angle(rng);
    const Vec2 target(r * std::cos(phi), r * std::sin(phi));
    const Eigen::Vector3d seed(joint(rng), joint(rng), joint(rng));
    const JointState sol = inverse_kinematics(arm, target, seed);
    CHECK((forward_kinematics(arm, sol) - target).norm() < 1e-3);
  }
}

TEST_CASE("arm jacobian matches finite differences") {
  const ArmModel arm = unit_arm();
  const Eigen::Vector3d theta(0.3, -0.7, 1.1);
  const Eigen::Matrix2Xd jac = arm_jacobian(arm, theta);
  const double h = 1e-6;
  for (int j = 0; j < 3; ++j) {
    Eigen::Vector3d lo = theta;
    Eigen::Vector3d hi = theta;
    lo[j] -= h;
    hi[j] += h;
    const Vec2 fd =
        (forward_kinematics(arm, hi) - forward_kinematics(arm, lo)) / (2 * h);
    CHECK(jac(0, j) == doctest::Approx(fd.x()).epsilon(1e-6));
    CHECK(jac(1, j) == doctest::Approx(fd.y()).epsilon(1e-6));
  }
}
