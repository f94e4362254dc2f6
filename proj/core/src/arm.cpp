#include "demo2prog/arm.hpp"

#include <cmath>

#include "demo2prog/errors.hpp"

namespace demo2prog {

double ArmModel::min_reach() const {
  // A planar chain can fold onto itself; the annulus degenerates to a disc
  // unless one link dominates the rest.
  const double total = link_lengths.sum();
  const double longest = link_lengths.maxCoeff();
  return std::max(0.0, 2.0 * longest - total);
}

void ArmModel::validate() const {
  if (link_lengths.size() == 0) throw ConfigError("arm has no links");
  if ((link_lengths.array() <= 0.0).any()) {
    throw ConfigError("all link lengths must be positive");
  }
  if (!link_lengths.allFinite() || !base_position.allFinite()) {
    throw ConfigError("arm parameters must be finite");
  }
}

void CameraModel::validate() const {
  if (pixels_per_unit <= 0.0) throw ConfigError("pixels_per_unit must be > 0");
  if (image_width <= 0 || image_height <= 0) {
    throw ConfigError("image size must be positive");
  }
  if (principal_point.x() < 0 || principal_point.x() > image_width ||
      principal_point.y() < 0 || principal_point.y() > image_height) {
    throw ConfigError("principal point outside image bounds");
  }
}

Vec2 forward_kinematics(const ArmModel& arm, const JointState& angles) {
  if (angles.size() != arm.link_lengths.size()) {
    throw DimensionError("joint state length does not match arm joint count");
  }
  Vec2 p = arm.base_position;
  double cum = 0.0;
  for (int j = 0; j < arm.joint_count(); ++j) {
    cum += angles[j];
    p.x() += arm.link_lengths[j] * std::cos(cum);
    p.y() += arm.link_lengths[j] * std::sin(cum);
  }
  return p;
}

Eigen::Matrix2Xd arm_jacobian(const ArmModel& arm, const JointState& angles) {
  if (angles.size() != arm.link_lengths.size()) {
    throw DimensionError("joint state length does not match arm joint count");
  }
  const int n = arm.joint_count();
  // Joint j moves every link at index >= j.
  Eigen::Matrix2Xd jac = Eigen::Matrix2Xd::Zero(2, n);
  double cum = 0.0;
  for (int i = 0; i < n; ++i) {
    cum += angles[i];
    const double dx = -arm.link_lengths[i] * std::sin(cum);
    const double dy = arm.link_lengths[i] * std::cos(cum);
    for (int j = 0; j <= i; ++j) {
      jac(0, j) += dx;
      jac(1, j) += dy;
    }
  }
  return jac;
}

Vec2 project(const CameraModel& camera, const Vec2& p) {
  return {camera.principal_point.x() + camera.pixels_per_unit * p.x(),
          camera.principal_point.y() - camera.pixels_per_unit * p.y()};
}

Vec2 unproject(const CameraModel& camera, const Vec2& pixel) {
  return {(pixel.x() - camera.principal_point.x()) / camera.pixels_per_unit,
          -(pixel.y() - camera.principal_point.y()) / camera.pixels_per_unit};
}

JointState inverse_kinematics(const ArmModel& arm, const Vec2& target,
                              const JointState& seed, const IkConfig& cfg) {
  if (seed.size() != arm.link_lengths.size()) {
    throw DimensionError("IK seed length does not match arm joint count");
  }
  const double dist = (target - arm.base_position).norm();
  const double slack = 1e-9;
  if (dist > arm.reach() + slack || dist < arm.min_reach() - slack) {
    throw UnreachableTargetError("IK target outside reachable annulus");
  }

  JointState theta = seed;
  const double lambda2 = cfg.damping * cfg.damping;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const Vec2 err = target - forward_kinematics(arm, theta);
    if (err.norm() < cfg.position_tolerance) return theta;

    const Eigen::Matrix2Xd jac = arm_jacobian(arm, theta);
    const Eigen::Matrix2d jjt =
        jac * jac.transpose() + lambda2 * Eigen::Matrix2d::Identity();
    Eigen::VectorXd step = jac.transpose() * jjt.ldlt().solve(err);

    const double inf = step.cwiseAbs().maxCoeff();
    if (inf > cfg.max_step) step *= cfg.max_step / inf;
    theta += step;

    if (step.norm() < cfg.step_tolerance) break;
  }
  if ((target - forward_kinematics(arm, theta)).norm() <
      cfg.position_tolerance) {
    return theta;
  }
  throw ConvergenceError("IK did not converge within iteration budget");
}

}  // namespace demo2prog
