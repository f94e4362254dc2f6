#pragma once

#include <Eigen/Dense>

namespace demo2prog {

/// Joint angles in radians. Length equals the arm's joint count.
using JointState = Eigen::VectorXd;
/// Joint velocity command in rad/s.
using ControlSignal = Eigen::VectorXd;

using Vec2 = Eigen::Vector2d;

/// Planar revolute arm: joint j rotates the chain by angles[j] relative to
/// the previous link.
struct ArmModel {
  Eigen::VectorXd link_lengths;  // all > 0
  Vec2 base_position = Vec2::Zero();

  int joint_count() const { return static_cast<int>(link_lengths.size()); }
  double reach() const { return link_lengths.sum(); }
  /// Inner radius of the reachable annulus.
  double min_reach() const;
  void validate() const;
};

/// Affine scale+offset projection from workspace to pixel coordinates,
/// y-down raster convention.
struct CameraModel {
  double pixels_per_unit = 32.0;
  Vec2 principal_point = Vec2(160.0, 120.0);
  int image_width = 320;
  int image_height = 240;

  void validate() const;
};

/// End-effector position: base + sum of link vectors at cumulative angles.
Vec2 forward_kinematics(const ArmModel& arm, const JointState& angles);

/// 2x J Jacobian of the end-effector position w.r.t. joint angles.
Eigen::Matrix2Xd arm_jacobian(const ArmModel& arm, const JointState& angles);

/// Workspace point -> pixel coordinate. May land outside the image; callers
/// clamp before any raster lookup.
Vec2 project(const CameraModel& camera, const Vec2& p);

/// Inverse of project().
Vec2 unproject(const CameraModel& camera, const Vec2& pixel);

struct IkConfig {
  double damping = 0.1;
  int max_iterations = 200;
  double step_tolerance = 1e-6;
  double position_tolerance = 1e-3;
  double max_step = 0.5;  // per-iteration cap on ||dtheta||_inf
};

/// Damped-least-squares IK. Resolves redundancy by iterating from the seed,
/// so the solution stays near it.
JointState inverse_kinematics(const ArmModel& arm, const Vec2& target,
                              const JointState& seed,
                              const IkConfig& cfg = {});

}  // namespace demo2prog
