#pragma once

#include <Eigen/Dense>

#include "demo2prog/config.hpp"
#include "demo2prog/micronet.hpp"
#include "demo2prog/rng.hpp"
#include "demo2prog/scene.hpp"

namespace demo2prog {

struct ReachingDataset {
  Eigen::MatrixXd inputs;   // one net input per row
  Eigen::MatrixXd targets;  // proportional-law velocities
};

/// Velocity-image training pairs for the visuomotor regressor: single-block
/// scenes at random reachable positions, random joint states, and the
/// proportional control toward the block as the target. The block is the
/// only image content, so a trained net must read it to predict well.
ReachingDataset make_reaching_dataset(const MicroNet& net,
                                      const PipelineConfig& cfg, int samples,
                                      Rng& rng);

/// Uniformly sample a scene layout reachable by the arm: same colors and
/// sizes as `base`, fresh non-overlapping positions.
Scene randomize_scene(const Scene& base, const ArmModel& arm,
                      const CameraModel& camera, Rng& rng);

}  // namespace demo2prog
