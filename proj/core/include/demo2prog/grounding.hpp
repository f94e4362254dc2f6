#pragma once

#include <string>
#include <vector>

#include "demo2prog/arm.hpp"
#include "demo2prog/controller.hpp"
#include "demo2prog/demonstration.hpp"
#include "demo2prog/image.hpp"

namespace demo2prog {

/// Visual evidence tying a controller symbol to the scene: an image patch
/// cropped around the projected goal in the demonstration.
struct GroundedSymbol {
  int symbol = 0;
  Image patch;
  JointState demo_goal;
  double gain = 1.0;
  Vec2 crop_origin = Vec2::Zero();  // top-left pixel of the crop
  Vec2 goal_offset = Vec2::Zero();  // goal pixel relative to crop_origin
};

struct GroundingConfig {
  int patch_size = 32;
  double ncc_threshold = 0.7;
  double min_patch_std = 1e-3;
};

/// One template per library controller, cropped (clamped to the frame) from
/// the demonstration step closest to that goal.
std::vector<GroundedSymbol> extract_templates(const Demonstration& demo,
                                              const ControllerLibrary& library,
                                              const CameraModel& camera,
                                              const ArmModel& arm,
                                              const GroundingConfig& cfg = {});

struct MatchResult {
  Vec2 top_left = Vec2::Zero();  // integer placement of the best window
  double score = 0.0;            // zero-normalized cross-correlation
};

/// Exhaustive zero-normalized cross-correlation of the patch over the image,
/// RGB treated jointly.
MatchResult match_template(const Image& image, const Image& patch);

/// Locate the symbol's template in a new scene and convert the matched pixel
/// back to joint angles through the camera map and IK.
JointState predict_goal(const GroundedSymbol& symbol, const Image& new_image,
                        const CameraModel& camera, const ArmModel& arm,
                        const JointState& seed,
                        const GroundingConfig& cfg = {});

/// Re-ground every symbol in a new scene, preserving gains and ids. Collects
/// per-symbol failures into a PartialGroundingError.
ControllerLibrary reground_library(const std::vector<GroundedSymbol>& symbols,
                                   const Image& new_image,
                                   const CameraModel& camera,
                                   const ArmModel& arm,
                                   const GroundingConfig& cfg = {});

// Template store: one PPM per symbol plus a CSV manifest
// (symbol id, demo goal, gain, crop origin, goal offset).
void save_templates(const std::vector<GroundedSymbol>& symbols,
                    const std::string& dir);
std::vector<GroundedSymbol> load_templates(const std::string& dir);

}  // namespace demo2prog
