#pragma once

#include <array>
#include <vector>

#include "demo2prog/arm.hpp"
#include "demo2prog/image.hpp"

namespace demo2prog {

struct SceneObject {
  int id = 0;
  std::array<double, 3> color = {1.0, 0.0, 0.0};
  Vec2 center = Vec2::Zero();
  double half_extent = 0.25;  // workspace units
};

struct Scene {
  std::vector<SceneObject> objects;

  void validate(const CameraModel& camera) const;
  const SceneObject* find(int id) const;
};

inline constexpr double kBackgroundGray = 0.5;

/// Flat-shaded raster of the scene: gray background, one filled axis-aligned
/// square per object, later objects overdrawing earlier ones.
Image render(const Scene& scene, const CameraModel& camera);

/// Index of the object whose square covers the pixel (last drawn wins),
/// or -1 for background.
int object_at_pixel(const Scene& scene, const CameraModel& camera,
                    const Vec2& pixel);

}  // namespace demo2prog
