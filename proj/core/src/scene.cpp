#include "demo2prog/scene.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "demo2prog/errors.hpp"

namespace demo2prog {

void Scene::validate(const CameraModel& camera) const {
  std::set<int> ids;
  for (const auto& obj : objects) {
    if (!ids.insert(obj.id).second) {
      throw ConfigError("duplicate scene object id " + std::to_string(obj.id));
    }
    if (obj.half_extent <= 0.0) {
      throw ConfigError("object half_extent must be positive");
    }
    const Vec2 px = project(camera, obj.center);
    if (px.x() < 0 || px.x() >= camera.image_width || px.y() < 0 ||
        px.y() >= camera.image_height) {
      throw ConfigError("object " + std::to_string(obj.id) +
                        " outside camera frustum");
    }
  }
}

const SceneObject* Scene::find(int id) const {
  for (const auto& obj : objects) {
    if (obj.id == id) return &obj;
  }
  return nullptr;
}

namespace {

struct PixelRect {
  int x0, x1, y0, y1;  // inclusive pixel index bounds, unclamped
};

// A pixel belongs to the square when its center (ix+0.5, iy+0.5) lies within
// the projected extent.
PixelRect object_rect(const SceneObject& obj, const CameraModel& camera) {
  const Vec2 c = project(camera, obj.center);
  const double h = obj.half_extent * camera.pixels_per_unit;
  return {static_cast<int>(std::ceil(c.x() - h - 0.5)),
          static_cast<int>(std::floor(c.x() + h - 0.5)),
          static_cast<int>(std::ceil(c.y() - h - 0.5)),
          static_cast<int>(std::floor(c.y() + h - 0.5))};
}

}  // namespace

Image render(const Scene& scene, const CameraModel& camera) {
  Image img(camera.image_width, camera.image_height, kBackgroundGray,
            kBackgroundGray, kBackgroundGray);
  for (const auto& obj : scene.objects) {
    const PixelRect r = object_rect(obj, camera);
    const int x0 = std::max(r.x0, 0);
    const int x1 = std::min(r.x1, camera.image_width - 1);
    const int y0 = std::max(r.y0, 0);
    const int y1 = std::min(r.y1, camera.image_height - 1);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        img.at(x, y, 0) = obj.color[0];
        img.at(x, y, 1) = obj.color[1];
        img.at(x, y, 2) = obj.color[2];
      }
    }
  }
  return img;
}

int object_at_pixel(const Scene& scene, const CameraModel& camera,
                    const Vec2& pixel) {
  const int px = static_cast<int>(std::floor(pixel.x()));
  const int py = static_cast<int>(std::floor(pixel.y()));
  int hit = -1;
  for (const auto& obj : scene.objects) {
    const PixelRect r = object_rect(obj, camera);
    if (px >= r.x0 && px <= r.x1 && py >= r.y0 && py <= r.y1) hit = obj.id;
  }
  return hit;
}

}  // namespace demo2prog
