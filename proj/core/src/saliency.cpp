#include "demo2prog/saliency.hpp"

#include <algorithm>
#include <cmath>

#include "demo2prog/errors.hpp"

namespace demo2prog {

void SaliencyMap::max_normalize() {
  if (values.empty()) return;
  const double m = *std::max_element(values.begin(), values.end());
  if (m <= 0.0) return;
  for (double& v : values) v /= m;
}

double SaliencyMap::sample_full(double px, double py, int full_w,
                                int full_h) const {
  if (width <= 0 || height <= 0) return 0.0;
  // Map full-resolution pixel centres onto the grid of this map.
  const double gx = (px + 0.5) * width / full_w - 0.5;
  const double gy = (py + 0.5) * height / full_h - 0.5;
  const double cx = std::clamp(gx, 0.0, static_cast<double>(width - 1));
  const double cy = std::clamp(gy, 0.0, static_cast<double>(height - 1));
  const int x0 = static_cast<int>(std::floor(cx));
  const int y0 = static_cast<int>(std::floor(cy));
  const int x1 = std::min(x0 + 1, width - 1);
  const int y1 = std::min(y0 + 1, height - 1);
  const double fx = cx - x0;
  const double fy = cy - y0;
  return (1 - fx) * (1 - fy) * at(x0, y0) + fx * (1 - fy) * at(x1, y0) +
         (1 - fx) * fy * at(x0, y1) + fx * fy * at(x1, y1);
}

SaliencyMap oracle_saliency(const Scene& scene, const CameraModel& camera,
                            double sigma_px) {
  if (sigma_px <= 0.0) throw ConfigError("sigma_px must be positive");
  SaliencyMap map;
  map.width = camera.image_width;
  map.height = camera.image_height;
  map.values.assign(static_cast<std::size_t>(map.width) * map.height, 0.0);
  const double inv2s2 = 1.0 / (2.0 * sigma_px * sigma_px);
  for (const auto& obj : scene.objects) {
    const Vec2 c = project(camera, obj.center);
    for (int y = 0; y < map.height; ++y) {
      const double dy = y - c.y();
      for (int x = 0; x < map.width; ++x) {
        const double dx = x - c.x();
        map.at(x, y) += std::exp(-(dx * dx + dy * dy) * inv2s2);
      }
    }
  }
  map.max_normalize();
  return map;
}

}  // namespace demo2prog
