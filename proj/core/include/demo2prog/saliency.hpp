#pragma once

#include <vector>

#include "demo2prog/arm.hpp"
#include "demo2prog/scene.hpp"

namespace demo2prog {

/// Non-negative scalar field over a (possibly downsampled) image grid,
/// max-normalized to 1 unless identically zero.
struct SaliencyMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major

  double at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  double& at(int x, int y) {
    return values[static_cast<std::size_t>(y) * width + x];
  }

  /// Divide by the maximum; an all-zero map stays zero.
  void max_normalize();

  /// Bilinear lookup at a pixel of a full_w x full_h image; out-of-bounds
  /// coordinates are clamped to the border.
  double sample_full(double px, double py, int full_w, int full_h) const;
};

/// Sum of isotropic Gaussians (std sigma_px) centred at every object's
/// projected centre, evaluated on the camera pixel grid, max-normalized.
SaliencyMap oracle_saliency(const Scene& scene, const CameraModel& camera,
                            double sigma_px = 8.0);

}  // namespace demo2prog
