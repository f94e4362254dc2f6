#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace demo2prog {

/// Row-major RGB image, channel values in [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;  // 3 * width * height, interleaved RGB

  Image() = default;
  Image(int w, int h, double r = 0.0, double g = 0.0, double b = 0.0);

  double& at(int x, int y, int c) {
    return pixels[3 * (static_cast<std::size_t>(y) * width + x) + c];
  }
  double at(int x, int y, int c) const {
    return pixels[3 * (static_cast<std::size_t>(y) * width + x) + c];
  }
  bool contains(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }
};

bool operator==(const Image& a, const Image& b);

/// Area-averaged downsampling to an arbitrary target resolution.
Image downsample_area(const Image& src, int out_w, int out_h);

/// Binary PPM (P6), 8 bits per channel.
void write_ppm(const Image& img, const std::string& path);
Image read_ppm(const std::string& path);

}  // namespace demo2prog
