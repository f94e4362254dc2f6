#include "demo2prog/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "demo2prog/errors.hpp"

namespace demo2prog {

Image::Image(int w, int h, double r, double g, double b)
    : width(w), height(h), pixels(3 * static_cast<std::size_t>(w) * h) {
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = r;
    pixels[i + 1] = g;
    pixels[i + 2] = b;
  }
}

bool operator==(const Image& a, const Image& b) {
  return a.width == b.width && a.height == b.height && a.pixels == b.pixels;
}

Image downsample_area(const Image& src, int out_w, int out_h) {
  if (out_w <= 0 || out_h <= 0) {
    throw DimensionError("downsample target must be positive");
  }
  if (out_w == src.width && out_h == src.height) {
    return src;
  }
  Image out(out_w, out_h);
  const double sx = static_cast<double>(src.width) / out_w;
  const double sy = static_cast<double>(src.height) / out_h;
  for (int oy = 0; oy < out_h; ++oy) {
    const double y0 = oy * sy;
    const double y1 = (oy + 1) * sy;
    for (int ox = 0; ox < out_w; ++ox) {
      const double x0 = ox * sx;
      const double x1 = (ox + 1) * sx;
      double acc[3] = {0, 0, 0};
      double area = 0;
      for (int y = static_cast<int>(std::floor(y0));
           y < static_cast<int>(std::ceil(y1)); ++y) {
        const double wy =
            std::min<double>(y + 1, y1) - std::max<double>(y, y0);
        for (int x = static_cast<int>(std::floor(x0));
             x < static_cast<int>(std::ceil(x1)); ++x) {
          const double wx =
              std::min<double>(x + 1, x1) - std::max<double>(x, x0);
          const double w = wx * wy;
          const int cx = std::clamp(x, 0, src.width - 1);
          const int cy = std::clamp(y, 0, src.height - 1);
          for (int c = 0; c < 3; ++c) acc[c] += w * src.at(cx, cy, c);
          area += w;
        }
      }
      for (int c = 0; c < 3; ++c) out.at(ox, oy, c) = acc[c] / area;
    }
  }
  return out;
}

namespace {

std::uint8_t to_byte(double v) {
  const double s = std::clamp(v, 0.0, 1.0) * 255.0;
  return static_cast<std::uint8_t>(std::lround(s));
}

}  // namespace

void write_ppm(const Image& img, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw MissingInputError("cannot open for writing: " + path);
  f << "P6\n" << img.width << " " << img.height << "\n255\n";
  std::vector<std::uint8_t> row(3 * static_cast<std::size_t>(img.width));
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < 3; ++c) row[3 * x + c] = to_byte(img.at(x, y, c));
    }
    f.write(reinterpret_cast<const char*>(row.data()),
            static_cast<std::streamsize>(row.size()));
  }
  if (!f) throw MissingInputError("short write: " + path);
}

Image read_ppm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw MissingInputError("cannot open: " + path);
  std::string magic;
  f >> magic;
  if (magic != "P6") throw ConfigError("not a binary PPM (P6): " + path);
  // Skip whitespace and comment lines between header tokens.
  auto next_int = [&f, &path]() {
    int ch = f.peek();
    while (ch == '#' || std::isspace(ch)) {
      if (ch == '#') {
        std::string line;
        std::getline(f, line);
      } else {
        f.get();
      }
      ch = f.peek();
    }
    int v = 0;
    if (!(f >> v)) throw ConfigError("truncated PPM header: " + path);
    return v;
  };
  const int w = next_int();
  const int h = next_int();
  const int maxv = next_int();
  if (maxv != 255) throw ConfigError("unsupported PPM max value: " + path);
  f.get();  // single whitespace after header
  Image img(w, h);
  std::vector<std::uint8_t> row(3 * static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    f.read(reinterpret_cast<char*>(row.data()),
           static_cast<std::streamsize>(row.size()));
    if (!f) throw ConfigError("truncated PPM payload: " + path);
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = row[3 * x + c] / 255.0;
    }
  }
  return img;
}

}  // namespace demo2prog
