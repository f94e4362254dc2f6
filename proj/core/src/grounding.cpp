#include "demo2prog/grounding.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "demo2prog/csv.hpp"
#include "demo2prog/errors.hpp"

namespace demo2prog {

namespace {

double patch_std(const Image& patch) {
  double mean = 0.0;
  for (double v : patch.pixels) mean += v;
  mean /= static_cast<double>(patch.pixels.size());
  double var = 0.0;
  for (double v : patch.pixels) var += (v - mean) * (v - mean);
  return std::sqrt(var / static_cast<double>(patch.pixels.size()));
}

Image crop(const Image& src, int x0, int y0, int size) {
  Image out(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = src.at(x0 + x, y0 + y, c);
    }
  }
  return out;
}

}  // namespace

std::vector<GroundedSymbol> extract_templates(const Demonstration& demo,
                                              const ControllerLibrary& library,
                                              const CameraModel& camera,
                                              const ArmModel& arm,
                                              const GroundingConfig& cfg) {
  if (library.size() == 0) throw ConfigError("empty controller library");
  if (demo.steps.empty()) throw ConfigError("empty demonstration");
  if (cfg.patch_size > camera.image_width ||
      cfg.patch_size > camera.image_height) {
    throw ConfigError("patch size exceeds image size");
  }

  std::vector<GroundedSymbol> symbols;
  symbols.reserve(static_cast<std::size_t>(library.size()));
  for (int id = 0; id < library.size(); ++id) {
    const ControllerParams& c = library.at(id);
    const Vec2 goal_px = project(camera, forward_kinematics(arm, c.goal));
    if (goal_px.x() < 0 || goal_px.x() >= camera.image_width ||
        goal_px.y() < 0 || goal_px.y() >= camera.image_height) {
      throw GroundingFailure("goal of symbol " + std::to_string(id) +
                             " projects outside the image");
    }

    // Use the frame where the arm sits closest to this goal, i.e. where the
    // demonstration had converged on it.
    std::size_t best_t = 0;
    double best_d = std::numeric_limits<double>::max();
    for (std::size_t t = 0; t < demo.length(); ++t) {
      const double d = (demo.steps[t].theta - c.goal).norm();
      if (d < best_d) {
        best_d = d;
        best_t = t;
      }
    }
    const Image& frame = *demo.steps[best_t].image;

    const int half = cfg.patch_size / 2;
    int x0 = static_cast<int>(std::lround(goal_px.x())) - half;
    int y0 = static_cast<int>(std::lround(goal_px.y())) - half;
    x0 = std::clamp(x0, 0, frame.width - cfg.patch_size);
    y0 = std::clamp(y0, 0, frame.height - cfg.patch_size);

    GroundedSymbol gs;
    gs.symbol = id;
    gs.patch = crop(frame, x0, y0, cfg.patch_size);
    gs.demo_goal = c.goal;
    gs.gain = c.gain;
    gs.crop_origin = Vec2(x0, y0);
    gs.goal_offset = goal_px - gs.crop_origin;
    if (patch_std(gs.patch) <= cfg.min_patch_std) {
      throw GroundingFailure("template of symbol " + std::to_string(id) +
                             " has no visual structure");
    }
    symbols.push_back(std::move(gs));
  }
  return symbols;
}

MatchResult match_template(const Image& image, const Image& patch) {
  const int pw = patch.width;
  const int ph = patch.height;
  if (pw > image.width || ph > image.height) {
    throw DimensionError("template larger than search image");
  }
  const std::size_t m = patch.pixels.size();

  // Zero-mean template; the ZNCC numerator is then a plain dot product.
  double t_mean = 0.0;
  for (double v : patch.pixels) t_mean += v;
  t_mean /= static_cast<double>(m);
  std::vector<double> t0(m);
  double t_norm_sq = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    t0[i] = patch.pixels[i] - t_mean;
    t_norm_sq += t0[i] * t0[i];
  }
  const double t_norm = std::sqrt(t_norm_sq);
  if (t_norm <= 0.0) throw GroundingFailure("uniform template");

  // Channel-summed integral images give window sums and square sums in O(1).
  const int w = image.width;
  const int h = image.height;
  std::vector<double> s1(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
  std::vector<double> s2(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
  auto idx = [w](int x, int y) {
    return static_cast<std::size_t>(y) * (w + 1) + x;
  };
  for (int y = 0; y < h; ++y) {
    double row1 = 0.0;
    double row2 = 0.0;
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double v = image.at(x, y, c);
        row1 += v;
        row2 += v * v;
      }
      s1[idx(x + 1, y + 1)] = s1[idx(x + 1, y)] + row1;
      s2[idx(x + 1, y + 1)] = s2[idx(x + 1, y)] + row2;
    }
  }
  auto window_sums = [&](int x0, int y0, double& sum, double& sumsq) {
    sum = s1[idx(x0 + pw, y0 + ph)] - s1[idx(x0, y0 + ph)] -
          s1[idx(x0 + pw, y0)] + s1[idx(x0, y0)];
    sumsq = s2[idx(x0 + pw, y0 + ph)] - s2[idx(x0, y0 + ph)] -
            s2[idx(x0 + pw, y0)] + s2[idx(x0, y0)];
  };

  MatchResult best;
  best.score = -std::numeric_limits<double>::max();
  const int row_len = 3 * pw;
  for (int y0 = 0; y0 + ph <= h; ++y0) {
    for (int x0 = 0; x0 + pw <= w; ++x0) {
      double dot = 0.0;
      for (int r = 0; r < ph; ++r) {
        const double* img_row =
            &image.pixels[3 * (static_cast<std::size_t>(y0 + r) * w + x0)];
        const double* t_row = &t0[static_cast<std::size_t>(r) * row_len];
        for (int i = 0; i < row_len; ++i) dot += t_row[i] * img_row[i];
      }
      double sum, sumsq;
      window_sums(x0, y0, sum, sumsq);
      const double var = sumsq - sum * sum / static_cast<double>(m);
      const double score =
          var > 1e-12 ? dot / (t_norm * std::sqrt(var)) : 0.0;
      if (score > best.score) {
        best.score = score;
        best.top_left = Vec2(x0, y0);
      }
    }
  }
  return best;
}

JointState predict_goal(const GroundedSymbol& symbol, const Image& new_image,
                        const CameraModel& camera, const ArmModel& arm,
                        const JointState& seed, const GroundingConfig& cfg) {
  const MatchResult match = match_template(new_image, symbol.patch);
  if (match.score < cfg.ncc_threshold) {
    throw MatchNotFoundError("symbol " + std::to_string(symbol.symbol) +
                             ": best NCC " + std::to_string(match.score) +
                             " below threshold");
  }
  const Vec2 goal_px = match.top_left + symbol.goal_offset;
  const Vec2 target = unproject(camera, goal_px);
  return inverse_kinematics(arm, target, seed);
}

ControllerLibrary reground_library(const std::vector<GroundedSymbol>& symbols,
                                   const Image& new_image,
                                   const CameraModel& camera,
                                   const ArmModel& arm,
                                   const GroundingConfig& cfg) {
  ControllerLibrary library;
  library.controllers.resize(symbols.size());
  std::vector<int> failed;
  for (const auto& gs : symbols) {
    try {
      ControllerParams c;
      c.goal = predict_goal(gs, new_image, camera, arm, gs.demo_goal, cfg);
      c.gain = gs.gain;
      library.controllers[static_cast<std::size_t>(gs.symbol)] = std::move(c);
    } catch (const GroundingFailure&) {
      failed.push_back(gs.symbol);
    } catch (const NumericalError&) {
      failed.push_back(gs.symbol);
    }
  }
  if (!failed.empty()) {
    std::string msg = "regrounding failed for symbols:";
    for (int id : failed) msg += " " + std::to_string(id);
    throw PartialGroundingError(msg, std::move(failed));
  }
  return library;
}

void save_templates(const std::vector<GroundedSymbol>& symbols,
                    const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  CsvWriter csv((fs::path(dir) / "templates.csv").string());
  const int dim =
      symbols.empty() ? 0 : static_cast<int>(symbols.front().demo_goal.size());
  std::vector<std::string> header{"symbol"};
  for (int j = 0; j < dim; ++j) header.push_back("goal_" + std::to_string(j));
  header.insert(header.end(),
                {"gain", "crop_x", "crop_y", "offset_x", "offset_y"});
  csv.row(header);
  for (const auto& gs : symbols) {
    csv.begin_row();
    csv.field(gs.symbol);
    for (int j = 0; j < dim; ++j) csv.field(gs.demo_goal[j]);
    csv.field(gs.gain);
    csv.field(gs.crop_origin.x());
    csv.field(gs.crop_origin.y());
    csv.field(gs.goal_offset.x());
    csv.field(gs.goal_offset.y());
    csv.end_row();
    write_ppm(gs.patch, (fs::path(dir) /
                         ("template_" + std::to_string(gs.symbol) + ".ppm"))
                            .string());
  }
}

std::vector<GroundedSymbol> load_templates(const std::string& dir) {
  namespace fs = std::filesystem;
  const CsvTable table = read_csv((fs::path(dir) / "templates.csv").string());
  if (table.header.size() < 6 || table.header.front() != "symbol") {
    throw ConfigError("unexpected template manifest header");
  }
  const int dim = static_cast<int>(table.header.size()) - 6;
  std::vector<GroundedSymbol> symbols;
  for (const auto& row : table.rows) {
    GroundedSymbol gs;
    gs.symbol = static_cast<int>(row[0]);
    gs.demo_goal.resize(dim);
    for (int j = 0; j < dim; ++j) {
      gs.demo_goal[j] = row[static_cast<std::size_t>(1 + j)];
    }
    const std::size_t base = static_cast<std::size_t>(1 + dim);
    gs.gain = row[base];
    gs.crop_origin = Vec2(row[base + 1], row[base + 2]);
    gs.goal_offset = Vec2(row[base + 3], row[base + 4]);
    gs.patch = read_ppm(
        (fs::path(dir) / ("template_" + std::to_string(gs.symbol) + ".ppm"))
            .string());
    symbols.push_back(std::move(gs));
  }
  return symbols;
}

}  // namespace demo2prog
