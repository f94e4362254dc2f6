#include "dataset.hpp"

#include <cmath>

#include "demo2prog/errors.hpp"

namespace demo2prog {

namespace {

// Uniform position in the reachable annulus, kept inside the frame with
// enough margin to crop a template around it.
Vec2 sample_position(const ArmModel& arm, const CameraModel& camera,
                     double half_extent, Rng& rng) {
  const double r_lo = std::max(arm.min_reach(), 0.2);
  const double r_hi = arm.reach() - 0.2;
  if (r_hi <= r_lo) throw ConfigError("arm reach too small for scene layout");
  const double margin_px = 22.0 + half_extent * camera.pixels_per_unit;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const double r =
        std::sqrt(unit(rng) * (r_hi * r_hi - r_lo * r_lo) + r_lo * r_lo);
    const double phi = angle(rng);
    const Vec2 p = arm.base_position + r * Vec2(std::cos(phi), std::sin(phi));
    const Vec2 px = project(camera, p);
    if (px.x() >= margin_px && px.x() <= camera.image_width - margin_px &&
        px.y() >= margin_px && px.y() <= camera.image_height - margin_px) {
      return p;
    }
  }
  throw ConfigError("could not place an object inside frame and reach");
}

}  // namespace

Scene randomize_scene(const Scene& base, const ArmModel& arm,
                      const CameraModel& camera, Rng& rng) {
  Scene out;
  for (const auto& obj : base.objects) {
    SceneObject moved = obj;
    bool placed = false;
    for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
      moved.center = sample_position(arm, camera, obj.half_extent, rng);
      placed = true;
      for (const auto& other : out.objects) {
        const double min_sep =
            std::max(2.2 * (obj.half_extent + other.half_extent), 1.5);
        if ((moved.center - other.center).norm() < min_sep) {
          placed = false;
          break;
        }
      }
    }
    if (!placed) throw ConfigError("scene too crowded to randomize");
    out.objects.push_back(moved);
  }
  return out;
}

ReachingDataset make_reaching_dataset(const MicroNet& net,
                                      const PipelineConfig& cfg, int samples,
                                      Rng& rng) {
  if (samples < 1) throw ConfigError("dataset needs at least one sample");
  ReachingDataset data;
  data.inputs.resize(samples, net.input_dim());
  data.targets.resize(samples, net.joint_dim);

  const std::array<std::array<double, 3>, 5> palette{{{1, 0, 0},
                                                      {0, 1, 0},
                                                      {0, 0, 1},
                                                      {1, 1, 0},
                                                      {1, 0, 1}}};
  std::uniform_int_distribution<std::size_t> pick_color(0, palette.size() - 1);
  std::uniform_real_distribution<double> pick_theta(-1.5, 1.5);
  const double he = cfg.scene.objects.empty()
                        ? 0.35
                        : cfg.scene.objects.front().half_extent;

  int row = 0;
  while (row < samples) {
    Scene scene;
    scene.objects.push_back(
        {0, palette[pick_color(rng)],
         sample_position(cfg.arm, cfg.camera, he, rng), he});
    JointState theta(net.joint_dim);
    for (int j = 0; j < net.joint_dim; ++j) theta[j] = pick_theta(rng);
    JointState goal;
    try {
      goal = inverse_kinematics(cfg.arm, scene.objects[0].center, theta);
    } catch (const NumericalError&) {
      continue;  // rare IK miss; redraw the sample
    }
    const Image frame = render(scene, cfg.camera);
    data.inputs.row(row) = net_input(net, frame, theta).transpose();
    data.targets.row(row) =
        (cfg.micronet.dataset_gain * (goal - theta)).transpose();
    ++row;
  }
  return data;
}

}  // namespace demo2prog
