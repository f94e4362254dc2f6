#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "demo2prog/arm.hpp"
#include "demo2prog/controller.hpp"
#include "demo2prog/demonstration.hpp"
#include "demo2prog/grounding.hpp"
#include "demo2prog/scene.hpp"
#include "demo2prog/smc.hpp"
#include "demo2prog/symbolizer.hpp"

namespace demo2prog {

struct MicroNetConfig {
  int input_width = 32;
  int input_height = 24;
  std::vector<int> hidden = {64, 32};
  int epochs = 300;
  double learning_rate = 1e-2;
  int dataset_samples = 1700;
  double dataset_gain = 2.0;
};

enum class SaliencySource { kOracle, kMicronet };

struct SaliencyConfig {
  SaliencySource source = SaliencySource::kOracle;
  double sigma_px = 8.0;
};

struct EvalConfig {
  int table1_seeds = 10;
  int generalization_scenes = 400;
};

/// One config file drives every pipeline stage; sections mirror the module
/// configs and anything omitted keeps its default.
struct PipelineConfig {
  std::uint64_t seed = 12345;
  int threads = 1;

  ArmModel arm;
  CameraModel camera;
  Scene scene;

  JointState initial_state;
  ControllerLibrary library;
  DemoConfig demo;
  // Demonstration source: either a reversing state machine over
  // `state_explanation` truncated to `fsm_symbols`, or an explicit program.
  std::optional<std::vector<int>> fsm_state_explanation;
  int fsm_symbols = 65;
  std::optional<std::string> program_text;

  MicroNetConfig micronet;
  SaliencyConfig saliency;
  GenerativeModelConfig smc;
  PeakConfig peaks;
  int cluster_k_max = 10;
  GroundingConfig grounding;
  std::optional<Scene> synth_scene;
  EvalConfig eval;

  /// The symbol trace the demonstration executes.
  std::vector<int> demo_trace() const;
  void validate() const;
};

/// Parse a JSON config file. Malformed JSON and bad values raise ConfigError
/// with the offending line number.
PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(const std::string& json_text,
                            const std::string& origin = "<config>");

}  // namespace demo2prog
