#pragma once

#include <memory>
#include <string>
#include <vector>

#include "demo2prog/arm.hpp"
#include "demo2prog/controller.hpp"
#include "demo2prog/image.hpp"
#include "demo2prog/program.hpp"
#include "demo2prog/scene.hpp"

namespace demo2prog {

struct DemoStep {
  JointState theta;
  ControlSignal u;
  std::shared_ptr<const Image> image;  // shared across steps when the scene
                                       // is static
};

struct Demonstration {
  std::vector<DemoStep> steps;
  double dt = 0.05;

  std::size_t length() const { return steps.size(); }
  int joint_count() const {
    return steps.empty() ? 0 : static_cast<int>(steps.front().theta.size());
  }
  void validate() const;
};

/// Generator-side ground truth: which symbol produced steps
/// [start, end) of the demonstration.
struct SegmentRecord {
  int symbol = 0;
  std::size_t start = 0;
  std::size_t end = 0;
};

struct GeneratedDemonstration {
  Demonstration demo;
  std::vector<SegmentRecord> segments;

  /// Timesteps at which a new controller took over (start of every segment
  /// after the first).
  std::vector<std::size_t> switch_times() const;
  std::vector<int> symbol_trace() const;
};

struct DemoConfig {
  double dt = 0.05;
  double convergence_eps = 0.01;  // rad
};

/// Execute the expanded program with proportional controllers, recording
/// (theta, u, image) at every step. Each symbol records at least one step
/// and runs until ||theta - goal|| < convergence_eps.
GeneratedDemonstration generate_demonstration(
    const Program& program, const ControllerLibrary& library,
    const JointState& theta0, const Scene& scene, const CameraModel& camera,
    const DemoConfig& cfg = {});

struct ExecutionResult {
  std::vector<JointState> trajectory;
  std::vector<int> visited_symbols;  // realized execution order
  std::vector<JointState> segment_endpoints;  // state when each symbol
                                              // converged
};

/// Same control loop as generate_demonstration, without image recording.
ExecutionResult execute_program(const Program& program,
                                const ControllerLibrary& grounded,
                                const JointState& theta0,
                                const DemoConfig& cfg = {});

/// Symbol trace emitted by the reversing state machine that drives the
/// reference reaching demonstration: the walk bounces between the ends of
/// `state_explanation` and each visited state indexes into it.
std::vector<int> fsm_symbol_trace(const std::vector<int>& state_explanation,
                                  int symbol_count);

// Demonstration CSV: header "t,theta_0..,u_0..", one row per timestep.
void write_demo_csv(const Demonstration& demo, const std::string& path);
Demonstration read_demo_csv(const std::string& path, double dt);

}  // namespace demo2prog
