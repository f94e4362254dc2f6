#pragma once

#include <vector>

#include "demo2prog/arm.hpp"

namespace demo2prog {

/// One motion primitive: a joint-space goal driven by a proportional law
/// u = gain * (goal - theta), gain > 0.
struct ControllerParams {
  JointState goal;
  double gain = 1.0;

  void validate() const;
};

/// Controllers addressed by dense symbol ids 0..size()-1.
struct ControllerLibrary {
  std::vector<ControllerParams> controllers;

  int size() const { return static_cast<int>(controllers.size()); }
  const ControllerParams& at(int symbol) const;
  void validate() const;
};

ControlSignal control_step(const JointState& theta, const ControllerParams& c);

struct Rollout {
  std::vector<JointState> states;     // length steps + 1
  std::vector<ControlSignal> controls;  // length steps
};

/// Forward-Euler integration of the proportional law for a fixed number of
/// steps. Requires dt * gain < 2 so the goal error contracts.
Rollout rollout(const JointState& theta0, const ControllerParams& c, double dt,
                int steps);

}  // namespace demo2prog
