#include "demo2prog/controller.hpp"

#include <string>

#include "demo2prog/errors.hpp"

namespace demo2prog {

void ControllerParams::validate() const {
  if (gain <= 0.0) throw ConfigError("controller gain must be positive");
  if (!goal.allFinite()) throw ConfigError("controller goal must be finite");
}

const ControllerParams& ControllerLibrary::at(int symbol) const {
  if (symbol < 0 || symbol >= size()) {
    throw ConfigError("unknown controller symbol " + std::to_string(symbol));
  }
  return controllers[static_cast<std::size_t>(symbol)];
}

void ControllerLibrary::validate() const {
  for (const auto& c : controllers) c.validate();
}

ControlSignal control_step(const JointState& theta,
                           const ControllerParams& c) {
  if (theta.size() != c.goal.size()) {
    throw DimensionError("joint state and goal dimensions differ");
  }
  return c.gain * (c.goal - theta);
}

Rollout rollout(const JointState& theta0, const ControllerParams& c, double dt,
                int steps) {
  if (dt * c.gain >= 2.0) {
    throw StabilityError("unstable rollout: dt * gain must be < 2");
  }
  Rollout r;
  r.states.reserve(static_cast<std::size_t>(steps) + 1);
  r.controls.reserve(static_cast<std::size_t>(steps));
  JointState theta = theta0;
  r.states.push_back(theta);
  for (int t = 0; t < steps; ++t) {
    const ControlSignal u = control_step(theta, c);
    theta += dt * u;
    r.controls.push_back(u);
    r.states.push_back(theta);
  }
  return r;
}

}  // namespace demo2prog
