#include "demo2prog/demonstration.hpp"

#include <fstream>
#include <sstream>

#include "demo2prog/csv.hpp"
#include "demo2prog/errors.hpp"

namespace demo2prog {

void Demonstration::validate() const {
  if (steps.size() < 2) {
    throw ConfigError("demonstration must have at least 2 timesteps");
  }
  if (dt <= 0.0) throw ConfigError("demonstration dt must be positive");
  const auto dim = steps.front().theta.size();
  for (const auto& s : steps) {
    if (s.theta.size() != dim || s.u.size() != dim) {
      throw ConfigError("inconsistent joint dimensions in demonstration");
    }
  }
}

std::vector<std::size_t> GeneratedDemonstration::switch_times() const {
  std::vector<std::size_t> times;
  for (std::size_t i = 1; i < segments.size(); ++i) {
    times.push_back(segments[i].start);
  }
  return times;
}

std::vector<int> GeneratedDemonstration::symbol_trace() const {
  std::vector<int> symbols;
  symbols.reserve(segments.size());
  for (const auto& seg : segments) symbols.push_back(seg.symbol);
  return symbols;
}

GeneratedDemonstration generate_demonstration(const Program& program,
                                              const ControllerLibrary& library,
                                              const JointState& theta0,
                                              const Scene& scene,
                                              const CameraModel& camera,
                                              const DemoConfig& cfg) {
  library.validate();
  if (cfg.dt <= 0.0) throw ConfigError("dt must be positive");

  // Static scenes share a single rendered frame across every step.
  auto frame = std::make_shared<const Image>(render(scene, camera));

  GeneratedDemonstration out;
  out.demo.dt = cfg.dt;
  JointState theta = theta0;
  for (int symbol : expand(program)) {
    const ControllerParams& c = library.at(symbol);
    if (cfg.dt * c.gain >= 2.0) {
      throw StabilityError("unstable controller in demonstration");
    }
    SegmentRecord seg{symbol, out.demo.steps.size(), 0};
    do {
      const ControlSignal u = control_step(theta, c);
      out.demo.steps.push_back({theta, u, frame});
      theta += cfg.dt * u;
    } while ((theta - c.goal).norm() >= cfg.convergence_eps);
    seg.end = out.demo.steps.size();
    out.segments.push_back(seg);
  }
  return out;
}

ExecutionResult execute_program(const Program& program,
                                const ControllerLibrary& grounded,
                                const JointState& theta0,
                                const DemoConfig& cfg) {
  grounded.validate();
  ExecutionResult out;
  JointState theta = theta0;
  for (int symbol : expand(program)) {
    const ControllerParams& c = grounded.at(symbol);
    if (cfg.dt * c.gain >= 2.0) {
      throw StabilityError("unstable controller in program execution");
    }
    out.visited_symbols.push_back(symbol);
    do {
      out.trajectory.push_back(theta);
      theta += cfg.dt * control_step(theta, c);
    } while ((theta - c.goal).norm() >= cfg.convergence_eps);
    out.segment_endpoints.push_back(theta);
  }
  return out;
}

std::vector<int> fsm_symbol_trace(const std::vector<int>& state_explanation,
                                  int symbol_count) {
  if (state_explanation.size() < 2) {
    throw ConfigError("state_explanation needs at least 2 entries");
  }
  const int last = static_cast<int>(state_explanation.size()) - 1;
  std::vector<int> trace;
  trace.reserve(static_cast<std::size_t>(symbol_count));
  int state = 0;
  int step = 1;
  for (int i = 0; i < symbol_count; ++i) {
    state += step;
    if (state == last) step = -1;
    if (state == 0) step = 1;
    trace.push_back(state_explanation[static_cast<std::size_t>(state)]);
  }
  return trace;
}

void write_demo_csv(const Demonstration& demo, const std::string& path) {
  CsvWriter csv(path);
  const int dim = demo.joint_count();
  std::vector<std::string> header{"t"};
  for (int j = 0; j < dim; ++j) header.push_back("theta_" + std::to_string(j));
  for (int j = 0; j < dim; ++j) header.push_back("u_" + std::to_string(j));
  csv.row(header);
  for (std::size_t t = 0; t < demo.steps.size(); ++t) {
    csv.begin_row();
    csv.field(t);
    for (int j = 0; j < dim; ++j) csv.field(demo.steps[t].theta[j]);
    for (int j = 0; j < dim; ++j) csv.field(demo.steps[t].u[j]);
    csv.end_row();
  }
}

Demonstration read_demo_csv(const std::string& path, double dt) {
  const CsvTable table = read_csv(path);
  if (table.header.empty() || table.header.front() != "t") {
    throw ConfigError("demonstration CSV missing 't' column: " + path);
  }
  const std::size_t cols = table.header.size();
  if (cols < 3 || (cols - 1) % 2 != 0) {
    throw ConfigError("demonstration CSV needs theta_*/u_* column pairs");
  }
  const int dim = static_cast<int>((cols - 1) / 2);
  Demonstration demo;
  demo.dt = dt;
  for (const auto& row : table.rows) {
    DemoStep step;
    step.theta.resize(dim);
    step.u.resize(dim);
    for (int j = 0; j < dim; ++j) {
      step.theta[j] = row[static_cast<std::size_t>(1 + j)];
      step.u[j] = row[static_cast<std::size_t>(1 + dim + j)];
    }
    demo.steps.push_back(std::move(step));
  }
  return demo;
}

}  // namespace demo2prog
