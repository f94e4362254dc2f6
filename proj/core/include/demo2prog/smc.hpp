#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "demo2prog/arm.hpp"
#include "demo2prog/controller.hpp"
#include "demo2prog/demonstration.hpp"
#include "demo2prog/rng.hpp"
#include "demo2prog/saliency.hpp"

namespace demo2prog {

/// Switching proportional-controller model parameters.
struct GenerativeModelConfig {
  double p_switch = 0.1;   // per-step probability of a controller switch
  double q_theta = 0.02;   // goal jitter std per joint (rad)
  double q_kp = 0.05;      // gain jitter std (1/s)
  double r = 0.05;         // control noise std per joint (rad/s)
  int particles = 50;      // N
  int window = 100;        // future-window length M (timesteps)
  double gain_floor = 0.05;
  double init_gain_min = 0.5;
  double init_gain_max = 4.0;
  // Switching particles redraw their gain uniformly from the init range
  // instead of jittering the parent gain. A switch hypothesis then carries a
  // fresh (goal, gain) pair, which re-anchors the filter within a few steps
  // when goals come from a sharp prior; inherited gains stall it on the
  // goal-gain tradeoff manifold whenever controllers use distinct gains.
  bool resample_switch_gain = true;

  void validate() const;
};

struct Particle {
  ControllerParams params;
  double weight = 0.0;
};

struct ParticleSet {
  std::vector<Particle> particles;
  bool normalized = false;

  std::vector<double> weights() const;
  /// Throws ContractViolation unless normalized and summing to 1 +- 1e-9.
  void check_normalized() const;
};

/// Isotropic Gaussian density of the observed control under the particle's
/// proportional law: N(u_obs; gain * (goal - theta), r^2 I).
double control_likelihood(const ControlSignal& u_obs, const JointState& theta,
                          const ControllerParams& params, double r);
double control_log_likelihood(const ControlSignal& u_obs,
                              const JointState& theta,
                              const ControllerParams& params, double r);

/// 1 / sum(w^2) for normalized weights. Throws ContractViolation on
/// unnormalized input.
double effective_sample_size(const std::vector<double>& weights);

struct PriorSampleResult {
  std::vector<JointState> goals;
  bool used_fallback = false;  // saliency was zero across the whole window
};

/// Goal proposals for a switch at timestep t: a pool of uniform draws from
/// the future demonstration window, weighted by saliency at their projected
/// end-effector pixel, then `count` goals resampled from the pool and
/// jittered. The pool is at least as large as `count` (N_p draws in the
/// usual configuration, one per particle).
PriorSampleResult attribution_prior_sample(const Demonstration& demo,
                                           std::size_t t,
                                           const SaliencyMap& saliency,
                                           const ArmModel& arm,
                                           const CameraModel& camera,
                                           int count, double jitter_std,
                                           int window, Rng& rng,
                                           int pool = 0);

/// Switching-goal proposal distribution used by sis_step.
class GoalPrior {
 public:
  virtual ~GoalPrior() = default;
  virtual std::vector<JointState> sample(std::size_t t, int count,
                                         Rng& rng) = 0;
  virtual std::string name() const = 0;
};

/// Per-timestep saliency source (static maps return the same pointer).
using SaliencyProvider =
    std::function<std::shared_ptr<const SaliencyMap>(std::size_t)>;

std::unique_ptr<GoalPrior> make_attribution_prior(
    const Demonstration& demo, SaliencyProvider saliency, const ArmModel& arm,
    const CameraModel& camera, const GenerativeModelConfig& cfg);

/// Draws directly from the future window, no saliency weighting.
std::unique_ptr<GoalPrior> make_baseline_prior(
    const Demonstration& demo, const GenerativeModelConfig& cfg);

struct SisStepResult {
  ParticleSet posterior;  // post-weight, pre-resample
  ParticleSet resampled;  // N particles, uniform weights
  double n_eff = 0.0;
  ControllerParams map;
};

/// One importance-sampling step: a deterministic continuation/switch split,
/// likelihood weighting (computed in log space), N_eff, MAP extraction and
/// systematic resampling.
SisStepResult sis_step(const ParticleSet& prev, const JointState& theta,
                       const ControlSignal& u_obs,
                       const GenerativeModelConfig& cfg, GoalPrior& prior,
                       std::size_t t, Rng& rng, int threads = 1);

/// Systematic (low-variance) resampling to `count` particles.
std::vector<std::size_t> systematic_resample(const std::vector<double>& weights,
                                             std::size_t count, Rng& rng);

struct InferenceStep {
  ParticleSet snapshot;  // pre-resample
  double n_eff = 0.0;
  ControllerParams map;
};

struct InferenceTrace {
  std::vector<InferenceStep> steps;

  std::vector<double> neff_series() const;
  std::vector<ControllerParams> map_series() const;
};

InferenceTrace run_inference(const Demonstration& demo,
                             const GenerativeModelConfig& cfg,
                             GoalPrior& prior, Rng& rng, int threads = 1);

struct NeffStats {
  double mean = 0.0;
  double max = 0.0;
  double min = 0.0;
  double iqr = 0.0;
};

NeffStats neff_statistics(const std::vector<double>& neff);

/// Linear-interpolation quantile of an unsorted sample.
double quantile(std::vector<double> values, double q);

/// Rows: timestep, N_eff, MAP goal angles, MAP gain.
void write_trace_csv(const InferenceTrace& trace, const std::string& path);

}  // namespace demo2prog
