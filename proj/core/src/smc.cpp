#include "demo2prog/smc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "demo2prog/csv.hpp"
#include "demo2prog/errors.hpp"
#include "demo2prog/parallel.hpp"

namespace demo2prog {

void GenerativeModelConfig::validate() const {
  if (p_switch <= 0.0 || p_switch >= 1.0) {
    throw ConfigError("p_switch must lie in (0,1)");
  }
  if (q_theta <= 0.0 || q_kp <= 0.0 || r <= 0.0) {
    throw ConfigError("model noise stds must be positive");
  }
  if (particles < 2) throw ConfigError("particle count must be >= 2");
  if (window < 1) throw ConfigError("future window must be >= 1");
}

std::vector<double> ParticleSet::weights() const {
  std::vector<double> w;
  w.reserve(particles.size());
  for (const auto& p : particles) w.push_back(p.weight);
  return w;
}

void ParticleSet::check_normalized() const {
  if (!normalized) throw ContractViolation("particle set not normalized");
  double sum = 0.0;
  for (const auto& p : particles) sum += p.weight;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ContractViolation("particle weights sum to " +
                            std::to_string(sum));
  }
}

double control_log_likelihood(const ControlSignal& u_obs,
                              const JointState& theta,
                              const ControllerParams& params, double r) {
  if (u_obs.size() != theta.size() || theta.size() != params.goal.size()) {
    throw DimensionError("control likelihood dimension mismatch");
  }
  const double j = static_cast<double>(u_obs.size());
  const double sq = (u_obs - control_step(theta, params)).squaredNorm();
  return -0.5 * j * std::log(2.0 * M_PI * r * r) - sq / (2.0 * r * r);
}

double control_likelihood(const ControlSignal& u_obs, const JointState& theta,
                          const ControllerParams& params, double r) {
  return std::exp(control_log_likelihood(u_obs, theta, params, r));
}

double effective_sample_size(const std::vector<double>& weights) {
  if (weights.empty()) throw ContractViolation("empty weight vector");
  double sum = 0.0;
  double sumsq = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w)) {
      throw ContractViolation("weights must be finite and non-negative");
    }
    sum += w;
    sumsq += w * w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ContractViolation("weights are not normalized");
  }
  return 1.0 / sumsq;
}

std::vector<std::size_t> systematic_resample(const std::vector<double>& weights,
                                             std::size_t count, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double offset = unit(rng);
  std::vector<std::size_t> picks;
  picks.reserve(count);
  double cumulative = weights.empty() ? 0.0 : weights[0];
  std::size_t idx = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double u = (static_cast<double>(i) + offset) / count;
    while (u > cumulative && idx + 1 < weights.size()) {
      ++idx;
      cumulative += weights[idx];
    }
    picks.push_back(idx);
  }
  return picks;
}

namespace {

std::size_t window_end(std::size_t t, int window, std::size_t demo_len) {
  return std::min(t + static_cast<std::size_t>(window), demo_len - 1);
}

JointState jitter_vector(Eigen::Index dim, double std_dev, Rng& rng) {
  std::normal_distribution<double> dist(0.0, std_dev);
  JointState v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = dist(rng);
  return v;
}

}  // namespace

PriorSampleResult attribution_prior_sample(const Demonstration& demo,
                                           std::size_t t,
                                           const SaliencyMap& saliency,
                                           const ArmModel& arm,
                                           const CameraModel& camera,
                                           int count, double jitter_std,
                                           int window, Rng& rng, int pool) {
  if (demo.steps.empty()) throw ConfigError("empty demonstration");
  if (t >= demo.length()) throw ContractViolation("timestep out of range");
  const std::size_t hi = window_end(t, window, demo.length());
  std::uniform_int_distribution<std::size_t> pick(t, hi);

  const int n_pool = std::max(pool, count);
  std::vector<JointState> candidates;
  std::vector<double> weights;
  candidates.reserve(static_cast<std::size_t>(n_pool));
  weights.reserve(static_cast<std::size_t>(n_pool));
  for (int k = 0; k < n_pool; ++k) {
    const JointState& cand = demo.steps[pick(rng)].theta;
    Vec2 px = project(camera, forward_kinematics(arm, cand));
    // Goals may project outside the frame; clamp before the lookup.
    px.x() = std::clamp(px.x(), 0.0, camera.image_width - 1.0);
    px.y() = std::clamp(px.y(), 0.0, camera.image_height - 1.0);
    candidates.push_back(cand);
    weights.push_back(saliency.sample_full(px.x(), px.y(), camera.image_width,
                                           camera.image_height));
  }

  PriorSampleResult result;
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (total <= 0.0) {
    result.used_fallback = true;
    std::fill(weights.begin(), weights.end(),
              1.0 / static_cast<double>(n_pool));
  } else {
    for (double& w : weights) w /= total;
  }

  const auto picks =
      systematic_resample(weights, static_cast<std::size_t>(count), rng);
  result.goals.reserve(picks.size());
  for (std::size_t idx : picks) {
    result.goals.push_back(
        candidates[idx] +
        jitter_vector(candidates[idx].size(), jitter_std, rng));
  }
  return result;
}

namespace {

class AttributionPrior final : public GoalPrior {
 public:
  AttributionPrior(const Demonstration& demo, SaliencyProvider saliency,
                   const ArmModel& arm, const CameraModel& camera,
                   const GenerativeModelConfig& cfg)
      : demo_(demo),
        saliency_(std::move(saliency)),
        arm_(arm),
        camera_(camera),
        cfg_(cfg) {}

  std::vector<JointState> sample(std::size_t t, int count, Rng& rng) override {
    const std::shared_ptr<const SaliencyMap> map = saliency_(t);
    auto result = attribution_prior_sample(demo_, t, *map, arm_, camera_,
                                           count, cfg_.q_theta, cfg_.window,
                                           rng, cfg_.particles);
    if (result.used_fallback) ++fallback_count_;
    return std::move(result.goals);
  }

  std::string name() const override { return "attribution"; }

 private:
  const Demonstration& demo_;
  SaliencyProvider saliency_;
  ArmModel arm_;
  CameraModel camera_;
  GenerativeModelConfig cfg_;
  std::size_t fallback_count_ = 0;
};

class BaselinePrior final : public GoalPrior {
 public:
  BaselinePrior(const Demonstration& demo, const GenerativeModelConfig& cfg)
      : demo_(demo), cfg_(cfg) {}

  std::vector<JointState> sample(std::size_t t, int count, Rng& rng) override {
    const std::size_t hi = window_end(t, cfg_.window, demo_.length());
    std::uniform_int_distribution<std::size_t> pick(t, hi);
    std::vector<JointState> goals;
    goals.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
      const JointState& cand = demo_.steps[pick(rng)].theta;
      goals.push_back(cand + jitter_vector(cand.size(), cfg_.q_theta, rng));
    }
    return goals;
  }

  std::string name() const override { return "baseline"; }

 private:
  const Demonstration& demo_;
  GenerativeModelConfig cfg_;
};

}  // namespace

std::unique_ptr<GoalPrior> make_attribution_prior(
    const Demonstration& demo, SaliencyProvider saliency, const ArmModel& arm,
    const CameraModel& camera, const GenerativeModelConfig& cfg) {
  return std::make_unique<AttributionPrior>(demo, std::move(saliency), arm,
                                            camera, cfg);
}

std::unique_ptr<GoalPrior> make_baseline_prior(
    const Demonstration& demo, const GenerativeModelConfig& cfg) {
  return std::make_unique<BaselinePrior>(demo, cfg);
}

SisStepResult sis_step(const ParticleSet& prev, const JointState& theta,
                       const ControlSignal& u_obs,
                       const GenerativeModelConfig& cfg, GoalPrior& prior,
                       std::size_t t, Rng& rng, int threads) {
  const std::size_t n = static_cast<std::size_t>(cfg.particles);
  if (prev.particles.size() != n) {
    throw ContractViolation("particle count mismatch");
  }
  // Deterministic allocation of the Bernoulli switch: the first
  // ceil((1-p)N) particles continue, the rest propose a switch.
  const std::size_t n_cont = static_cast<std::size_t>(
      std::ceil((1.0 - cfg.p_switch) * static_cast<double>(n)));

  // All randomness drawn sequentially up front so the likelihood loop can
  // run on any number of workers with identical results.
  std::vector<ControllerParams> proposed(n);
  for (std::size_t k = 0; k < n_cont; ++k) {
    const auto& parent = prev.particles[k].params;
    ControllerParams p;
    p.goal = parent.goal + jitter_vector(parent.goal.size(), cfg.q_theta, rng);
    std::normal_distribution<double> gain_jitter(0.0, cfg.q_kp);
    p.gain = std::max(cfg.gain_floor, parent.gain + gain_jitter(rng));
    proposed[k] = std::move(p);
  }
  const auto switch_goals =
      prior.sample(t, static_cast<int>(n - n_cont), rng);
  for (std::size_t k = n_cont; k < n; ++k) {
    const auto& parent = prev.particles[k].params;
    ControllerParams p;
    p.goal = switch_goals[k - n_cont];
    if (cfg.resample_switch_gain) {
      std::uniform_real_distribution<double> fresh(cfg.init_gain_min,
                                                   cfg.init_gain_max);
      p.gain = fresh(rng);
    } else {
      std::normal_distribution<double> gain_jitter(0.0, cfg.q_kp);
      p.gain = std::max(cfg.gain_floor, parent.gain + gain_jitter(rng));
    }
    proposed[k] = std::move(p);
  }

  std::vector<double> log_like(n);
  parallel_for(n, threads, [&](std::size_t k) {
    log_like[k] = control_log_likelihood(u_obs, theta, proposed[k], cfg.r);
  });

  // Log-sum-exp normalization keeps weights usable even when every raw
  // likelihood underflows at a hard switch.
  const double max_log = *std::max_element(log_like.begin(), log_like.end());
  if (!std::isfinite(max_log)) throw DegenerateWeightsError(t);
  std::vector<double> weights(n);
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    weights[k] = std::exp(log_like[k] - max_log);
    sum += weights[k];
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) throw DegenerateWeightsError(t);

  SisStepResult result;
  result.posterior.particles.resize(n);
  std::size_t best = 0;
  for (std::size_t k = 0; k < n; ++k) {
    weights[k] /= sum;
    result.posterior.particles[k] = {proposed[k], weights[k]};
    if (weights[k] > weights[best]) best = k;
  }
  result.posterior.normalized = true;
  result.n_eff = effective_sample_size(weights);
  result.map = proposed[best];

  const auto picks = systematic_resample(weights, n, rng);
  result.resampled.particles.reserve(n);
  for (std::size_t idx : picks) {
    result.resampled.particles.push_back(
        {proposed[idx], 1.0 / static_cast<double>(n)});
  }
  result.resampled.normalized = true;
  return result;
}

InferenceTrace run_inference(const Demonstration& demo,
                             const GenerativeModelConfig& cfg,
                             GoalPrior& prior, Rng& rng, int threads) {
  cfg.validate();
  if (demo.steps.empty()) throw ConfigError("empty demonstration");

  // Initial particle cloud: switching proposals at t=0, gains uniform.
  ParticleSet current;
  current.particles.resize(static_cast<std::size_t>(cfg.particles));
  const auto goals = prior.sample(0, cfg.particles, rng);
  std::uniform_real_distribution<double> gain_dist(cfg.init_gain_min,
                                                   cfg.init_gain_max);
  for (std::size_t k = 0; k < current.particles.size(); ++k) {
    current.particles[k].params.goal = goals[k];
    current.particles[k].params.gain = gain_dist(rng);
    current.particles[k].weight = 1.0 / cfg.particles;
  }
  current.normalized = true;

  InferenceTrace trace;
  trace.steps.reserve(demo.length());
  for (std::size_t t = 0; t < demo.length(); ++t) {
    auto step = sis_step(current, demo.steps[t].theta, demo.steps[t].u, cfg,
                         prior, t, rng, threads);
    trace.steps.push_back(
        {std::move(step.posterior), step.n_eff, std::move(step.map)});
    current = std::move(step.resampled);
  }
  return trace;
}

std::vector<double> InferenceTrace::neff_series() const {
  std::vector<double> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.n_eff);
  return out;
}

std::vector<ControllerParams> InferenceTrace::map_series() const {
  std::vector<ControllerParams> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.map);
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ContractViolation("quantile of empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

NeffStats neff_statistics(const std::vector<double>& neff) {
  if (neff.empty()) throw ContractViolation("empty N_eff series");
  NeffStats stats;
  stats.mean = std::accumulate(neff.begin(), neff.end(), 0.0) /
               static_cast<double>(neff.size());
  stats.max = *std::max_element(neff.begin(), neff.end());
  stats.min = *std::min_element(neff.begin(), neff.end());
  stats.iqr = quantile(neff, 0.75) - quantile(neff, 0.25);
  return stats;
}

void write_trace_csv(const InferenceTrace& trace, const std::string& path) {
  CsvWriter csv(path);
  const int dim = trace.steps.empty()
                      ? 0
                      : static_cast<int>(trace.steps.front().map.goal.size());
  std::vector<std::string> header{"t", "n_eff"};
  for (int j = 0; j < dim; ++j) {
    header.push_back("map_goal_" + std::to_string(j));
  }
  header.push_back("map_gain");
  csv.row(header);
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    csv.begin_row();
    csv.field(t);
    csv.field(trace.steps[t].n_eff);
    for (int j = 0; j < dim; ++j) csv.field(trace.steps[t].map.goal[j]);
    csv.field(trace.steps[t].map.gain);
    csv.end_row();
  }
}

}  // namespace demo2prog
