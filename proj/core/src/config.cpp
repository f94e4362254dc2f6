#include "demo2prog/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "demo2prog/errors.hpp"
#include "demo2prog/program.hpp"

namespace demo2prog {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw ConfigError(origin + ": " + what);
}

int line_of_byte(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

Eigen::VectorXd to_vector(const json& arr, const std::string& origin,
                          const std::string& key) {
  if (!arr.is_array()) fail(origin, key + " must be an array of numbers");
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) fail(origin, key + " must be numeric");
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return v;
}

Vec2 to_vec2(const json& arr, const std::string& origin,
             const std::string& key) {
  const Eigen::VectorXd v = to_vector(arr, origin, key);
  if (v.size() != 2) fail(origin, key + " must have 2 entries");
  return {v[0], v[1]};
}

template <typename T>
void read_scalar(const json& obj, const char* key, T& out,
                 const std::string& origin) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(origin, std::string("bad value for '") + key + "'");
  }
}

Scene parse_scene(const json& j, const std::string& origin) {
  Scene scene;
  if (!j.contains("objects")) return scene;
  for (const auto& o : j.at("objects")) {
    SceneObject obj;
    read_scalar(o, "id", obj.id, origin);
    read_scalar(o, "half_extent", obj.half_extent, origin);
    if (o.contains("color")) {
      const auto c = to_vector(o.at("color"), origin, "color");
      if (c.size() != 3) fail(origin, "color must have 3 entries");
      obj.color = {c[0], c[1], c[2]};
    }
    if (o.contains("center")) {
      obj.center = to_vec2(o.at("center"), origin, "center");
    }
    scene.objects.push_back(obj);
  }
  return scene;
}

}  // namespace

std::vector<int> PipelineConfig::demo_trace() const {
  if (program_text) {
    return expand(parse_program(*program_text));
  }
  if (fsm_state_explanation) {
    return fsm_symbol_trace(*fsm_state_explanation, fsm_symbols);
  }
  throw ConfigError("config needs either 'program' or 'fsm' to generate demos");
}

void PipelineConfig::validate() const {
  arm.validate();
  camera.validate();
  scene.validate(camera);
  library.validate();
  smc.validate();
  peaks.validate();
  if (initial_state.size() != arm.link_lengths.size()) {
    throw ConfigError("initial_state length must match arm joint count");
  }
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (cluster_k_max < 1) throw ConfigError("cluster k_max must be >= 1");
  if (demo.dt <= 0 || demo.convergence_eps <= 0) {
    throw ConfigError("demo dt and convergence_eps must be positive");
  }
  if (synth_scene) synth_scene->validate(camera);
}

PipelineConfig parse_config(const std::string& text,
                            const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ":" +
                      std::to_string(line_of_byte(text, e.byte)) +
                      ": JSON parse error: " + e.what());
  }
  if (!root.is_object()) fail(origin, "top level must be a JSON object");

  PipelineConfig cfg;
  read_scalar(root, "seed", cfg.seed, origin);
  read_scalar(root, "threads", cfg.threads, origin);

  if (root.contains("arm")) {
    const auto& a = root.at("arm");
    if (a.contains("link_lengths")) {
      cfg.arm.link_lengths =
          to_vector(a.at("link_lengths"), origin, "link_lengths");
    }
    if (a.contains("base")) {
      cfg.arm.base_position = to_vec2(a.at("base"), origin, "base");
    }
  }
  if (cfg.arm.link_lengths.size() == 0) {
    cfg.arm.link_lengths = Eigen::VectorXd::Ones(3);
  }

  if (root.contains("camera")) {
    const auto& c = root.at("camera");
    read_scalar(c, "pixels_per_unit", cfg.camera.pixels_per_unit, origin);
    if (c.contains("principal_point")) {
      cfg.camera.principal_point =
          to_vec2(c.at("principal_point"), origin, "principal_point");
    }
    if (c.contains("image_size")) {
      const auto s = to_vector(c.at("image_size"), origin, "image_size");
      if (s.size() != 2) fail(origin, "image_size must have 2 entries");
      cfg.camera.image_width = static_cast<int>(s[0]);
      cfg.camera.image_height = static_cast<int>(s[1]);
    }
  }

  if (root.contains("scene")) {
    cfg.scene = parse_scene(root.at("scene"), origin);
  }

  if (root.contains("demo")) {
    const auto& d = root.at("demo");
    read_scalar(d, "dt", cfg.demo.dt, origin);
    read_scalar(d, "convergence_eps", cfg.demo.convergence_eps, origin);
    read_scalar(d, "fsm_symbols", cfg.fsm_symbols, origin);
    if (d.contains("initial_state")) {
      cfg.initial_state =
          to_vector(d.at("initial_state"), origin, "initial_state");
    }
    if (d.contains("library")) {
      for (const auto& entry : d.at("library")) {
        ControllerParams c;
        if (!entry.contains("goal")) fail(origin, "library entry needs 'goal'");
        c.goal = to_vector(entry.at("goal"), origin, "goal");
        read_scalar(entry, "gain", c.gain, origin);
        cfg.library.controllers.push_back(std::move(c));
      }
    }
    if (d.contains("fsm")) {
      std::vector<int> states;
      for (const auto& s : d.at("fsm")) {
        if (!s.is_number_integer()) fail(origin, "fsm must be integer array");
        states.push_back(s.get<int>());
      }
      cfg.fsm_state_explanation = std::move(states);
    }
    if (d.contains("program")) {
      cfg.program_text = d.at("program").get<std::string>();
    }
  }
  if (cfg.initial_state.size() == 0) {
    cfg.initial_state = JointState::Zero(cfg.arm.link_lengths.size());
  }

  if (root.contains("micronet")) {
    const auto& m = root.at("micronet");
    read_scalar(m, "input_width", cfg.micronet.input_width, origin);
    read_scalar(m, "input_height", cfg.micronet.input_height, origin);
    read_scalar(m, "epochs", cfg.micronet.epochs, origin);
    read_scalar(m, "learning_rate", cfg.micronet.learning_rate, origin);
    read_scalar(m, "dataset_samples", cfg.micronet.dataset_samples, origin);
    read_scalar(m, "dataset_gain", cfg.micronet.dataset_gain, origin);
    if (m.contains("hidden")) {
      cfg.micronet.hidden.clear();
      for (const auto& h : m.at("hidden")) {
        cfg.micronet.hidden.push_back(h.get<int>());
      }
    }
  }

  if (root.contains("saliency")) {
    const auto& s = root.at("saliency");
    if (s.contains("source")) {
      const std::string src = s.at("source").get<std::string>();
      if (src == "oracle") {
        cfg.saliency.source = SaliencySource::kOracle;
      } else if (src == "micronet") {
        cfg.saliency.source = SaliencySource::kMicronet;
      } else {
        fail(origin, "saliency source must be 'oracle' or 'micronet'");
      }
    }
    read_scalar(s, "sigma_px", cfg.saliency.sigma_px, origin);
  }

  if (root.contains("smc")) {
    const auto& s = root.at("smc");
    read_scalar(s, "p_switch", cfg.smc.p_switch, origin);
    read_scalar(s, "q_theta", cfg.smc.q_theta, origin);
    read_scalar(s, "q_kp", cfg.smc.q_kp, origin);
    read_scalar(s, "r", cfg.smc.r, origin);
    read_scalar(s, "particles", cfg.smc.particles, origin);
    read_scalar(s, "window", cfg.smc.window, origin);
  }

  if (root.contains("peaks")) {
    const auto& p = root.at("peaks");
    read_scalar(p, "smoothing_window", cfg.peaks.smoothing_window, origin);
    read_scalar(p, "min_distance", cfg.peaks.min_distance, origin);
    read_scalar(p, "min_prominence", cfg.peaks.min_prominence, origin);
  }

  if (root.contains("clustering")) {
    read_scalar(root.at("clustering"), "k_max", cfg.cluster_k_max, origin);
  }

  if (root.contains("grounding")) {
    const auto& g = root.at("grounding");
    read_scalar(g, "patch_size", cfg.grounding.patch_size, origin);
    read_scalar(g, "ncc_threshold", cfg.grounding.ncc_threshold, origin);
  }

  if (root.contains("synth") && root.at("synth").contains("scene")) {
    cfg.synth_scene = parse_scene(root.at("synth").at("scene"), origin);
  }

  if (root.contains("eval")) {
    const auto& e = root.at("eval");
    read_scalar(e, "table1_seeds", cfg.eval.table1_seeds, origin);
    read_scalar(e, "generalization_scenes", cfg.eval.generalization_scenes,
                origin);
  }

  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw MissingInputError("cannot open config: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace demo2prog
