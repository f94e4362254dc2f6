#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>

#include "dataset.hpp"
#include "demo2prog/config.hpp"
#include "demo2prog/csv.hpp"
#include "demo2prog/errors.hpp"
#include "demo2prog/grounding.hpp"
#include "demo2prog/micronet.hpp"
#include "demo2prog/program.hpp"
#include "demo2prog/rng.hpp"
#include "demo2prog/smc.hpp"
#include "demo2prog/symbolizer.hpp"
#include "demo2prog/trace_parser.hpp"

namespace demo2prog {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::string prior = "attribution";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

PipelineConfig load_pipeline_config(const CommonOpts& opts) {
  PipelineConfig cfg = load_config(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.threads) cfg.threads = *opts.threads;
  if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
  return cfg;
}

fs::path resolve_out_dir(const CommonOpts& opts) {
  const char* env = std::getenv("DEMO2PROG_OUT");
  fs::path dir = (env && *env) ? fs::path(env) : fs::path(opts.out_dir);
  fs::create_directories(dir);
  return dir;
}

void require_file(const fs::path& path) {
  if (!fs::exists(path)) {
    throw MissingInputError("missing upstream output: " + path.string() +
                            " (run the producing stage first)");
  }
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw MissingInputError("cannot open for writing: " + path.string());
  f << j.dump(2) << "\n";
}

json read_json(const fs::path& path) {
  require_file(path);
  std::ifstream f(path);
  json j;
  f >> j;
  return j;
}

std::string read_text(const fs::path& path) {
  require_file(path);
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- demo ----

void cmd_demo(const PipelineConfig& cfg, const fs::path& out) {
  Program program;
  for (int s : cfg.demo_trace()) program.push_back(make_exec(s));
  const GeneratedDemonstration gen = generate_demonstration(
      program, cfg.library, cfg.initial_state, cfg.scene, cfg.camera,
      cfg.demo);

  write_demo_csv(gen.demo, (out / "demo.csv").string());

  {
    CsvWriter csv((out / "segments.csv").string());
    csv.row({"symbol", "start", "end"});
    for (const auto& seg : gen.segments) {
      csv.begin_row();
      csv.field(seg.symbol);
      csv.field(seg.start);
      csv.field(seg.end);
      csv.end_row();
    }
  }

  // Store each distinct frame once; steps reference frames by index.
  fs::create_directories(out / "images");
  std::map<const Image*, int> frame_ids;
  std::vector<std::string> frame_files;
  std::vector<int> image_index;
  for (const auto& step : gen.demo.steps) {
    auto [it, inserted] = frame_ids.try_emplace(
        step.image.get(), static_cast<int>(frame_files.size()));
    if (inserted) {
      std::ostringstream name;
      name << "images/frame_" << std::setw(5) << std::setfill('0')
           << it->second << ".ppm";
      frame_files.push_back(name.str());
      write_ppm(*step.image, (out / name.str()).string());
    }
    image_index.push_back(it->second);
  }

  json meta;
  meta["dt"] = gen.demo.dt;
  meta["joints"] = gen.demo.joint_count();
  meta["timesteps"] = gen.demo.length();
  meta["images"] = frame_files;
  meta["image_index"] = image_index;
  write_json(meta, out / "demo_meta.json");

  json summary;
  summary["timesteps"] = gen.demo.length();
  summary["segments"] = gen.segments.size();
  summary["joints"] = gen.demo.joint_count();
  summary["dt"] = gen.demo.dt;
  write_json(summary, out / "demo_summary.json");
  std::printf("demo: %zu timesteps, %zu segments -> %s\n", gen.demo.length(),
              gen.segments.size(), out.string().c_str());
}

Demonstration load_demo(const fs::path& out, bool with_images) {
  require_file(out / "demo.csv");
  const json meta = read_json(out / "demo_meta.json");
  Demonstration demo =
      read_demo_csv((out / "demo.csv").string(), meta.at("dt").get<double>());
  if (with_images) {
    std::vector<std::shared_ptr<const Image>> frames;
    for (const auto& rel : meta.at("images")) {
      frames.push_back(std::make_shared<const Image>(
          read_ppm((out / rel.get<std::string>()).string())));
    }
    const auto& index = meta.at("image_index");
    if (index.size() != demo.steps.size()) {
      throw ConfigError("demo_meta image_index length mismatch");
    }
    for (std::size_t t = 0; t < demo.steps.size(); ++t) {
      demo.steps[t].image = frames.at(index[t].get<std::size_t>());
    }
  }
  return demo;
}

// --------------------------------------------------------------- train ----

void cmd_train(const PipelineConfig& cfg, const fs::path& out) {
  Rng rng = make_rng(cfg.seed, "train");
  MicroNet net = make_micronet(cfg.micronet.input_width,
                               cfg.micronet.input_height,
                               cfg.arm.joint_count(), cfg.micronet.hidden, rng);
  const ReachingDataset data =
      make_reaching_dataset(net, cfg, cfg.micronet.dataset_samples, rng);

  TrainConfig tc;
  tc.epochs = cfg.micronet.epochs;
  tc.learning_rate = cfg.micronet.learning_rate;
  const TrainResult result = train(net, data.inputs, data.targets, tc);

  save_micronet(net, (out / "net.bin").string());
  {
    CsvWriter csv((out / "loss.csv").string());
    csv.row({"epoch", "loss"});
    for (std::size_t e = 0; e < result.loss_curve.size(); ++e) {
      csv.begin_row();
      csv.field(e);
      csv.field(result.loss_curve[e]);
      csv.end_row();
    }
  }
  json summary;
  summary["samples"] = cfg.micronet.dataset_samples;
  summary["epochs"] = cfg.micronet.epochs;
  summary["initial_loss"] = result.loss_curve.front();
  summary["final_loss"] = result.loss_curve.back();
  write_json(summary, out / "train_summary.json");
  std::printf("train: %d samples, loss %.6f -> %.6f\n",
              cfg.micronet.dataset_samples, result.loss_curve.front(),
              result.loss_curve.back());
}

// --------------------------------------------------------------- infer ----

SaliencyProvider make_saliency_provider(const PipelineConfig& cfg,
                                        const fs::path& out,
                                        const Demonstration& demo) {
  if (cfg.saliency.source == SaliencySource::kOracle) {
    auto map = std::make_shared<const SaliencyMap>(
        oracle_saliency(cfg.scene, cfg.camera, cfg.saliency.sigma_px));
    return [map](std::size_t) { return map; };
  }
  require_file(out / "net.bin");
  auto net = std::make_shared<MicroNet>(
      load_micronet((out / "net.bin").string()));
  const Demonstration* demo_ptr = &demo;
  return [net, demo_ptr](std::size_t t) {
    const auto& step = demo_ptr->steps.at(t);
    return std::make_shared<const SaliencyMap>(
        input_gradient_saliency(*net, *step.image, step.theta));
  };
}

void write_neff_stats(const NeffStats& stats, const std::string& prior,
                      const fs::path& path) {
  CsvWriter csv(path.string());
  csv.row({"prior", "mean", "max", "min", "iqr"});
  csv.begin_row();
  csv.field(prior);
  csv.field(stats.mean);
  csv.field(stats.max);
  csv.field(stats.min);
  csv.field(stats.iqr);
  csv.end_row();
}

void cmd_infer(const PipelineConfig& cfg, const fs::path& out,
               const std::string& prior_name) {
  const bool needs_images = prior_name == "attribution" &&
                            cfg.saliency.source == SaliencySource::kMicronet;
  const Demonstration demo = load_demo(out, needs_images);

  std::unique_ptr<GoalPrior> prior;
  if (prior_name == "attribution") {
    prior = make_attribution_prior(
        demo, make_saliency_provider(cfg, out, demo), cfg.arm, cfg.camera,
        cfg.smc);
  } else if (prior_name == "baseline") {
    prior = make_baseline_prior(demo, cfg.smc);
  } else {
    throw ConfigError("unknown prior '" + prior_name + "'");
  }

  Rng rng = make_rng(cfg.seed, "infer-" + prior_name);
  const InferenceTrace trace =
      run_inference(demo, cfg.smc, *prior, rng, cfg.threads);

  write_trace_csv(trace, (out / ("trace_" + prior_name + ".csv")).string());
  const NeffStats stats = neff_statistics(trace.neff_series());
  write_neff_stats(stats, prior_name,
                   out / ("neff_stats_" + prior_name + ".csv"));

  const auto peaks =
      detect_peaks(trace.neff_series(), cfg.peaks, cfg.smc.particles);
  const auto map_params = extract_map_controllers(trace, peaks);

  SymbolTrace symbols;
  ControllerLibrary library;
  if (!map_params.empty()) {
    const ClusterResult clusters =
        cluster_controllers(map_params, cfg.cluster_k_max, cfg.threads);
    symbols = make_symbol_trace(clusters, peaks);
    library = clusters.library;
  }
  write_symbols_csv(symbols, (out / ("symbols_" + prior_name + ".csv")).string());
  write_library_csv(library,
                    (out / ("library_" + prior_name + ".csv")).string());

  json summary;
  summary["prior"] = prior_name;
  summary["timesteps"] = demo.length();
  summary["neff_mean"] = stats.mean;
  summary["neff_iqr"] = stats.iqr;
  summary["peaks"] = peaks.size();
  summary["clusters"] = library.size();
  write_json(summary, out / ("infer_summary_" + prior_name + ".json"));
  std::printf("infer[%s]: %zu peaks, %d clusters, N_eff mean %.2f iqr %.2f\n",
              prior_name.c_str(), peaks.size(), library.size(), stats.mean,
              stats.iqr);
}

// -------------------------------------------------------------- induce ----

void cmd_induce(const PipelineConfig&, const fs::path& out,
                const std::string& prior_name) {
  const fs::path symbols_path = out / ("symbols_" + prior_name + ".csv");
  require_file(symbols_path);
  const SymbolTrace trace = read_symbols_csv(symbols_path.string());

  const Program program = induce_program(trace.symbols);
  const bool lossless = expand(program) == trace.symbols;

  std::ofstream dsl(out / ("program_" + prior_name + ".dsl"));
  dsl << pretty_print(program);
  dsl.close();

  json summary;
  summary["symbols"] = trace.symbols.size();
  summary["statements"] = statement_count(program);
  summary["lossless"] = lossless;
  write_json(summary, out / ("induce_summary_" + prior_name + ".json"));
  std::printf("induce[%s]: %zu symbols -> %d statements (lossless=%s)\n",
              prior_name.c_str(), trace.symbols.size(),
              statement_count(program), lossless ? "true" : "false");
}

// -------------------------------------------------------------- ground ----

void cmd_ground(const PipelineConfig& cfg, const fs::path& out,
                const std::string& prior_name) {
  const fs::path library_path = out / ("library_" + prior_name + ".csv");
  require_file(library_path);
  const ControllerLibrary library = read_library_csv(library_path.string());
  const Demonstration demo = load_demo(out, true);

  const auto symbols =
      extract_templates(demo, library, cfg.camera, cfg.arm, cfg.grounding);
  save_templates(symbols, (out / "templates").string());

  json summary;
  summary["templates"] = symbols.size();
  summary["patch_size"] = cfg.grounding.patch_size;
  write_json(summary, out / "ground_summary.json");
  std::printf("ground: %zu templates -> %s\n", symbols.size(),
              (out / "templates").string().c_str());
}

// --------------------------------------------------------------- synth ----

void cmd_synth(const PipelineConfig& cfg, const fs::path& out,
               const std::string& prior_name) {
  const fs::path program_path = out / ("program_" + prior_name + ".dsl");
  require_file(program_path);
  require_file(out / "templates" / "templates.csv");
  const Program program = parse_program(read_text(program_path));
  const auto symbols = load_templates((out / "templates").string());

  const Scene& scene = cfg.synth_scene ? *cfg.synth_scene : cfg.scene;
  const Image image = render(scene, cfg.camera);
  const ControllerLibrary grounded =
      reground_library(symbols, image, cfg.camera, cfg.arm, cfg.grounding);

  const ExecutionResult exec =
      execute_program(program, grounded, cfg.initial_state, cfg.demo);

  {
    CsvWriter csv((out / "synth_traj.csv").string());
    std::vector<std::string> header{"t"};
    for (int j = 0; j < cfg.arm.joint_count(); ++j) {
      header.push_back("theta_" + std::to_string(j));
    }
    csv.row(header);
    for (std::size_t t = 0; t < exec.trajectory.size(); ++t) {
      csv.begin_row();
      csv.field(t);
      for (int j = 0; j < cfg.arm.joint_count(); ++j) {
        csv.field(exec.trajectory[t][j]);
      }
      csv.end_row();
    }
  }

  std::vector<int> object_order;
  {
    CsvWriter csv((out / "visitation.csv").string());
    csv.row({"order", "symbol", "object_id"});
    for (std::size_t i = 0; i < exec.visited_symbols.size(); ++i) {
      const Vec2 px = project(
          cfg.camera, forward_kinematics(cfg.arm, exec.segment_endpoints[i]));
      const int obj = object_at_pixel(scene, cfg.camera, px);
      object_order.push_back(obj);
      csv.begin_row();
      csv.field(i);
      csv.field(exec.visited_symbols[i]);
      csv.field(obj);
      csv.end_row();
    }
  }

  json summary;
  summary["symbols_executed"] = exec.visited_symbols.size();
  summary["object_order"] = object_order;
  write_json(summary, out / "synth_summary.json");
  std::printf("synth: executed %zu symbols\n", exec.visited_symbols.size());
}

// --------------------------------------------------------- eval-table1 ----

void cmd_eval_table1(const PipelineConfig& cfg, const fs::path& out) {
  if (cfg.eval.table1_seeds < 2) {
    throw ConfigError("eval-table1 needs at least 2 seeds");
  }
  const bool needs_images = cfg.saliency.source == SaliencySource::kMicronet;
  const Demonstration demo = load_demo(out, needs_images);
  const SaliencyProvider saliency = make_saliency_provider(cfg, out, demo);

  const std::uint64_t base = derive_seed(cfg.seed, "eval-table1");
  std::vector<NeffStats> attribution_stats;
  std::vector<NeffStats> baseline_stats;
  int mean_direction = 0;
  int iqr_direction = 0;

  CsvWriter per_seed((out / "table1_per_seed.csv").string());
  per_seed.row({"prior", "seed", "mean", "max", "min", "iqr"});
  for (int s = 0; s < cfg.eval.table1_seeds; ++s) {
    auto attribution =
        make_attribution_prior(demo, saliency, cfg.arm, cfg.camera, cfg.smc);
    auto baseline = make_baseline_prior(demo, cfg.smc);
    Rng rng_a(splitmix64(base + 2 * static_cast<std::uint64_t>(s)));
    Rng rng_b(splitmix64(base + 2 * static_cast<std::uint64_t>(s) + 1));
    const auto trace_a =
        run_inference(demo, cfg.smc, *attribution, rng_a, cfg.threads);
    const auto trace_b =
        run_inference(demo, cfg.smc, *baseline, rng_b, cfg.threads);
    const NeffStats sa = neff_statistics(trace_a.neff_series());
    const NeffStats sb = neff_statistics(trace_b.neff_series());
    attribution_stats.push_back(sa);
    baseline_stats.push_back(sb);
    if (sa.mean > sb.mean) ++mean_direction;
    if (sa.iqr > sb.iqr) ++iqr_direction;
    for (const auto& [name, st] :
         {std::pair<const char*, const NeffStats&>{"attribution", sa},
          {"baseline", sb}}) {
      per_seed.begin_row();
      per_seed.field(std::string(name));
      per_seed.field(s);
      per_seed.field(st.mean);
      per_seed.field(st.max);
      per_seed.field(st.min);
      per_seed.field(st.iqr);
      per_seed.end_row();
    }
  }

  auto average = [](const std::vector<NeffStats>& v) {
    NeffStats avg;
    for (const auto& s : v) {
      avg.mean += s.mean;
      avg.max += s.max;
      avg.min += s.min;
      avg.iqr += s.iqr;
    }
    const double n = static_cast<double>(v.size());
    avg.mean /= n;
    avg.max /= n;
    avg.min /= n;
    avg.iqr /= n;
    return avg;
  };
  const NeffStats avg_a = average(attribution_stats);
  const NeffStats avg_b = average(baseline_stats);

  {
    CsvWriter csv((out / "table1.csv").string());
    csv.row({"prior", "mean", "max", "min", "iqr"});
    for (const auto& [name, st] :
         {std::pair<const char*, const NeffStats&>{"attribution", avg_a},
          {"baseline", avg_b}}) {
      csv.begin_row();
      csv.field(std::string(name));
      csv.field(st.mean);
      csv.field(st.max);
      csv.field(st.min);
      csv.field(st.iqr);
      csv.end_row();
    }
  }

  json summary;
  summary["seeds"] = cfg.eval.table1_seeds;
  summary["attribution_mean"] = avg_a.mean;
  summary["baseline_mean"] = avg_b.mean;
  summary["attribution_iqr"] = avg_a.iqr;
  summary["baseline_iqr"] = avg_b.iqr;
  summary["mean_direction_holds"] = mean_direction;
  summary["iqr_direction_holds"] = iqr_direction;
  write_json(summary, out / "table1_summary.json");
  std::printf(
      "eval-table1: mean %.2f vs %.2f (holds %d/%d), iqr %.2f vs %.2f "
      "(holds %d/%d)\n",
      avg_a.mean, avg_b.mean, mean_direction, cfg.eval.table1_seeds, avg_a.iqr,
      avg_b.iqr, iqr_direction, cfg.eval.table1_seeds);
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"Induce interpretable control programs from simulated "
               "demonstrations"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string command;
  for (const auto& name :
       {"demo", "train", "infer", "induce", "ground", "synth", "eval-table1"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config_path, "pipeline config JSON")
        ->required();
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--seed", opts.seed, "override the config RNG seed");
    sub->add_option("--prior", opts.prior,
                    "switching prior: attribution|baseline")
        ->check(CLI::IsMember({"attribution", "baseline"}));
    sub->add_option("--threads", opts.threads, "worker cap");
    sub->callback([&command, name] { command = name; });
  }

  std::vector<const char*> argv{"demo2prog"};
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : 2;
    }
    const PipelineConfig cfg = load_pipeline_config(opts);
    const fs::path out = resolve_out_dir(opts);

    if (command == "demo") {
      cmd_demo(cfg, out);
    } else if (command == "train") {
      cmd_train(cfg, out);
    } else if (command == "infer") {
      cmd_infer(cfg, out, opts.prior);
    } else if (command == "induce") {
      cmd_induce(cfg, out, opts.prior);
    } else if (command == "ground") {
      cmd_ground(cfg, out, opts.prior);
    } else if (command == "synth") {
      cmd_synth(cfg, out, opts.prior);
    } else {
      cmd_eval_table1(cfg, out);
    }
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const MissingInputError& e) {
    std::fprintf(stderr, "missing input: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
}

}  // namespace demo2prog
