#include "demo2prog/symbolizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "demo2prog/csv.hpp"
#include "demo2prog/errors.hpp"
#include "demo2prog/parallel.hpp"

namespace demo2prog {

void PeakConfig::validate() const {
  if (smoothing_window < 1 || smoothing_window % 2 == 0) {
    throw ConfigError("smoothing_window must be odd and >= 1");
  }
  if (min_distance < 1) throw ConfigError("min_distance must be >= 1");
  if (min_prominence < 0.0 || min_prominence >= 1.0) {
    throw ConfigError("min_prominence must lie in [0,1)");
  }
}

std::vector<double> moving_average(const std::vector<double>& series,
                                   int window) {
  if (window <= 1) return series;
  const int half = window / 2;
  const int n = static_cast<int>(series.size());
  std::vector<double> out(series.size());
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    double acc = 0.0;
    for (int j = lo; j <= hi; ++j) acc += series[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc / (hi - lo + 1);
  }
  return out;
}

namespace {

// Topographic prominence: height above the higher of the valley floors
// separating the peak from the nearest taller samples. A side that runs off
// the series without meeting a taller sample imposes no constraint; the
// global maximum is measured against the lowest valley it owns.
double prominence(const std::vector<double>& s, std::size_t peak) {
  const double h = s[peak];
  bool constrained = false;
  double base = -std::numeric_limits<double>::max();
  double side_min = h;
  for (std::size_t i = peak; i-- > 0;) {
    side_min = std::min(side_min, s[i]);
    if (s[i] > h) {
      base = std::max(base, side_min);
      constrained = true;
      break;
    }
  }
  double left_min = side_min;
  side_min = h;
  for (std::size_t i = peak + 1; i < s.size(); ++i) {
    side_min = std::min(side_min, s[i]);
    if (s[i] > h) {
      base = std::max(base, side_min);
      constrained = true;
      break;
    }
  }
  if (!constrained) base = std::min(left_min, side_min);
  return h - base;
}

}  // namespace

std::vector<std::size_t> detect_peaks(const std::vector<double>& series,
                                      const PeakConfig& cfg,
                                      double n_particles) {
  cfg.validate();
  if (series.size() <= static_cast<std::size_t>(cfg.smoothing_window)) {
    throw ConfigError("series shorter than smoothing window");
  }
  const std::vector<double> smooth =
      moving_average(series, cfg.smoothing_window);
  const double threshold = cfg.min_prominence * n_particles;

  // Interior local maxima; a flat top counts once, at its first index, and
  // series boundaries never qualify.
  std::vector<std::size_t> candidates;
  for (std::size_t i = 1; i + 1 < smooth.size(); ++i) {
    if (smooth[i] <= smooth[i - 1]) continue;  // not a rise (or mid-plateau)
    std::size_t j = i;
    while (j + 1 < smooth.size() && smooth[j + 1] == smooth[i]) ++j;
    if (j + 1 >= smooth.size() || smooth[j + 1] >= smooth[i]) continue;
    if (prominence(smooth, i) > threshold) candidates.push_back(i);
  }

  // Tallest first (ties favour the earlier index), keep a candidate only if
  // no taller accepted peak lies within min_distance.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&smooth](std::size_t a, std::size_t b) {
                     return smooth[a] > smooth[b];
                   });
  std::vector<std::size_t> accepted;
  for (std::size_t c : candidates) {
    const bool clear = std::none_of(
        accepted.begin(), accepted.end(), [&](std::size_t a) {
          const std::size_t gap = a > c ? a - c : c - a;
          return gap < static_cast<std::size_t>(cfg.min_distance);
        });
    if (clear) accepted.push_back(c);
  }
  std::sort(accepted.begin(), accepted.end());
  return accepted;
}

std::vector<ControllerParams> extract_map_controllers(
    const InferenceTrace& trace, const std::vector<std::size_t>& peaks) {
  std::vector<ControllerParams> params;
  params.reserve(peaks.size());
  for (std::size_t p : peaks) {
    if (p >= trace.steps.size()) {
      throw ContractViolation("peak index outside inference trace");
    }
    params.push_back(trace.steps[p].map);
  }
  return params;
}

namespace {

struct KmeansRun {
  std::vector<int> assignments;
  std::vector<JointState> centers;
  double wcss = 0.0;
};

KmeansRun kmeans(const std::vector<JointState>& points, int k) {
  const std::size_t n = points.size();
  const Eigen::Index dim = points.front().size();

  // Farthest-point seeding, starting from the point farthest from the mean.
  JointState mean = JointState::Zero(dim);
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(n);
  std::vector<std::size_t> seeds;
  {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (points[i] - mean).squaredNorm();
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    seeds.push_back(best);
  }
  std::vector<double> nearest(n, std::numeric_limits<double>::max());
  while (static_cast<int>(seeds.size()) < k) {
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] =
          std::min(nearest[i], (points[i] - points[seeds.back()]).squaredNorm());
    }
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (nearest[i] > best_d) {
        best_d = nearest[i];
        best = i;
      }
    }
    seeds.push_back(best);
  }

  KmeansRun run;
  run.centers.reserve(static_cast<std::size_t>(k));
  for (std::size_t s : seeds) run.centers.push_back(points[s]);
  run.assignments.assign(n, -1);

  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::max();
      for (int c = 0; c < k; ++c) {
        const double d =
            (points[i] - run.centers[static_cast<std::size_t>(c)])
                .squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (run.assignments[i] != best) {
        run.assignments[i] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;
    std::vector<JointState> sums(static_cast<std::size_t>(k),
                                 JointState::Zero(dim));
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums[static_cast<std::size_t>(run.assignments[i])] += points[i];
      ++counts[static_cast<std::size_t>(run.assignments[i])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        run.centers[static_cast<std::size_t>(c)] =
            sums[static_cast<std::size_t>(c)] /
            counts[static_cast<std::size_t>(c)];
      }
      // empty clusters keep their previous center
    }
  }

  run.wcss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    run.wcss +=
        (points[i] - run.centers[static_cast<std::size_t>(run.assignments[i])])
            .squaredNorm();
  }
  return run;
}

}  // namespace

ClusterResult cluster_controllers(const std::vector<ControllerParams>& params,
                                  int k_max, int threads) {
  if (params.empty()) throw ConfigError("no controllers to cluster");
  if (k_max < 1) throw ConfigError("k_max must be >= 1");
  k_max = std::min(k_max, static_cast<int>(params.size()));

  std::vector<JointState> goals;
  goals.reserve(params.size());
  for (const auto& p : params) goals.push_back(p.goal);

  std::vector<KmeansRun> runs(static_cast<std::size_t>(k_max));
  parallel_for(static_cast<std::size_t>(k_max), threads, [&](std::size_t i) {
    runs[i] = kmeans(goals, static_cast<int>(i) + 1);
  });

  std::vector<double> wcss;
  wcss.reserve(runs.size());
  for (const auto& r : runs) wcss.push_back(r.wcss);

  int k_star;
  const double exact_tol = 1e-9 * std::max(wcss[0], 1e-30);
  const auto exact =
      std::find_if(wcss.begin(), wcss.end(),
                   [&](double w) { return w <= exact_tol; });
  if (exact != wcss.end()) {
    // some k already explains the data exactly; more clusters add nothing
    k_star = static_cast<int>(exact - wcss.begin()) + 1;
  } else if (k_max < 3) {
    k_star = k_max;
  } else {
    // Second difference of log WCSS. The log keeps the criterion scale-free:
    // WCSS shrinks geometrically while real structure remains, so raw
    // differences would always elect k=2.
    auto logw = [&](int k) {
      return std::log(std::max(wcss[static_cast<std::size_t>(k - 1)],
                               exact_tol));
    };
    int best_k = 2;
    double best_curv = -std::numeric_limits<double>::max();
    for (int k = 2; k <= k_max - 1; ++k) {
      const double curv = logw(k - 1) - 2.0 * logw(k) + logw(k + 1);
      if (curv > best_curv) {
        best_curv = curv;
        best_k = k;
      }
    }
    k_star = best_k;
  }

  const KmeansRun& chosen = runs[static_cast<std::size_t>(k_star - 1)];

  // Relabel clusters by first appearance so symbol ids are deterministic.
  std::vector<int> relabel(static_cast<std::size_t>(k_star), -1);
  int next_id = 0;
  ClusterResult result;
  result.assignments.reserve(params.size());
  for (int a : chosen.assignments) {
    if (relabel[static_cast<std::size_t>(a)] < 0) {
      relabel[static_cast<std::size_t>(a)] = next_id++;
    }
    result.assignments.push_back(relabel[static_cast<std::size_t>(a)]);
  }
  result.k = next_id;  // clusters that never appear are dropped
  result.wcss = wcss;

  // Library goals are cluster means; gains the member median.
  std::vector<JointState> sums(static_cast<std::size_t>(result.k),
                               JointState::Zero(goals.front().size()));
  std::vector<int> counts(static_cast<std::size_t>(result.k), 0);
  std::vector<std::vector<double>> gains(static_cast<std::size_t>(result.k));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto id = static_cast<std::size_t>(result.assignments[i]);
    sums[id] += goals[i];
    ++counts[id];
    gains[id].push_back(params[i].gain);
  }
  for (int c = 0; c < result.k; ++c) {
    const auto id = static_cast<std::size_t>(c);
    ControllerParams lib;
    lib.goal = sums[id] / counts[id];
    std::sort(gains[id].begin(), gains[id].end());
    const std::size_t m = gains[id].size();
    lib.gain = (m % 2 == 1) ? gains[id][m / 2]
                            : 0.5 * (gains[id][m / 2 - 1] + gains[id][m / 2]);
    result.library.controllers.push_back(std::move(lib));
  }
  return result;
}

SymbolTrace make_symbol_trace(const ClusterResult& clusters,
                              const std::vector<std::size_t>& peaks) {
  if (clusters.assignments.size() != peaks.size()) {
    throw ContractViolation("assignment / peak count mismatch");
  }
  SymbolTrace trace;
  trace.symbols = clusters.assignments;
  trace.peak_times = peaks;
  return trace;
}

void write_symbols_csv(const SymbolTrace& trace, const std::string& path) {
  CsvWriter csv(path);
  csv.row({"symbol", "peak_time"});
  for (std::size_t i = 0; i < trace.symbols.size(); ++i) {
    csv.begin_row();
    csv.field(trace.symbols[i]);
    csv.field(trace.peak_times[i]);
    csv.end_row();
  }
}

SymbolTrace read_symbols_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header != std::vector<std::string>{"symbol", "peak_time"}) {
    throw ConfigError("unexpected symbols CSV header in " + path);
  }
  SymbolTrace trace;
  for (const auto& row : table.rows) {
    trace.symbols.push_back(static_cast<int>(row[0]));
    trace.peak_times.push_back(static_cast<std::size_t>(row[1]));
  }
  return trace;
}

void write_library_csv(const ControllerLibrary& library,
                       const std::string& path) {
  CsvWriter csv(path);
  const int dim = library.size() > 0
                      ? static_cast<int>(library.controllers[0].goal.size())
                      : 0;
  std::vector<std::string> header{"id"};
  for (int j = 0; j < dim; ++j) header.push_back("goal_" + std::to_string(j));
  header.push_back("gain");
  csv.row(header);
  for (int i = 0; i < library.size(); ++i) {
    csv.begin_row();
    csv.field(i);
    for (int j = 0; j < dim; ++j) {
      csv.field(library.controllers[static_cast<std::size_t>(i)].goal[j]);
    }
    csv.field(library.controllers[static_cast<std::size_t>(i)].gain);
    csv.end_row();
  }
}

ControllerLibrary read_library_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() < 3 || table.header.front() != "id" ||
      table.header.back() != "gain") {
    throw ConfigError("unexpected library CSV header in " + path);
  }
  const int dim = static_cast<int>(table.header.size()) - 2;
  ControllerLibrary library;
  for (const auto& row : table.rows) {
    ControllerParams c;
    c.goal.resize(dim);
    for (int j = 0; j < dim; ++j) c.goal[j] = row[static_cast<std::size_t>(1 + j)];
    c.gain = row.back();
    library.controllers.push_back(std::move(c));
  }
  library.validate();
  return library;
}

}  // namespace demo2prog
