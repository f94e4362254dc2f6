#pragma once

#include <string>
#include <vector>

#include "demo2prog/controller.hpp"
#include "demo2prog/smc.hpp"

namespace demo2prog {

struct PeakConfig {
  int smoothing_window = 5;   // odd, >= 1
  int min_distance = 10;      // timesteps
  double min_prominence = 0.1;  // fraction of the particle count

  void validate() const;
};

/// Controller symbols in demonstration order with the timesteps they were
/// read off at.
struct SymbolTrace {
  std::vector<int> symbols;
  std::vector<std::size_t> peak_times;
};

/// Centered moving average; the window is clipped at the series ends.
std::vector<double> moving_average(const std::vector<double>& series,
                                   int window);

/// Interior local maxima of the smoothed series whose topographic prominence
/// exceeds min_prominence * n_particles, with smaller maxima suppressed
/// within min_distance of a larger one. Returned indices are strictly
/// increasing.
std::vector<std::size_t> detect_peaks(const std::vector<double>& series,
                                      const PeakConfig& cfg,
                                      double n_particles);

std::vector<ControllerParams> extract_map_controllers(
    const InferenceTrace& trace, const std::vector<std::size_t>& peaks);

struct ClusterResult {
  ControllerLibrary library;      // one controller per cluster; gain is the
                                  // member median
  std::vector<int> assignments;   // per input, relabeled by first appearance
  int k = 0;
  std::vector<double> wcss;       // wcss[i] is WCSS for k = i + 1
};

/// K-means over goal vectors (gain excluded from the metric) with
/// deterministic farthest-point seeding; the cluster count comes from the
/// largest second difference of WCSS, short-circuited when some k already
/// explains the data exactly.
ClusterResult cluster_controllers(const std::vector<ControllerParams>& params,
                                  int k_max, int threads = 1);

SymbolTrace make_symbol_trace(const ClusterResult& clusters,
                              const std::vector<std::size_t>& peaks);

void write_symbols_csv(const SymbolTrace& trace, const std::string& path);
SymbolTrace read_symbols_csv(const std::string& path);

void write_library_csv(const ControllerLibrary& library,
                       const std::string& path);
ControllerLibrary read_library_csv(const std::string& path);

}  // namespace demo2prog
