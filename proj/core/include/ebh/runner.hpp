#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ebh/observables.hpp"
#include "ebh/scenario.hpp"

namespace ebh {

struct RunOptions {
  std::string out_root = "runs";
  int threads = 0;  ///< 0 = leave Eigen's default
  std::optional<double> dt_override;
  std::optional<int> n_sites_override;
  bool quiet = false;
};

struct RunResult {
  std::string run_dir;
  std::string summary_path;
  std::vector<std::string> artifacts;  ///< files written, relative to run_dir
};

/// Execute one scenario, writing CSV/JSON artifacts and a gnuplot script
/// into <out_root>/<name>-<hash>/. Returns the artifact manifest.
RunResult run_scenario(const ScenarioConfig& config, const RunOptions& opts);

/// Re-run a base scenario for each value of one numeric field, addressed by
/// JSON pointer into the config document (e.g. "/field/f0"). Results land in
/// numbered subdirectories plus an aggregate sweep.csv.
RunResult run_sweep(const ScenarioConfig& base, const std::string& pointer,
                    const std::vector<double>& values, const RunOptions& opts);

/// Shared CSV helpers (12 significant digits, '%.12g').
std::string format_double(double x);
void write_series_csv(const std::string& path, const ObservableSeries& series);
void write_density_csv(const std::string& path, const ObservableSeries& series);

}  // namespace ebh
