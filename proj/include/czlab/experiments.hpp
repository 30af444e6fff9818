#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "czlab/config.hpp"
#include "czlab/verify.hpp"

namespace czlab {

struct RunPlan {
  std::size_t jobs = 0;           // sweep points
  std::size_t evaluations = 0;    // Monte Carlo samples or exact instances
  std::vector<std::pair<std::string, double>> budgets;  // truncation bounds per point
};

/// Validates the config and every window/complexity constraint the experiment
/// will hit, without sampling.
RunPlan plan_experiment(const RunConfig& config);

SweepReport run_experiment(const RunConfig& config);

/// config.output, else $CZLAB_OUTPUT_DIR, else ".".
std::string output_directory(const RunConfig& config);

struct Artifacts {
  std::string csv_path;
  std::string json_path;
};

/// `<experiment>_seed<seed>_<digest>.csv` and `.json`; the CSV opens with the
/// canonical config as `#` lines, the JSON carries it under "config".
Artifacts write_artifacts(const SweepReport& report, const RunConfig& config, const std::string& directory);

nlohmann::json report_json_with_config(const SweepReport& report, const RunConfig& config);

/// One line per row plus an overall line.
std::vector<std::string> verdict_lines(const SweepReport& report);

// Sweep geometry derived from the config, shared with the CLI's dry run.
DyadicPoint reference_point(const ScaleWindow& window);
std::pair<DyadicPoint, DyadicPoint> ek_points(const RunConfig& config);
std::pair<DyadicPoint, DyadicPoint> holder_points(const RunConfig& config);  // (x, y)
struct SingleShiftSetup {
  GridShift omega;
  DyadicPoint y;
  DyadicPoint x_boundary;
};
SingleShiftSetup single_shift_setup(const RunConfig& config);

}  // namespace czlab
