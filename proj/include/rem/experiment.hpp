#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rem/env.hpp"
#include "rem/observe.hpp"
#include "rem/scales.hpp"
#include "rem/stats.hpp"
#include "rem/walk.hpp"

namespace rem {

struct RunParams {
  std::size_t replicas = 100;
  double horizon_t = 2.0;  // walk horizon in t_N units
  std::vector<double> delta_grid = {0.5, 0.2, 0.1};
  bool use_estimated_d_n = false;   // calibrate depth scale to the MC estimate
  std::size_t d_n_replicas = 16;
  bool fresh_env_per_replica = false;  // annealed statistics instead of quenched
  std::size_t threads = 0;             // 0: hardware default (capped)
  double event_budget = 4e9;
  std::size_t green_samples = 64;
  std::size_t mark_events = 600;  // pooled traps that get a green estimate and mark
  double window_slack_n2 = 12.0;  // hard cap past the horizon, in N^2 units
  unsigned green_distance_cut = 10;  // 0 disables the cut
  std::string output_dir = "out";
  std::string suite = "traps";
  std::vector<std::uint64_t> env_seeds;  // exact suite: explicit environments
};

struct ExperimentConfig {
  ModelParams model;
  RunParams run;
};

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);
std::string canonical_config(const ExperimentConfig& config);
std::uint64_t config_hash(const ExperimentConfig& config);
nlohmann::json manifest_json(const ExperimentConfig& config);

extern const char* const kVersion;

// shortest representation that round-trips the double exactly
std::string format_double(double v);

// scale set the pipelines use; honors use_estimated_d_n
ScaleSet scales_for(const ExperimentConfig& config);

// model with the environment stream resolved for replica r (quenched runs
// share one landscape; fresh_env_per_replica re-keys it)
ModelParams env_params(const ExperimentConfig& config, std::size_t replica);

// refuses runs whose projected event count exceeds the configured budget
void check_budget(const ExperimentConfig& config, const ScaleSet& scales, double horizon_factor,
                  std::size_t replicas);

struct TrapPipelineResult {
  std::vector<TrapEvent> pooled;  // replica-major order
  ScaleSet scales;
  std::size_t replicas = 0;
};

// Replicas of the accelerated walk started from the uniform law, with trap
// detection hooks; the first `mark_events` completed events get a Monte Carlo
// green value and an occupation mark. Deterministic for a fixed config.
TrapPipelineResult run_trap_pipeline(const ExperimentConfig& config);

// rescaled clock value C_N(t) per replica
std::vector<double> clock_samples(const ExperimentConfig& config, double t);

// rescaled age value A_N(t) per replica; censored replicas are dropped
std::vector<double> age_samples(const ExperimentConfig& config, double t);

struct ShallowGap {
  double delta = 0.0;
  double mean_gap = 0.0;  // mean over replicas of sup |C_N - C^(delta)_N| on [0, T]
};
std::vector<ShallowGap> shallow_clock_gaps(const ExperimentConfig& config, double horizon_t);

// CSV emission (numbers round-trip exactly)
std::string traps_csv(const TrapPipelineResult& result);
std::string trajectory_csv(const TrajectoryRecord& record, const DiscoveryLog& log);
std::string step_path_csv(const StepPath& path, const std::string& value_name);

nlohmann::json report_to_json(const TestReport& report);

// Executes the named suite (exact | dynamics | traps | clock | age | limits |
// all), writes artifacts plus a manifest into output_dir, returns 0 when every
// hard invariant holds and at least 95% of the statistical tests pass.
int run_suite(const ExperimentConfig& config);

}  // namespace rem
