#include "rem/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "rem/parallel.hpp"

namespace rem {

const char* const kVersion = "0.1.0";

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

double window_slack(const ModelParams& p, double units) {
  const double n = static_cast<double>(p.N);
  return units * n * n;
}

}  // namespace

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["model"] = {{"N", c.model.N},     {"beta", c.model.beta},   {"abar", c.model.abar},
                {"a", c.model.a},     {"cbar", c.model.cbar},   {"delta", c.model.delta},
                {"seed", c.model.seed}};
  j["run"] = {{"replicas", c.run.replicas},
              {"horizon_T", c.run.horizon_t},
              {"delta_grid", c.run.delta_grid},
              {"use_estimated_d_N", c.run.use_estimated_d_n},
              {"d_N_replicas", c.run.d_n_replicas},
              {"fresh_env_per_replica", c.run.fresh_env_per_replica},
              {"threads", c.run.threads},
              {"event_budget", c.run.event_budget},
              {"green_samples", c.run.green_samples},
              {"mark_events", c.run.mark_events},
              {"output_dir", c.run.output_dir},
              {"suite", c.run.suite},
              {"env_seeds", c.run.env_seeds},
              {"window_slack_N2", c.run.window_slack_n2},
              {"green_distance_cut", c.run.green_distance_cut}};
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  const auto& m = j.at("model");
  c.model.N = m.at("N").get<unsigned>();
  c.model.beta = m.at("beta").get<double>();
  c.model.abar = m.value("abar", c.model.abar);
  c.model.a = m.value("a", -1.0);
  c.model.cbar = m.at("cbar").get<double>();
  c.model.delta = m.value("delta", c.model.delta);
  c.model.seed = m.at("seed").get<std::uint64_t>();
  if (j.contains("run")) {
    const auto& r = j.at("run");
    c.run.replicas = r.value("replicas", c.run.replicas);
    c.run.horizon_t = r.value("horizon_T", c.run.horizon_t);
    c.run.delta_grid = r.value("delta_grid", c.run.delta_grid);
    c.run.use_estimated_d_n = r.value("use_estimated_d_N", c.run.use_estimated_d_n);
    c.run.d_n_replicas = r.value("d_N_replicas", c.run.d_n_replicas);
    c.run.fresh_env_per_replica = r.value("fresh_env_per_replica", c.run.fresh_env_per_replica);
    c.run.threads = r.value("threads", c.run.threads);
    c.run.event_budget = r.value("event_budget", c.run.event_budget);
    c.run.green_samples = r.value("green_samples", c.run.green_samples);
    c.run.mark_events = r.value("mark_events", c.run.mark_events);
    c.run.output_dir = r.value("output_dir", c.run.output_dir);
    c.run.suite = r.value("suite", c.run.suite);
    c.run.env_seeds = r.value("env_seeds", c.run.env_seeds);
    c.run.window_slack_n2 = r.value("window_slack_N2", c.run.window_slack_n2);
    c.run.green_distance_cut = r.value("green_distance_cut", c.run.green_distance_cut);
  }
  c.model.validate();
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  return config_from_json(j);
}

std::string canonical_config(const ExperimentConfig& c) { return config_to_json(c).dump(2); }

std::uint64_t config_hash(const ExperimentConfig& c) {
  const std::string s = canonical_config(c);
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

nlohmann::json manifest_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["config"] = config_to_json(c);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(config_hash(c)));
  j["config_hash"] = buf;
  j["generator"] = "mt19937_64 streams keyed by splitmix64(seed, purpose, replica)";
  j["streams"] = {{"environment", "seed x environment tag (shared unless fresh_env_per_replica)"},
                  {"trajectory", "seed x trajectory tag x replica"},
                  {"observer", "seed x observer tag x replica"},
                  {"green", "seed x green tag x replica x trap"}};
  return j;
}

ScaleSet scales_for(const ExperimentConfig& config) {
  if (!config.run.use_estimated_d_n) return compute_scales(config.model);
  McEstimate est = estimate_d_n(config.model, config.run.d_n_replicas, config.run.threads,
                                config.run.event_budget, config.run.fresh_env_per_replica);
  return compute_scales_with_log_d(config.model, std::log(est.mean));
}

ModelParams env_params(const ExperimentConfig& config, std::size_t replica) {
  ModelParams p = config.model;
  if (config.run.fresh_env_per_replica) p.seed = hash_mix(p.seed, 0xF2E54, replica);
  return p;
}

void check_budget(const ExperimentConfig& config, const ScaleSet& scales, double horizon_factor,
                  std::size_t replicas) {
  const double n = static_cast<double>(config.model.N);
  const double mean_rate = n * scales.phi_a * scales.phi_a;
  const double walk_events =
      static_cast<double>(replicas) *
      (horizon_factor * scales.t_n + window_slack(config.model, config.run.window_slack_n2)) *
      mean_rate;
  const double green_events = static_cast<double>(config.run.mark_events) *
                              static_cast<double>(config.run.green_samples) * n * n * mean_rate;
  if (walk_events + green_events > config.run.event_budget)
    throw BudgetExceeded("projected event count " + format_double(walk_events + green_events) +
                         " exceeds budget " + format_double(config.run.event_budget));
}

TrapPipelineResult run_trap_pipeline(const ExperimentConfig& config) {
  TrapPipelineResult out;
  out.scales = scales_for(config);
  out.replicas = config.run.replicas;
  check_budget(config, out.scales, config.run.horizon_t, config.run.replicas);

  std::vector<std::vector<TrapEvent>> per_replica(config.run.replicas);
  parallel_for(config.run.replicas, config.run.threads, [&](std::size_t r) {
    EnergyField field(env_params(config, r));
    RngStream rng(hash_mix(config.model.seed, stream::kTrajectory, r));
    RngStream obs_rng(hash_mix(config.model.seed, stream::kObserver, r));
    TrapObserver observer(field, out.scales, config.model.delta, obs_rng);
    RunOptions opts;
    opts.soft_horizon = config.run.horizon_t * out.scales.t_n;
    opts.horizon =
        opts.soft_horizon + window_slack(config.model, config.run.window_slack_n2);
    opts.log_b = out.scales.log_b_n;
    opts.keep_events = false;
    opts.max_events = static_cast<std::uint64_t>(config.run.event_budget);
    const Vertex start = rng.below(field.num_vertices());
    RunResult res = run_X(field, start, opts, rng, &observer);
    std::vector<TrapEvent> events = observer.take_events(res.record.simulated_until);
    // keep traps discovered inside the nominal window
    std::erase_if(events, [&](const TrapEvent& e) { return e.t_over_tn > config.run.horizon_t; });
    for (TrapEvent& e : events) e.replica = r;
    per_replica[r] = std::move(events);
  });
  for (auto& v : per_replica)
    for (TrapEvent& e : v) out.pooled.push_back(e);

  // green estimates and marks for the first mark_events completed windows
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < out.pooled.size() && chosen.size() < config.run.mark_events; ++i)
    if (out.pooled[i].window_complete) chosen.push_back(i);
  parallel_for(chosen.size(), config.run.threads, [&](std::size_t c) {
    TrapEvent& ev = out.pooled[chosen[c]];
    EnergyField field(env_params(config, ev.replica));
    RngStream rng(hash_mix(config.model.seed, stream::kGreen, ev.replica, ev.n));
    const McEstimate est = green_mc(field, ev.site, config.run.green_samples, rng,
                                    config.run.green_distance_cut);
    ev.green = est.mean;
    ev.green_stderr = est.stderr_;
    if (ev.green > 0.0) ev.e_mark = extract_mark(ev, ev.occupation);
  });
  return out;
}

std::vector<double> clock_samples(const ExperimentConfig& config, double t) {
  const ScaleSet scales = scales_for(config);
  check_budget(config, scales, t, config.run.replicas);
  std::vector<double> values(config.run.replicas);
  parallel_for(config.run.replicas, config.run.threads, [&](std::size_t r) {
    EnergyField field(env_params(config, r));
    RngStream rng(hash_mix(config.model.seed, stream::kTrajectory, r));
    RunOptions opts;
    opts.horizon = t * scales.t_n;
    opts.log_b = scales.log_b_n;
    opts.keep_events = false;
    opts.max_events = static_cast<std::uint64_t>(config.run.event_budget);
    const Vertex start = rng.below(field.num_vertices());
    RunResult res = run_X(field, start, opts, rng);
    values[r] = scales.n2phi2 * res.record.clock_over_b_total;
  });
  return values;
}

std::vector<double> age_samples(const ExperimentConfig& config, double t) {
  const ScaleSet scales = scales_for(config);
  const double horizon_factor = 12.0;  // cap; the clock threshold stops runs much earlier
  check_budget(config, scales, horizon_factor, config.run.replicas);
  std::vector<double> values(config.run.replicas,
                             std::numeric_limits<double>::quiet_NaN());
  parallel_for(config.run.replicas, config.run.threads, [&](std::size_t r) {
    EnergyField field(env_params(config, r));
    RngStream rng(hash_mix(config.model.seed, stream::kTrajectory, r));
    RunOptions opts;
    opts.horizon = horizon_factor * scales.t_n;
    opts.log_b = scales.log_b_n;
    opts.keep_events = true;
    opts.stop_clock_over_b = t / scales.n2phi2;
    opts.max_events = static_cast<std::uint64_t>(config.run.event_budget);
    const Vertex start = rng.below(field.num_vertices());
    RunResult res = run_X(field, start, opts, rng);
    if (scales.n2phi2 * res.record.clock_over_b_total < t) return;  // censored, dropped
    values[r] = age_path(res.record, field, scales, t).value(t);
  });
  std::erase_if(values, [](double v) { return std::isnan(v); });
  return values;
}

std::vector<ShallowGap> shallow_clock_gaps(const ExperimentConfig& config, double horizon_t) {
  const ScaleSet scales = scales_for(config);
  check_budget(config, scales, horizon_t, config.run.replicas);
  std::vector<std::vector<double>> gaps(config.run.delta_grid.size(),
                                        std::vector<double>(config.run.replicas, 0.0));
  parallel_for(config.run.replicas, config.run.threads, [&](std::size_t r) {
    EnergyField field(env_params(config, r));
    RngStream rng(hash_mix(config.model.seed, stream::kTrajectory, r));
    RunOptions opts;
    opts.horizon = horizon_t * scales.t_n;
    opts.log_b = scales.log_b_n;
    opts.keep_events = true;
    opts.max_events = static_cast<std::uint64_t>(config.run.event_budget);
    const Vertex start = rng.below(field.num_vertices());
    RunResult res = run_X(field, start, opts, rng);
    const StepPath full = rescale_clock(res.record, scales, horizon_t);
    for (std::size_t d = 0; d < config.run.delta_grid.size(); ++d) {
      const StepPath trunc = rescale_clock_truncated(res.record, field, scales, horizon_t,
                                                     config.run.delta_grid[d]);
      gaps[d][r] = sup_distance(full, trunc);
    }
  });
  std::vector<ShallowGap> out;
  for (std::size_t d = 0; d < config.run.delta_grid.size(); ++d) {
    double mean = 0.0;
    for (double g : gaps[d]) mean += g;
    out.push_back(ShallowGap{config.run.delta_grid[d],
                             mean / static_cast<double>(config.run.replicas)});
  }
  return out;
}

std::string traps_csv(const TrapPipelineResult& result) {
  std::string s =
      "replica,n,site,T_over_tN,H_over_tN,depth_over_B,occupation,window_complete,"
      "visited_within_N,green,green_stderr,e_mark\n";
  for (const TrapEvent& e : result.pooled) {
    s += std::to_string(e.replica) + "," + std::to_string(e.n) + "," + std::to_string(e.site) +
         "," + format_double(e.t_over_tn) + "," + format_double(e.h_over_tn) + "," +
         format_double(e.depth_over_b) + "," + format_double(e.occupation) + "," +
         (e.window_complete ? "1" : "0") + "," + (e.visited_within_n ? "1" : "0") + "," +
         format_double(e.green) + "," + format_double(e.green_stderr) + "," +
         format_double(e.e_mark) + "\n";
  }
  return s;
}

std::string trajectory_csv(const TrajectoryRecord& record, const DiscoveryLog& log) {
  std::string s = "step,site,hold,clock_over_B,discovered_count\n";
  for (std::size_t k = 0; k < record.events.size(); ++k) {
    const WalkEvent& e = record.events[k];
    const auto [d, rcount] = log.counts(std::min(e.t_end, log.horizon()));
    (void)rcount;
    s += std::to_string(k) + "," + std::to_string(e.site) + "," + format_double(e.hold) + "," +
         format_double(e.clock_inc_over_b) + "," + std::to_string(d) + "\n";
  }
  return s;
}

std::string step_path_csv(const StepPath& path, const std::string& value_name) {
  std::string s = "t," + value_name + "\n";
  s += "0," + format_double(path.initial()) + "\n";
  for (std::size_t i = 0; i < path.jump_count(); ++i)
    s += format_double(path.times()[i]) + "," + format_double(path.values()[i]) + "\n";
  return s;
}

nlohmann::json report_to_json(const TestReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["statistic"] = r.statistic;
  if (r.p_value >= 0.0) j["p_value"] = r.p_value;
  if (r.ci_hi > r.ci_lo) j["ci"] = {r.ci_lo, r.ci_hi};
  j["sample_size"] = r.sample_size;
  j["level"] = r.level;
  j["verdict"] = verdict_name(r.verdict);
  if (!r.details.empty()) j["details"] = r.details;
  return j;
}

}  // namespace rem
