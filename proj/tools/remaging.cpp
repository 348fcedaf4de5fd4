// Command-line front end: scale reports, simulation suites, exact small-N
// checks, limit-process sampling and post-hoc analysis of trap tables.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rem/exactsmall.hpp"
#include "rem/experiment.hpp"
#include "rem/limitproc.hpp"
#include "rem/mathfn.hpp"
#include "rem/scales.hpp"
#include "rem/stats.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::vector<std::uint64_t> env_seeds;
  unsigned n = 0;
  double beta = 0.0;
  double cbar = 0.0;
  double abar = -1.0;
  double a = -2.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::size_t replicas = 0;
  double horizon_t = 0.0;
  std::size_t threads = std::size_t(-1);
  std::string output_dir;
  bool use_estimated_d_n = false;
  bool fresh_env = false;
};

void attach_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file");
  cmd->add_option("-N,--N", f.n, "number of spins");
  cmd->add_option("--beta", f.beta, "inverse temperature");
  cmd->add_option("--cbar", f.cbar, "time-scale exponent, in (0, log 2)");
  cmd->add_option("--abar", f.abar, "jump-bias prefactor (a = abar sqrt(2 log N))");
  cmd->add_option("--a", f.a, "explicit jump-bias exponent (overrides abar)");
  cmd->add_option("--delta", f.delta, "deep-trap threshold in depth-scale units");
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--replicas", f.replicas, "number of replicas");
  cmd->add_option("--horizon-T", f.horizon_t, "walk horizon in t_N units");
  cmd->add_option("--threads", f.threads, "worker threads (0 = auto)");
  cmd->add_option("--output-dir", f.output_dir, "artifact directory");
  cmd->add_flag("--use-estimated-dN", f.use_estimated_d_n,
                "calibrate the depth scale to the Monte Carlo d_N estimate");
  cmd->add_flag("--fresh-env-per-replica", f.fresh_env,
                "draw a fresh landscape per replica (annealed statistics)");
}

rem::ExperimentConfig resolve_config(const CommonFlags& f) {
  rem::ExperimentConfig c;
  if (!f.config_path.empty()) c = rem::load_config_file(f.config_path);
  if (f.n) c.model.N = f.n;
  if (f.beta > 0.0) c.model.beta = f.beta;
  if (f.cbar > 0.0) c.model.cbar = f.cbar;
  if (f.abar >= 0.0) c.model.abar = f.abar;
  if (f.a > -2.0) c.model.a = f.a;
  if (f.delta > 0.0) c.model.delta = f.delta;
  if (f.seed) c.model.seed = f.seed;
  if (f.replicas) c.run.replicas = f.replicas;
  if (f.horizon_t > 0.0) c.run.horizon_t = f.horizon_t;
  if (f.threads != std::size_t(-1)) c.run.threads = f.threads;
  if (!f.output_dir.empty()) c.run.output_dir = f.output_dir;
  if (f.use_estimated_d_n) c.run.use_estimated_d_n = true;
  if (f.fresh_env) c.run.fresh_env_per_replica = true;
  if (!f.env_seeds.empty()) c.run.env_seeds = f.env_seeds;
  c.model.validate();
  return c;
}

int cmd_scales(const rem::ExperimentConfig& config, bool with_estimate) {
  const rem::ScaleSet s = rem::scales_for(config);
  nlohmann::json j;
  j["alpha"] = s.alpha;
  j["phi_a"] = s.phi_a;
  j["a_eff"] = config.model.a_eff();
  j["log_t_N"] = s.log_t_n;
  j["t_N"] = s.t_n;
  j["log_d_N_asymptotic"] = s.log_d_n_asymptotic;
  j["d_N_asymptotic"] = s.d_n_asymptotic;
  j["log_d_N_used"] = s.log_d_n;
  j["b_N"] = s.b_n;
  j["log_B_N"] = s.log_b_n;
  j["N2_phi2"] = s.n2phi2;
  if (with_estimate) {
    const rem::McEstimate est = rem::estimate_d_n(config.model, config.run.d_n_replicas,
                                                  config.run.threads, config.run.event_budget);
    j["d_N_estimate"] = {{"mean", est.mean}, {"stderr", est.stderr_}, {"replicas", est.n}};
  }
  if (!config.model.aging_regime())
    j["warning"] = "alpha >= 1: outside the aging regime";
  else if (!config.model.asymptotic_bias_regime())
    j["warning"] = "jump-bias exponent outside the asymptotic regime (a_N >= 1, abar < 1/20)";
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_analyze(const std::string& traps_path, const rem::ExperimentConfig& config) {
  std::ifstream in(traps_path);
  if (!in) {
    std::cerr << "cannot open " << traps_path << "\n";
    return 2;
  }
  std::string line;
  std::getline(in, line);  // header
  rem::TrapPipelineResult result;
  result.scales = rem::scales_for(config);
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> cells;
    while (std::getline(ss, tok, ',')) cells.push_back(tok);
    if (cells.size() < 12) continue;
    rem::TrapEvent e;
    e.replica = std::stoull(cells[0]);
    e.n = std::stoull(cells[1]);
    e.site = std::stoull(cells[2]);
    e.t_over_tn = std::stod(cells[3]);
    e.h_over_tn = std::stod(cells[4]);
    e.depth_over_b = std::stod(cells[5]);
    e.occupation = std::stod(cells[6]);
    e.window_complete = cells[7] == "1";
    e.visited_within_n = cells[8] == "1";
    e.green = std::stod(cells[9]);
    e.green_stderr = std::stod(cells[10]);
    e.e_mark = std::stod(cells[11]);
    result.pooled.push_back(e);
  }
  rem::ExperimentConfig cfg = config;
  cfg.run.suite = "traps";
  // reuse the suite reporting on the parsed table
  const double alpha = cfg.model.alpha();
  nlohmann::json reports = nlohmann::json::array();
  std::vector<double> spacings, depths, marks;
  double prev = 0.0;
  std::size_t rep = static_cast<std::size_t>(-1);
  for (const auto& e : result.pooled) {
    if (e.replica != rep) {
      rep = e.replica;
      prev = 0.0;
    }
    spacings.push_back(e.t_over_tn - prev);
    prev = e.t_over_tn;
    depths.push_back(e.depth_over_b);
    if (std::isfinite(e.e_mark)) marks.push_back(e.e_mark);
  }
  if (spacings.size() >= 20)
    reports.push_back(rem::report_to_json(rem::ks_test(
        spacings, rem::ReferenceCdf::exponential(std::pow(cfg.model.delta, -alpha)), 0.01)));
  if (depths.size() >= 20)
    reports.push_back(rem::report_to_json(
        rem::ks_test(depths, rem::ReferenceCdf::pareto_tail(alpha, cfg.model.delta), 0.01)));
  if (marks.size() >= 20)
    reports.push_back(
        rem::report_to_json(rem::ks_test(marks, rem::ReferenceCdf::exponential(1.0), 0.01)));
  nlohmann::json out;
  out["source"] = traps_path;
  out["reports"] = reports;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_report(const std::string& dir) {
  namespace fs = std::filesystem;
  std::size_t pass = 0, total = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.path().filename() != "reports.json") continue;
    std::ifstream in(entry.path());
    nlohmann::json j;
    in >> j;
    for (const auto& r : j["reports"]) {
      ++total;
      if (r["verdict"] == "pass") ++pass;
    }
  }
  if (total == 0) {
    std::cerr << "no reports under " << dir << "\n";
    return 2;
  }
  const double frac = static_cast<double>(pass) / static_cast<double>(total);
  std::cout << pass << "/" << total << " tests pass (" << frac * 100.0 << "%)\n";
  return frac >= 0.95 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aging dynamics laboratory for the random energy model on the hypercube"};
  app.require_subcommand(1);

  CommonFlags flags;
  bool with_estimate = false;
  std::string traps_path, report_dir;

  CLI::App* scales = app.add_subcommand("scales", "print the scale set as JSON");
  attach_flags(scales, flags);
  scales->add_flag("--estimate", with_estimate, "also run the Monte Carlo d_N estimate");

  CLI::App* simulate = app.add_subcommand("simulate", "trajectory run with CSV summary");
  attach_flags(simulate, flags);
  CLI::App* traps = app.add_subcommand("traps", "deep-trap detection pipeline");
  attach_flags(traps, flags);
  CLI::App* exact = app.add_subcommand("exact", "exact small-N identity checks");
  attach_flags(exact, flags);
  exact->add_option("--env-seeds", flags.env_seeds, "explicit environment seeds");
  CLI::App* limits = app.add_subcommand("limits", "limit-process sampling and checks");
  attach_flags(limits, flags);
  CLI::App* clock = app.add_subcommand("clock", "rescaled clock statistics");
  attach_flags(clock, flags);
  CLI::App* age = app.add_subcommand("age", "rescaled age statistics");
  attach_flags(age, flags);
  CLI::App* all = app.add_subcommand("all", "every suite");
  attach_flags(all, flags);

  CLI::App* analyze = app.add_subcommand("analyze", "statistics from an existing traps.csv");
  attach_flags(analyze, flags);
  analyze->add_option("--traps", traps_path, "traps.csv path")->required();

  CLI::App* report = app.add_subcommand("report", "aggregate suite verdicts");
  report->add_option("--dir", report_dir, "artifact directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (report->parsed()) return cmd_report(report_dir);
    rem::ExperimentConfig config = resolve_config(flags);
    if (scales->parsed()) return cmd_scales(config, with_estimate);
    if (analyze->parsed()) return cmd_analyze(traps_path, config);
    for (const auto& [cmd, suite] :
         {std::pair<CLI::App*, const char*>{simulate, "dynamics"},
          {traps, "traps"},
          {exact, "exact"},
          {limits, "limits"},
          {clock, "clock"},
          {age, "age"},
          {all, "all"}}) {
      if (cmd->parsed()) {
        config.run.suite = suite;
        return rem::run_suite(config);
      }
    }
  } catch (const rem::BudgetExceeded& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
