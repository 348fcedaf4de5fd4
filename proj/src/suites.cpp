#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "rem/exactsmall.hpp"
#include "rem/experiment.hpp"
#include "rem/limitproc.hpp"
#include "rem/mathfn.hpp"
#include "rem/parallel.hpp"

namespace rem {

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

TestReport bound_report(std::string name, double statistic, double bound) {
  TestReport r;
  r.name = std::move(name);
  r.statistic = statistic;
  r.ci_hi = bound;
  r.verdict = statistic <= bound ? Verdict::pass : Verdict::fail;
  return r;
}

struct SuiteSink {
  std::vector<TestReport> reports;
  bool hard_failure = false;

  void add(TestReport r) { reports.push_back(std::move(r)); }
  void hard(std::string name, double statistic, double bound) {
    TestReport r = bound_report(std::move(name), statistic, bound);
    if (r.verdict != Verdict::pass) hard_failure = true;
    reports.push_back(std::move(r));
  }
  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(report_to_json(r));
    return arr;
  }
  int exit_code() const {
    if (hard_failure) return 1;
    std::size_t pass = 0;
    for (const auto& r : reports)
      if (r.verdict == Verdict::pass) ++pass;
    if (reports.empty()) return 0;
    return static_cast<double>(pass) >= 0.95 * static_cast<double>(reports.size()) ? 0 : 1;
  }
};

// ---- exact suite -----------------------------------------------------------

void suite_exact(const ExperimentConfig& config, const fs::path& dir, SuiteSink& sink) {
  ModelParams params = config.model;
  if (params.N > 8) params.N = 8;
  std::vector<std::uint64_t> seeds = config.run.env_seeds;
  if (seeds.empty())
    for (std::uint64_t e = 0; e < 20; ++e) seeds.push_back(hash_mix(params.seed, 0xE4AC7, e));
  const std::size_t envs = seeds.size();
  double worst_sym = 0.0, worst_row = 0.0, worst_gsym = 0.0, worst_gsum = 0.0, worst_range = 0.0;
  double min_gap = std::numeric_limits<double>::infinity();
  double worst_heat = 0.0;
  const double t_scale = 5.0;
  for (std::size_t e = 0; e < envs; ++e) {
    ModelParams p = params;
    p.seed = seeds[e];
    EnergyField field(p);
    ExactChain chain(field);
    const Eigen::MatrixXd& l = chain.generator();
    worst_sym = std::max(worst_sym, (l - l.transpose()).cwiseAbs().maxCoeff() /
                                        l.cwiseAbs().maxCoeff());
    worst_row = std::max(worst_row,
                         l.rowwise().sum().cwiseAbs().maxCoeff() / l.cwiseAbs().maxCoeff());
    min_gap = std::min(min_gap, chain.spectral_gap());
    const Eigen::MatrixXd g = chain.green(t_scale);
    worst_gsym = std::max(worst_gsym, (g - g.transpose()).cwiseAbs().maxCoeff() / t_scale);
    worst_gsum = std::max(
        worst_gsum, (g.rowwise().sum().array() - t_scale).abs().maxCoeff() / t_scale);
    // expected visited-count identity: the double-sum route must equal the
    // diagonal route
    const double dim = static_cast<double>(chain.dim());
    double via_pairs = 0.0, via_diag = 0.0;
    for (Eigen::Index y = 0; y < g.cols(); ++y) {
      via_diag += t_scale / g(y, y);
      for (Eigen::Index x = 0; x < g.rows(); ++x) via_pairs += g(x, y) / g(y, y);
    }
    via_pairs /= dim;
    via_diag /= dim;
    worst_range = std::max(worst_range, std::fabs(via_pairs - via_diag) / via_diag);
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
      const Eigen::MatrixXd hk = chain.heat_kernel(t);
      const double dev = (hk.array() - 1.0 / dim).abs().maxCoeff();
      worst_heat = std::max(worst_heat, dev - std::exp(-2.0 * t));
    }
  }
  sink.hard("generator symmetry (relative)", worst_sym, 1e-9);
  sink.hard("generator row sums (relative)", worst_row, 1e-9);
  sink.hard("green symmetry (relative)", worst_gsym, 1e-9);
  sink.hard("green row sums = t (relative)", worst_gsum, 1e-9);
  sink.hard("expected-range identity (relative)", worst_range, 1e-9);
  sink.hard("spectral gap >= 2", 2.0 - min_gap, 1e-9);
  sink.hard("heat kernel deviation bound", worst_heat, 1e-12);
  nlohmann::json j;
  j["N"] = params.N;
  j["environments"] = envs;
  j["seeds"] = seeds;
  j["checks"] = sink.to_json();
  write_file(dir / "exact_report.json", j.dump(2));
}

// ---- dynamics suite --------------------------------------------------------

void suite_dynamics(const ExperimentConfig& config, const fs::path& dir, SuiteSink& sink) {
  const ScaleSet scales = scales_for(config);
  check_budget(config, scales, config.run.horizon_t, 1);
  EnergyField field(env_params(config, 0));
  RngStream rng(hash_mix(config.model.seed, stream::kTrajectory, 0));
  RunOptions opts;
  opts.horizon = config.run.horizon_t * scales.t_n;
  opts.log_b = scales.log_b_n;
  opts.max_events = static_cast<std::uint64_t>(config.run.event_budget);
  const Vertex start = rng.below(field.num_vertices());
  RunResult res = run_X(field, start, opts, rng);
  write_file(dir / "trajectory.csv", trajectory_csv(res.record, res.log));

  std::vector<double> energies;
  for (Vertex x : res.log.order()) energies.push_back(field.energy(x));
  std::vector<double> positive;
  for (double e : energies)
    if (e > 0.0) positive.push_back(e);
  if (positive.size() >= 20)
    sink.add(ks_test(positive, ReferenceCdf::half_gaussian(), 0.01));
  if (energies.size() >= 30) {
    std::vector<double> head(energies.begin(), energies.end() - 1);
    std::vector<double> tail(energies.begin() + 1, energies.end());
    TestReport r;
    r.name = "exploration lag-1 rank autocorrelation";
    r.statistic = rank_correlation(head, tail);
    r.sample_size = head.size();
    r.ci_hi = 0.05;
    r.verdict = std::fabs(r.statistic) < 0.05 ? Verdict::pass : Verdict::fail;
    sink.add(std::move(r));
  }
}

// ---- traps suite -----------------------------------------------------------

std::vector<double> pooled_spacings(const TrapPipelineResult& result) {
  std::vector<double> spacings;
  double prev = 0.0;
  std::size_t replica = static_cast<std::size_t>(-1);
  for (const TrapEvent& e : result.pooled) {
    if (e.replica != replica) {
      replica = e.replica;
      prev = 0.0;
    }
    spacings.push_back(e.t_over_tn - prev);
    prev = e.t_over_tn;
  }
  return spacings;
}

void trap_reports(const ExperimentConfig& config, const TrapPipelineResult& result,
                  SuiteSink& sink) {
  const double alpha = config.model.alpha();
  const double delta = config.model.delta;
  std::vector<double> spacings = pooled_spacings(result);
  std::vector<double> depths;
  std::vector<double> marks, mark_spacings, mark_depths;
  for (std::size_t i = 0; i < result.pooled.size(); ++i) {
    const TrapEvent& e = result.pooled[i];
    depths.push_back(e.depth_over_b);
    if (std::isfinite(e.e_mark)) {
      marks.push_back(e.e_mark);
      mark_spacings.push_back(spacings[i]);
      mark_depths.push_back(e.depth_over_b);
    }
  }
  if (spacings.size() >= 20)
    sink.add(ks_test(spacings, ReferenceCdf::exponential(std::pow(delta, -alpha)), 0.01));
  if (depths.size() >= 20) sink.add(ks_test(depths, ReferenceCdf::pareto_tail(alpha, delta), 0.01));
  if (marks.size() >= 20) sink.add(ks_test(marks, ReferenceCdf::exponential(1.0), 0.01));
  if (marks.size() >= 30) {
    const double r_sd = rank_correlation(mark_spacings, mark_depths);
    const double r_sm = rank_correlation(mark_spacings, marks);
    const double r_dm = rank_correlation(mark_depths, marks);
    TestReport r;
    r.name = "pairwise rank correlations (spacing, depth, mark)";
    r.statistic = std::max({std::fabs(r_sd), std::fabs(r_sm), std::fabs(r_dm)});
    r.sample_size = marks.size();
    r.ci_hi = 0.1;
    r.verdict = r.statistic < 0.1 ? Verdict::pass : Verdict::fail;
    r.details = "spacing-depth " + std::to_string(r_sd) + ", spacing-mark " +
                std::to_string(r_sm) + ", depth-mark " + std::to_string(r_dm);
    sink.add(std::move(r));
  }
  if (depths.size() >= 100) {
    const HillEstimate h = hill_alpha(depths, depths.size() / 5);
    TestReport r;
    r.name = "hill tail index of depths";
    r.statistic = h.alpha;
    r.ci_lo = h.ci_lo;
    r.ci_hi = h.ci_hi;
    r.sample_size = depths.size();
    r.verdict = (alpha >= h.ci_lo - 0.1 && alpha <= h.ci_hi + 0.1) ? Verdict::pass : Verdict::fail;
    sink.add(std::move(r));
  }
}

void suite_traps(const ExperimentConfig& config, const fs::path& dir, SuiteSink& sink) {
  TrapPipelineResult result = run_trap_pipeline(config);
  write_file(dir / "traps.csv", traps_csv(result));
  trap_reports(config, result, sink);
}

// ---- clock suite -----------------------------------------------------------

void suite_clock(const ExperimentConfig& config, const fs::path& dir, SuiteSink& sink) {
  const double alpha = config.model.alpha();
  std::vector<double> samples = clock_samples(config, 1.0);
  std::string csv = "replica,C_N_1\n";
  for (std::size_t i = 0; i < samples.size(); ++i)
    csv += std::to_string(i) + "," + format_double(samples[i]) + "\n";
  write_file(dir / "clock.csv", csv);

  const std::vector<double> lambdas = {0.5, 1.0, 2.0};
  if (samples.size() >= 100)
    sink.add(laplace_compare(
        samples, [&](double l) { return psi_stable(alpha, l, std::tgamma(alpha + 1.0)); },
        lambdas, 2000, 0.01, hash_mix(config.model.seed, stream::kStats, 1)));
  if (samples.size() >= 200) {
    const HillEstimate h = hill_alpha(samples, samples.size() / 10);
    TestReport r;
    r.name = "hill tail index of C_N(1)";
    r.statistic = h.alpha;
    r.ci_lo = h.ci_lo;
    r.ci_hi = h.ci_hi;
    r.sample_size = samples.size();
    r.verdict = std::fabs(h.alpha - alpha) <= 0.1 ? Verdict::pass : Verdict::fail;
    sink.add(std::move(r));
  }
  const std::vector<ShallowGap> gaps = shallow_clock_gaps(config, 1.0);
  bool monotone = true;
  for (std::size_t i = 1; i < gaps.size(); ++i)
    if (gaps[i].delta < gaps[i - 1].delta && gaps[i].mean_gap > gaps[i - 1].mean_gap)
      monotone = false;
  TestReport r;
  r.name = "shallow clock mass decreases with delta";
  r.statistic = gaps.empty() ? 0.0 : gaps.back().mean_gap;
  r.verdict = monotone ? Verdict::pass : Verdict::fail;
  for (const auto& g : gaps)
    r.details += "delta " + std::to_string(g.delta) + ": " + std::to_string(g.mean_gap) + "; ";
  sink.add(std::move(r));
}

// ---- age suite -------------------------------------------------------------

void suite_age(const ExperimentConfig& config, const fs::path& dir, SuiteSink& sink) {
  const double alpha = config.model.alpha();
  std::vector<double> ages = age_samples(config, 1.0);
  std::string csv = "sample,A_N_1\n";
  for (std::size_t i = 0; i < ages.size(); ++i)
    csv += std::to_string(i) + "," + format_double(ages[i]) + "\n";
  write_file(dir / "age.csv", csv);

  RngStream rng(hash_mix(config.model.seed, stream::kLimit, 7));
  std::vector<double> z_samples;
  for (std::size_t i = 0; i < 10000; ++i) {
    SubordinatorPath path = sample_stable(alpha, 8.0, 1e-4, std::tgamma(alpha + 1.0), rng);
    try {
      z_samples.push_back(build_z(path, 1.0 + 1e-9).value(1.0));
    } catch (const std::invalid_argument&) {
      // path too short; skip
    }
  }
  if (ages.size() >= 20 && z_samples.size() >= 20) {
    TestReport r = ks_two_sample(ages, z_samples, 0.001);
    r.name = "age value at 1 vs limit (loose trend check)";
    sink.add(std::move(r));
  }
}

// ---- limits suite ----------------------------------------------------------

void suite_limits(const ExperimentConfig& config, const fs::path& dir, SuiteSink& sink) {
  const double alpha = config.model.alpha();
  const double levy_const = std::tgamma(alpha + 1.0);
  RngStream rng(hash_mix(config.model.seed, stream::kLimit, 1));
  const double eps = 1e-4;

  // jump count vs the intensity integral
  const double expected_jumps = levy_const * std::pow(eps, -alpha);
  std::size_t paths = 2000;
  double total_jumps = 0.0;
  std::vector<double> values1;
  for (std::size_t i = 0; i < paths; ++i) {
    SubordinatorPath p = sample_stable(alpha, 1.0, eps, levy_const, rng);
    total_jumps += static_cast<double>(p.jumps.size());
    values1.push_back(p.value(1.0));
  }
  const double mean_jumps = total_jumps / static_cast<double>(paths);
  const double se = std::sqrt(expected_jumps / static_cast<double>(paths));
  TestReport r;
  r.name = "stable jump count matches intensity";
  r.statistic = (mean_jumps - expected_jumps) / se;
  r.sample_size = paths;
  r.verdict = std::fabs(r.statistic) < 4.0 ? Verdict::pass : Verdict::fail;
  sink.add(std::move(r));

  const std::vector<double> lambdas = {0.5, 1.0, 2.0};
  sink.add(laplace_compare(
      values1, [&](double l) { return psi_stable(alpha, l, levy_const); }, lambdas, 2000, 0.01,
      hash_mix(config.model.seed, stream::kStats, 2)));

  // psi_delta approaches the stable exponent; the truncation gap scales like
  // (lambda delta)^{1-alpha}, so the grid stops at 1
  double worst_rel = 0.0;
  for (double l : {0.25, 0.5, 1.0}) {
    const double pd = psi_delta(alpha, 1e-4, l);
    const double ps = psi_stable(alpha, l, levy_const);
    worst_rel = std::max(worst_rel, std::fabs(pd - ps) / ps);
  }
  sink.hard("psi_delta(1e-4) vs psi relative error", worst_rel, 0.02);

  // one sampled path and the Laplace table as artifacts
  SubordinatorPath sample = sample_stable(alpha, 1.0, eps, levy_const, rng);
  write_file(dir / "subordinator.csv", step_path_csv(sample.jump_part(), "value"));
  std::string table = "lambda,psi_delta,psi\n";
  for (double l : lambdas)
    table += format_double(l) + "," + format_double(psi_delta(alpha, config.model.delta, l)) +
             "," + format_double(psi_stable(alpha, l, levy_const)) + "\n";
  write_file(dir / "laplace.csv", table);
}

}  // namespace

int run_suite(const ExperimentConfig& config) {
  config.model.validate();
  if (!config.model.aging_regime())
    std::cerr << "warning: alpha = " << config.model.alpha()
              << " >= 1, outside the aging regime\n";
  if (!config.model.asymptotic_bias_regime())
    std::cerr << "warning: jump-bias exponent outside the asymptotic regime "
                 "(wants a_N >= 1 and abar < 1/20); results are bench-scale\n";
  const fs::path dir(config.run.output_dir);
  fs::create_directories(dir);
  write_file(dir / "manifest.json", manifest_json(config).dump(2));

  SuiteSink sink;
  const std::string& suite = config.run.suite;
  const bool all = suite == "all";
  if (all || suite == "exact") suite_exact(config, dir, sink);
  if (all || suite == "dynamics") suite_dynamics(config, dir, sink);
  if (all || suite == "traps") suite_traps(config, dir, sink);
  if (all || suite == "clock") suite_clock(config, dir, sink);
  if (all || suite == "age") suite_age(config, dir, sink);
  if (all || suite == "limits") suite_limits(config, dir, sink);
  if (!all && sink.reports.empty() && suite != "exact")
    throw std::invalid_argument("unknown suite: " + suite);

  nlohmann::json out;
  out["suite"] = suite;
  out["reports"] = sink.to_json();
  out["exit_code"] = sink.exit_code();
  write_file(dir / "reports.json", out.dump(2));
  for (const auto& rep : sink.reports)
    std::cout << "[" << verdict_name(rep.verdict) << "] " << rep.name << "\n";
  return sink.exit_code();
}

}  // namespace rem
