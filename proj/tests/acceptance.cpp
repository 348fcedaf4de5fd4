// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Every tolerance is pinned here; runs are deterministic for the
// seeds below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "rem/exactsmall.hpp"
#include "rem/experiment.hpp"
#include "rem/limitproc.hpp"
#include "rem/mathfn.hpp"
#include "rem/observe.hpp"
#include "rem/parallel.hpp"
#include "rem/scales.hpp"
#include "rem/stats.hpp"
#include "rem/walk.hpp"

using namespace rem;

namespace {

constexpr std::uint64_t kSeed = 0xA6E5EED5ull;
int failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
  std::printf("criterion %2d [%s] %s  --  %s\n", criterion, pass ? "PASS" : "FAIL", what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

// alpha = 0.6 bench model; `a` pinned per criterion (the asymptotic regime
// wants both a >= 1 and a <= abar sqrt(2 log N) with abar < 1/20, which no
// bench N satisfies simultaneously, so experiments pick the side they probe)
ModelParams bench(unsigned n, double a, std::uint64_t salt) {
  ModelParams p;
  p.N = n;
  p.beta = 7.0 / 6.0;
  p.cbar = 0.245;  // alpha = sqrt(2 cbar) / beta = 0.6 exactly
  p.abar = 0.05;
  p.a = a;
  p.delta = 0.3;
  p.seed = hash_mix(kSeed, salt);
  return p;
}

ExperimentConfig pipeline_config(unsigned n, double a, std::uint64_t salt) {
  ExperimentConfig c;
  c.model = bench(n, a, salt);
  c.run.threads = 0;
  c.run.use_estimated_d_n = true;      // calibrate the depth scale to measured d_N
  c.run.fresh_env_per_replica = true;  // annealed statistics
  c.run.d_n_replicas = 12;
  c.run.event_budget = 8e9;
  return c;
}

// ---------------------------------------------------------------------------

void criterion_1_exact_identities() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  const double t_scale = 5.0;
  for (std::size_t e = 0; e < 20; ++e) {
    ModelParams p = bench(e % 2 ? 8 : 6, 0.35, 0x101);
    p.seed = hash_mix(p.seed, e);
    EnergyField field(p);
    ExactChain chain(field);
    const Eigen::MatrixXd& l = chain.generator();
    const double scale = l.cwiseAbs().maxCoeff();
    worst = std::max(worst, (l - l.transpose()).cwiseAbs().maxCoeff() / scale);
    worst = std::max(worst, l.rowwise().sum().cwiseAbs().maxCoeff() / scale);
    const Eigen::MatrixXd g = chain.green(t_scale);
    worst = std::max(worst, (g - g.transpose()).cwiseAbs().maxCoeff() / t_scale);
    worst = std::max(worst, (g.rowwise().sum().array() - t_scale).abs().maxCoeff() / t_scale);
    double via_pairs = 0.0, via_diag = 0.0;
    for (Eigen::Index y = 0; y < g.cols(); ++y) {
      via_diag += t_scale / g(y, y);
      for (Eigen::Index x = 0; x < g.rows(); ++x) via_pairs += g(x, y) / g(y, y);
    }
    worst = std::max(worst, std::fabs(via_pairs - via_diag) / via_diag);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(1, worst < 1e-9 && secs < 60.0,
         "exact identities (symmetry, row sums, green sums, range identity)",
         fmt("worst relative error %.2e over 20 environments, %.1fs", worst, secs));
}

void criterion_2_spectral_gap() {
  double min_gap = 1e9;
  std::size_t envs = 0;
  for (unsigned n = 2; n <= 8; ++n)
    for (std::uint64_t e = 0; e < 15; ++e) {
      ModelParams p = bench(n, 0.4, 0x202);
      p.seed = hash_mix(p.seed, n, e);
      EnergyField field(p);
      ExactChain chain(field);
      min_gap = std::min(min_gap, chain.spectral_gap());
      ++envs;
    }
  EnergyField flat = EnergyField::zero_disorder(bench(6, 0.0, 0x202));
  const double flat_gap = ExactChain(flat).spectral_gap();
  report(2, min_gap >= 2.0 - 1e-9 && std::fabs(flat_gap - 2.0) <= 1e-9,
         "spectral gap >= 2; zero-disorder gap = 2",
         fmt("min gap %.12f over %zu environments (N 2..8), flat gap %.12f", min_gap, envs,
             flat_gap));
}

void criterion_3_heat_kernel_bounds() {
  // per-environment bound on a (t, environment) grid at N = 6
  std::size_t violations = 0;
  double worst_margin = -1e9;
  for (std::uint64_t e = 0; e < 20; ++e) {
    ModelParams p = bench(6, 0.5, 0x303);
    p.seed = hash_mix(p.seed, e);
    EnergyField field(p);
    ExactChain chain(field);
    for (double t : {0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 5.0}) {
      const Eigen::MatrixXd hk = chain.heat_kernel(t);
      const double dev = (hk.array() - 1.0 / 64.0).abs().maxCoeff();
      const double margin = dev - std::exp(-2.0 * t);
      worst_margin = std::max(worst_margin, margin);
      if (margin > 1e-12) ++violations;
    }
  }
  // annealed diagonal at N = 6 over 200 environments
  const double t = 0.8;
  double sum = 0.0, sum2 = 0.0;
  const std::size_t envs = 200;
  for (std::size_t e = 0; e < envs; ++e) {
    ModelParams p = bench(6, 0.5, 0x304);
    p.seed = hash_mix(p.seed, e);
    EnergyField field(p);
    ExactChain chain(field);
    const double diag = chain.heat_kernel(0, 0, t);
    sum += diag;
    sum2 += diag * diag;
  }
  const double mean = sum / envs;
  const double sd = std::sqrt((sum2 - sum * sum / envs) / (envs - 1.0));
  const double bound = std::pow((1.0 + std::exp(-2.0 * t)) / 2.0, 6.0);
  const bool annealed_ok = mean <= bound + 3.0 * sd / std::sqrt(static_cast<double>(envs));
  report(3, violations == 0 && annealed_ok, "heat-kernel deviation and annealed diagonal bounds",
         fmt("%zu grid violations (worst margin %.2e); annealed mean %.5f vs bound %.5f (3se %.5f)",
             violations, worst_margin, mean, bound, 3.0 * sd / std::sqrt(200.0)));
}

void criterion_4_stationary_time() {
  bool all_ok = true;
  std::string detail;
  for (unsigned n : {4u, 6u}) {
    ModelParams p = bench(n, 0.4, 0x404);
    EnergyField field(p);
    ExactChain chain(field);
    StationaryTimeSampler sampler(chain);
    RngStream rng(hash_mix(kSeed, 0x405, n));
    const std::size_t runs = 400000;
    const std::size_t dim = chain.dim();
    std::vector<std::uint64_t> terminal(dim, 0);
    std::vector<double> at_least(6, 0.0);
    std::vector<std::vector<std::uint64_t>> joint(4, std::vector<std::uint64_t>(dim, 0));
    for (std::size_t i = 0; i < runs; ++i) {
      const auto draw = sampler.sample(1, rng);
      ++terminal[draw.terminal];
      for (unsigned k = 1; k <= 5 && draw.blocks >= k; ++k) at_least[k] += 1.0;
      ++joint[std::min<unsigned>(draw.blocks, 4) - 1][draw.terminal];
    }
    const double p_uniform = chi_square_uniform(terminal).p_value;
    double worst_tail = 0.0;
    for (unsigned k = 1; k <= 4; ++k) {
      const double expected = std::exp(-(static_cast<double>(k) - 1.0));
      worst_tail = std::max(worst_tail, std::fabs(at_least[k] / runs - expected) / expected);
    }
    const double p_indep = chi_square_independence(joint).p_value;
    const bool ok = p_uniform > 0.01 && worst_tail < 0.05 && p_indep > 0.01;
    all_ok = all_ok && ok;
    detail += fmt("N=%u: block %.0f, uniform p %.3f, tail rel err %.4f, indep p %.3f; ", n,
                  sampler.block(), p_uniform, worst_tail, p_indep);
  }
  report(4, all_ok, "strong stationary time: uniform terminal, geometric tail, independence",
         detail);
}

void criterion_5_exit_rate() {
  // closed form without disorder
  EnergyField flat = EnergyField::zero_disorder(bench(5, 0.0, 0x505));
  const bool closed_form = std::fabs(exit_rate_h2(flat, 0) - 4.0) < 1e-12;
  // simulated occupation before distance 2 at N = 5
  ModelParams p = bench(5, 0.5, 0x506);
  EnergyField field(p);
  const Vertex start = 11;
  const double rate = exit_rate_h2(field, start);
  RngStream rng(hash_mix(kSeed, 0x507));
  std::vector<double> occupations;
  for (int run = 0; run < 10000; ++run) {
    Vertex state = start;
    double occ = 0.0;
    while (hamming(state, start) < 2) {
      auto [hold, next] = step_X(field, state, rng);
      if (state == start) occ += hold;
      state = next;
    }
    occupations.push_back(occ);
  }
  const TestReport ks = ks_test(occupations, ReferenceCdf::exponential(rate), 0.01);
  report(5, closed_form && ks.verdict == Verdict::pass,
         "occupation before distance 2 is exponential with the stated rate",
         fmt("flat rate N-1 %s; KS stat %.4f p %.4f (n=10000, rate %.4f)",
             closed_form ? "exact" : "WRONG", ks.statistic, ks.p_value, rate));
}

void criterion_6_exploration_iid() {
  ModelParams p = bench(20, -1.0, 0x606);  // derived a
  EnergyField field(p);
  RngStream rng(hash_mix(kSeed, 0x607));
  RunOptions opts;
  opts.horizon = 250.0;
  opts.keep_events = false;
  RunResult res = run_X(field, rng.below(field.num_vertices()), opts, rng);
  std::vector<double> energies, positive;
  const std::size_t n_take = std::min<std::size_t>(res.log.order().size(), 10000);
  for (std::size_t i = 0; i < n_take; ++i) {
    energies.push_back(field.energy(res.log.order()[i]));
    if (energies.back() > 0.0) positive.push_back(energies.back());
  }
  const TestReport ks = ks_test(positive, ReferenceCdf::half_gaussian(), 0.01);
  std::vector<double> head(energies.begin(), energies.end() - 1);
  std::vector<double> tail(energies.begin() + 1, energies.end());
  const double rho = rank_correlation(head, tail);
  report(6, energies.size() >= 10000 && ks.verdict == Verdict::pass && std::fabs(rho) < 0.05,
         "exploration-order energies i.i.d. positive-part gaussian",
         fmt("n=%zu, KS p %.4f, lag-1 rank autocorrelation %.4f", energies.size(), ks.p_value,
             rho));
}

std::vector<double> spacings_of(const TrapPipelineResult& result) {
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

void criterion_7_deep_trap_statistics() {
  // the strong-bias side (a >= 1): discovered traps are actually visited, so
  // occupation marks exist; the exploration laws hold for any bias
  ExperimentConfig c = pipeline_config(24, 1.25, 0x707);
  c.run.replicas = 60;     // longer windows per replica reduce the censoring
  c.run.horizon_t = 3.0;   // bias on pooled spacings
  c.run.mark_events = 400;
  c.run.green_samples = 48;
  const TrapPipelineResult result = run_trap_pipeline(c);
  const double alpha = c.model.alpha();
  const double delta = c.model.delta;

  const std::vector<double> spacings = spacings_of(result);
  std::vector<double> depths, marks, mark_spacings, mark_depths;
  for (std::size_t i = 0; i < result.pooled.size(); ++i) {
    const TrapEvent& e = result.pooled[i];
    depths.push_back(e.depth_over_b);
    if (std::isfinite(e.e_mark)) {
      marks.push_back(e.e_mark);
      mark_spacings.push_back(spacings[i]);
      mark_depths.push_back(e.depth_over_b);
    }
  }
  const bool enough = result.pooled.size() >= 200;
  const TestReport ks_sp =
      ks_test(spacings, ReferenceCdf::exponential(std::pow(delta, -alpha)), 0.01);
  const TestReport ks_de = ks_test(depths, ReferenceCdf::pareto_tail(alpha, delta), 0.01);
  const TestReport ks_ma = ks_test(marks, ReferenceCdf::exponential(1.0), 0.01);
  const double r_sd = rank_correlation(mark_spacings, mark_depths);
  const double r_sm = rank_correlation(mark_spacings, marks);
  const double r_dm = rank_correlation(mark_depths, marks);
  const double worst_rho = std::max({std::fabs(r_sd), std::fabs(r_sm), std::fabs(r_dm)});
  const bool ok = enough && ks_sp.verdict == Verdict::pass && ks_de.verdict == Verdict::pass &&
                  ks_ma.verdict == Verdict::pass && worst_rho < 0.1;
  report(7, ok, "deep traps: exponential spacings, power-law depths, unit marks, independence",
         fmt("events %zu (marks %zu); KS p: spacings %.4f depths %.4f marks %.4f; max |rho| %.4f",
             result.pooled.size(), marks.size(), ks_sp.p_value, ks_de.p_value, ks_ma.p_value,
             worst_rho));
}

void criterion_8_green_concentration() {
  bool ok = true;
  std::string detail;
  std::vector<double> iqrs;
  for (unsigned n : {16u, 20u, 24u}) {
    ExperimentConfig c = pipeline_config(n, 1.25, 0x808);  // strong-bias regime
    c.run.replicas = 16;
    c.run.horizon_t = 2.0;
    c.run.mark_events = 60;
    c.run.green_samples = 64;
    const TrapPipelineResult result = run_trap_pipeline(c);
    std::vector<double> normalized;
    for (const TrapEvent& e : result.pooled)
      if (std::isfinite(e.green) && e.green > 0.0)
        normalized.push_back(result.scales.n2phi2 * e.green);
    std::sort(normalized.begin(), normalized.end());
    const std::size_t m = normalized.size();
    if (m < 50) {
      ok = false;
      detail += fmt("N=%u: only %zu events; ", n, m);
      continue;
    }
    const double median = normalized[m / 2];
    const double iqr = normalized[(3 * m) / 4] - normalized[m / 4];
    iqrs.push_back(iqr);
    if (n == 24 && !(median >= 0.7 && median <= 1.3)) ok = false;
    detail += fmt("N=%u: n=%zu median %.3f iqr %.3f; ", n, m, median, iqr);
  }
  const bool shrinking = iqrs.size() == 3 && iqrs[1] < iqrs[0] && iqrs[2] < iqrs[1];
  report(8, ok && shrinking,
         "green concentration: normalized median in [0.7, 1.3], interquartile range shrinks",
         detail + (shrinking ? "iqr monotone" : "iqr NOT monotone"));
}

void criterion_9_clock_limit() {
  ExperimentConfig c = pipeline_config(24, 1.25, 0x909);
  c.run.replicas = 800;
  const std::vector<double> samples = clock_samples(c, 1.0);
  const double alpha = c.model.alpha();
  const std::vector<double> lambdas = {0.5, 1.0, 2.0};
  const TestReport lap = laplace_compare(
      samples, [&](double l) { return psi_stable(alpha, l, std::tgamma(alpha + 1.0)); }, lambdas,
      2000, 0.01, hash_mix(kSeed, 0x90A));
  const HillEstimate hill = hill_alpha(samples, samples.size() / 10);
  const bool hill_ok = std::fabs(hill.alpha - alpha) <= 0.1;
  report(9, lap.verdict == Verdict::pass && hill_ok,
         "clock value at 1: laplace exponent within bootstrap CIs, hill tail index",
         fmt("n=%zu; %s, measured %.4f in [%.4f, %.4f]; hill %.4f (k=%zu) vs alpha %.1f +- 0.1",
             samples.size(), lap.details.c_str(), lap.statistic, lap.ci_lo, lap.ci_hi,
             hill.alpha, hill.k, alpha));
}

void criterion_10_limit_engine() {
  const double alpha = 0.6;
  const double levy = std::tgamma(alpha + 1.0);
  RngStream rng(hash_mix(kSeed, 0xA0A));
  std::vector<double> values;
  for (int i = 0; i < 10000; ++i)
    values.push_back(sample_stable(alpha, 1.0, 1e-4, levy, rng).value(1.0));
  const std::vector<double> lambdas = {0.5, 1.0, 2.0};
  const TestReport lap = laplace_compare(
      values, [&](double l) { return psi_stable(alpha, l, levy); }, lambdas, 2000, 0.01,
      hash_mix(kSeed, 0xA0B));

  // truncated exponent against the stable one (grid where 2% is attainable)
  double worst_rel = 0.0;
  for (double l : {0.25, 0.5, 1.0})
    worst_rel =
        std::max(worst_rel, std::fabs(psi_delta(alpha, 1e-4, l) - psi_stable(alpha, l, levy)) /
                                psi_stable(alpha, l, levy));

  // age-limit self-similarity of index 1
  std::vector<double> z1, z2;
  RngStream rng2(hash_mix(kSeed, 0xA0C));
  for (int i = 0; i < 6000; ++i) {
    try {
      z1.push_back(build_z(sample_stable(alpha, 4.0, 1e-4, levy, rng2), 1.0 + 1e-9).value(1.0));
    } catch (const std::invalid_argument&) {
    }
  }
  RngStream rng3(hash_mix(kSeed, 0xA0D));
  for (int i = 0; i < 6000; ++i) {
    try {
      z2.push_back(build_z(sample_stable(alpha, 6.0, 1e-4, levy, rng3), 2.0 + 1e-9).value(2.0) /
                   2.0);
    } catch (const std::invalid_argument&) {
    }
  }
  const TestReport ks_ss = ks_two_sample(z1, z2, 0.01);

  // structural check of the truncated age construction: values are the jump
  // sizes in order, holding times size * mark
  bool structure_ok = true;
  {
    RngStream rng4(hash_mix(kSeed, 0xA0E));
    const SubordinatorPath path = sample_stable(alpha, 3.0, 0.05, levy, rng4);
    double total = 0.0;
    std::vector<std::pair<double, double>> expected;  // (value, holding)
    for (const Jump& j : path.jumps)
      if (j.size >= 0.1) {
        expected.emplace_back(j.size, j.size * j.mark);
        total += j.size * j.mark;
      }
    const StepPath z = build_z(path, total * 0.999, 0.1);
    double t = 0.0;
    for (const auto& [value, holding] : expected) {
      if (t >= total * 0.999) break;
      const double mid = std::min(t + 0.5 * holding, total * 0.999);
      if (std::fabs(z.value(mid) - value) > 1e-12) structure_ok = false;
      t += holding;
    }
  }
  const bool ok = lap.verdict == Verdict::pass && worst_rel < 0.02 &&
                  ks_ss.verdict == Verdict::pass && structure_ok;
  report(10, ok, "limit engine: stable laplace, truncated exponent, self-similarity, structure",
         fmt("laplace %s; psi_delta rel err %.4f; self-similarity KS p %.4f (n=%zu/%zu); "
             "structure %s",
             verdict_name(lap.verdict), worst_rel, ks_ss.p_value, z1.size(), z2.size(),
             structure_ok ? "exact" : "broken"));
}

void criterion_11_age_trend() {
  const double alpha = 0.6;
  const double levy = std::tgamma(alpha + 1.0);
  std::vector<double> z_pool;
  RngStream rng(hash_mix(kSeed, 0xB0B));
  for (int i = 0; i < 20000; ++i) {
    try {
      z_pool.push_back(
          build_z(sample_stable(alpha, 4.0, 1e-4, levy, rng), 1.0 + 1e-9).value(1.0));
    } catch (const std::invalid_argument&) {
    }
  }
  std::vector<double> distances;
  std::string detail;
  for (unsigned n : {16u, 20u, 24u}) {
    ExperimentConfig c = pipeline_config(n, 1.25, 0xB0C);
    c.run.replicas = 1200;
    const std::vector<double> ages = age_samples(c, 1.0);
    const double d = ks_statistic_two_sample(ages, z_pool);
    distances.push_back(d);
    detail += fmt("N=%u: KS distance %.4f (n=%zu); ", n, d, ages.size());
  }
  const bool monotone = distances[1] < distances[0] && distances[2] < distances[1];
  report(11, monotone, "age value at 1 approaches the limit law monotonically in N", detail);
}

void criterion_12_shallow_negligibility() {
  ExperimentConfig c = pipeline_config(24, 1.25, 0xC0C);
  c.run.replicas = 48;
  c.run.delta_grid = {0.5, 0.2, 0.1};
  const std::vector<ShallowGap> gaps = shallow_clock_gaps(c, 1.0);
  const bool measured_ok =
      gaps[1].mean_gap < gaps[0].mean_gap && gaps[2].mean_gap < gaps[1].mean_gap;

  // quadrature slope of the shallow mass in log delta at large N
  ModelParams big = bench(512, -1.0, 0xC0D);
  const ScaleSet s = compute_scales(big);
  const std::vector<double> grid = {0.5, 0.2, 0.1, 0.05};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double d : grid) {
    const double x = std::log(d), y = std::log(shallow_trap_mass(big, s, d));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(grid.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const bool slope_ok = std::fabs(slope - (1.0 - big.alpha())) < 0.15;
  report(12, measured_ok && slope_ok,
         "shallow-trap clock mass shrinks with delta; quadrature slope near 1 - alpha",
         fmt("measured gaps %.4g / %.4g / %.4g at delta 0.5/0.2/0.1; slope %.4f vs %.4f +- 0.15",
             gaps[0].mean_gap, gaps[1].mean_gap, gaps[2].mean_gap, slope, 1.0 - big.alpha()));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion_1_exact_identities();
  criterion_2_spectral_gap();
  criterion_3_heat_kernel_bounds();
  criterion_4_stationary_time();
  criterion_5_exit_rate();
  criterion_6_exploration_iid();
  criterion_7_deep_trap_statistics();
  criterion_8_green_concentration();
  criterion_9_clock_limit();
  criterion_10_limit_engine();
  criterion_11_age_trend();
  criterion_12_shallow_negligibility();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d of 12 criteria pass (%.1fs total)\n", 12 - failures, secs);
  return failures;
}
