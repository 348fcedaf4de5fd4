#include "rem/scales.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rem/mathfn.hpp"
#include "rem/parallel.hpp"
#include "rem/quadrature.hpp"
#include "rem/walk.hpp"

namespace rem {

double phi(double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("phi: lambda must be nonnegative");
  return 0.5 + std::exp(0.5 * lambda * lambda) * norm_cdf(lambda);
}

double b_from_log_d(double log_d) {
  if (!(log_d > 1.0)) throw std::invalid_argument("b_from_log_d: log d must exceed 1");
  const double s = std::sqrt(2.0 * log_d);
  return s - (std::log(log_d) + std::log(4.0 * std::numbers::pi)) / (2.0 * s);
}

ScaleSet compute_scales_with_log_d(const ModelParams& params, double log_d) {
  params.validate();
  ScaleSet s;
  const double n = static_cast<double>(params.N);
  s.log_t_n = params.cbar * n;
  s.t_n = std::exp(s.log_t_n);
  s.alpha = params.alpha();
  s.phi_a = phi(params.a_eff());
  s.n2phi2 = n * n * s.phi_a * s.phi_a;
  s.log_d_n_asymptotic = s.log_t_n + std::log(s.n2phi2);
  s.d_n_asymptotic = std::exp(s.log_d_n_asymptotic);
  s.log_d_n = log_d;
  s.b_n = b_from_log_d(log_d);
  s.log_b_n = params.beta * std::sqrt(n) * s.b_n;
  return s;
}

ScaleSet compute_scales(const ModelParams& params) {
  params.validate();
  const double n = static_cast<double>(params.N);
  const double log_d = params.cbar * n + std::log(n * n * phi(params.a_eff()) * phi(params.a_eff()));
  return compute_scales_with_log_d(params, log_d);
}

McEstimate estimate_d_n(const ModelParams& params, std::size_t replicas, std::size_t threads,
                        double event_budget, bool fresh_env) {
  if (replicas < 2) throw std::invalid_argument("estimate_d_n: need at least 2 replicas");
  const ScaleSet s = compute_scales(params);
  const double n = static_cast<double>(params.N);
  const double mean_rate = n * s.phi_a * s.phi_a;
  const double projected = static_cast<double>(replicas) * s.t_n * mean_rate;
  if (projected > event_budget)
    throw std::runtime_error("estimate_d_n: projected event count exceeds the budget");

  std::vector<double> counts(replicas, 0.0);
  parallel_for(replicas, threads, [&](std::size_t r) {
    ModelParams env = params;
    if (fresh_env) env.seed = hash_mix(params.seed, 0xF2E54, r);
    EnergyField field(env);
    RngStream rng(hash_mix(params.seed, stream::kTrajectory, r));
    const Vertex start = rng.below(field.num_vertices());
    RunOptions opts;
    opts.horizon = s.t_n;
    opts.keep_events = false;
    opts.max_events = static_cast<std::uint64_t>(event_budget);
    RunResult res = run_X(field, start, opts, rng);
    counts[r] = static_cast<double>(res.log.order().size());
  });

  McEstimate est;
  est.n = replicas;
  double sum = 0.0;
  for (double c : counts) sum += c;
  est.mean = sum / static_cast<double>(replicas);
  double ss = 0.0;
  for (double c : counts) ss += (c - est.mean) * (c - est.mean);
  est.stderr_ = std::sqrt(ss / (static_cast<double>(replicas) - 1.0) / static_cast<double>(replicas));
  return est;
}

double shallow_trap_mass(const ModelParams& params, const ScaleSet& scales, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("shallow_trap_mass: delta must lie in (0,1)");
  if (scales.alpha >= 1.0)
    throw std::runtime_error("shallow_trap_mass: alpha >= 1 is outside the aging regime");
  const double n = static_cast<double>(params.N);
  const double bsn = params.beta * std::sqrt(n);
  // integrate e^{bsn u - u^2/2} / sqrt(2 pi) over u in [0, u_max], u_max the
  // depth cut tau <= delta B; factor out the peak exponent to stay finite
  const double u_max = scales.b_n + std::log(delta) / bsn;
  double integral_log;  // log of (atom 1/2 + integral)
  if (u_max <= 0.0) {
    integral_log = std::log(0.5);
  } else {
    const double u_star = bsn < u_max ? bsn : u_max;
    const double peak = bsn * u_star - 0.5 * u_star * u_star;
    auto f = [&](double u) {
      return std::exp(bsn * u - 0.5 * u * u - peak);
    };
    const double scaled =
        gauss_legendre_composite(f, 0.0, u_max, 64, 16) / std::sqrt(2.0 * std::numbers::pi);
    // total = 1/2 + e^{peak} * scaled
    integral_log = peak + std::log(scaled + 0.5 * std::exp(-peak));
  }
  return std::exp(scales.log_d_n - scales.log_b_n + integral_log);
}

double depth_tail_ratio(const ModelParams& params, const ScaleSet& scales, double z) {
  if (!(z > 0.0)) throw std::invalid_argument("depth_tail_ratio: z must be positive");
  const double bsn = params.beta * std::sqrt(static_cast<double>(params.N));
  const double threshold = scales.b_n + std::log(z) / bsn;
  // P[tau >= z B] = P[E >= b + log z / (beta sqrt N)], a Gaussian upper tail
  return std::exp(scales.log_d_n + std::log(norm_sf(threshold)));
}

}  // namespace rem
