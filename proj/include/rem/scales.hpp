#pragma once

#include <cstddef>
#include <cstdint>

#include "rem/env.hpp"

namespace rem {

// moment generating function of the positive part of a standard Gaussian:
// E[e^{lambda E}] = 1/2 + e^{lambda^2/2} Phi(lambda); increasing in lambda
double phi(double lambda);

// depth quantile matching the top order statistic among e^{log_d} draws:
// b = sqrt(2 log_d) - (log log_d + log 4 pi) / (2 sqrt(2 log_d));
// requires log_d > 1
double b_from_log_d(double log_d);

struct ScaleSet {
  double log_t_n = 0.0;  // = cbar * N
  double t_n = 0.0;
  double alpha = 0.0;
  double phi_a = 0.0;
  double log_d_n_asymptotic = 0.0;  // log(t_n * N^2 phi(a)^2)
  double d_n_asymptotic = 0.0;
  double log_d_n = 0.0;   // the value the depth scale is calibrated to
  double b_n = 0.0;       // from log_d_n
  double log_b_n = 0.0;   // = beta sqrt(N) b_n
  double n2phi2 = 0.0;    // N^2 phi(a)^2, the clock/green normalization
};

// all scale quantities are pure functions of the parameters
ScaleSet compute_scales(const ModelParams& params);
// same, but calibrate the depth scale to a given (e.g. estimated) log d_N
ScaleSet compute_scales_with_log_d(const ModelParams& params, double log_d);

struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

// Monte Carlo estimate of the expected number of discovered sites at time t_n,
// replicas started from the uniform law; fresh_env draws a new landscape per
// replica (averaging over environments as well as trajectories). Throws if
// the projected event count exceeds `event_budget`.
McEstimate estimate_d_n(const ModelParams& params, std::size_t replicas, std::size_t threads = 1,
                        double event_budget = 4e9, bool fresh_env = false);

// (d_N / B_N) E[tau ; tau <= delta B_N] by one-dimensional Gaussian quadrature,
// evaluated in log domain so large N cannot overflow
double shallow_trap_mass(const ModelParams& params, const ScaleSet& scales, double delta);

// quadrature value of d_N * P[tau >= z B_N], which approaches z^{-alpha}
double depth_tail_ratio(const ModelParams& params, const ScaleSet& scales, double z);

}  // namespace rem
