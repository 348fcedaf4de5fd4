#pragma once

#include <vector>

#include "rem/rng.hpp"
#include "rem/steppath.hpp"

namespace rem {

struct Jump {
  double location;  // in [0, horizon]
  double size;      // >= truncation
  double mark;      // unit-mean exponential, attached per jump
};

// Truncated increasing pure-jump path plus the small-jump drift compensation.
struct SubordinatorPath {
  std::vector<Jump> jumps;  // sorted by location
  double drift = 0.0;       // per unit time
  double truncation = 0.0;
  double horizon = 0.0;

  double value(double t) const;  // drift * t + sum of sizes at locations <= t
  StepPath jump_part(double end = -1.0) const;
};

// Jumps of size >= eps from a Poisson random measure with intensity
// levy_const * alpha z^{-(1+alpha)} dz dt on [0, horizon]; sizes below eps are
// folded into a deterministic drift levy_const * alpha eps^{1-alpha}/(1-alpha).
SubordinatorPath sample_stable(double alpha, double horizon, double eps, double levy_const,
                               RngStream& rng);

struct ClockJump {
  double time;
  double depth;  // Pareto(alpha) on [delta, inf)
  double mark;   // unit-mean exponential
};

// Limit of the truncated clock: Poisson(delta^{-alpha}) arrivals, independent
// depth and mark per arrival; the path increments are depth * mark.
struct TruncatedClockPath {
  std::vector<ClockJump> jumps;
  double alpha = 0.0;
  double delta = 0.0;
  double horizon = 0.0;

  StepPath path() const;
};

TruncatedClockPath sample_c_delta(double alpha, double delta, double horizon, RngStream& rng);

// keep only jumps of depth >= coarser delta; this is the monotone coupling
TruncatedClockPath thin(const TruncatedClockPath& fine, double delta);

// The limiting age process built from a marked subordinator path: consume
// jumps in location order, each contributing value `size` for a holding time
// `size * mark`; jumps below `truncation` are skipped. Throws when the path
// carries too little mass to fill [0, horizon].
StepPath build_z(const SubordinatorPath& path, double horizon, double truncation = 0.0);

// right-continuous inverse inf{ y : f(y) > t } of a nondecreasing step path
StepPath path_inverse(const StepPath& f, double new_domain_end);

// Laplace exponent of the alpha-stable limit with the given Levy constant:
// levy_const * Gamma(1 - alpha) * lambda^alpha
double psi_stable(double alpha, double lambda, double levy_const);

// Laplace exponent of the truncated clock limit, by quadrature
double psi_delta(double alpha, double delta, double lambda);

}  // namespace rem
