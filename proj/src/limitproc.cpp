#include "rem/limitproc.hpp"

#include <cmath>
#include <stdexcept>

#include "rem/quadrature.hpp"

namespace rem {

double SubordinatorPath::value(double t) const {
  if (t < 0.0 || t > horizon) throw std::invalid_argument("SubordinatorPath::value: t outside domain");
  double acc = drift * t;
  for (const Jump& j : jumps) {
    if (j.location > t) break;
    acc += j.size;
  }
  return acc;
}

StepPath SubordinatorPath::jump_part(double end) const {
  StepPath p(0.0, end > 0.0 ? end : horizon);
  double acc = 0.0;
  for (const Jump& j : jumps) {
    acc += j.size;
    p.add_jump(j.location, acc);
  }
  return p;
}

SubordinatorPath sample_stable(double alpha, double horizon, double eps, double levy_const,
                               RngStream& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("sample_stable: alpha in (0,1)");
  if (!(eps > 0.0) || !(horizon > 0.0) || !(levy_const > 0.0))
    throw std::invalid_argument("sample_stable: bad arguments");
  SubordinatorPath path;
  path.truncation = eps;
  path.horizon = horizon;
  path.drift = levy_const * alpha * std::pow(eps, 1.0 - alpha) / (1.0 - alpha);
  const double rate = levy_const * std::pow(eps, -alpha);  // total jump intensity
  double t = rng.exponential(rate);
  while (t <= horizon) {
    const double size = eps * std::pow(rng.uniform(), -1.0 / alpha);
    path.jumps.push_back(Jump{t, size, rng.exponential(1.0)});
    t += rng.exponential(rate);
  }
  return path;
}

StepPath TruncatedClockPath::path() const {
  StepPath p(0.0, horizon);
  double acc = 0.0;
  for (const ClockJump& j : jumps) {
    acc += j.depth * j.mark;
    p.add_jump(j.time, acc);
  }
  return p;
}

TruncatedClockPath sample_c_delta(double alpha, double delta, double horizon, RngStream& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("sample_c_delta: alpha in (0,1)");
  if (!(delta > 0.0) || !(horizon > 0.0))
    throw std::invalid_argument("sample_c_delta: bad arguments");
  TruncatedClockPath out;
  out.alpha = alpha;
  out.delta = delta;
  out.horizon = horizon;
  const double rate = std::pow(delta, -alpha);
  double t = rng.exponential(rate);
  while (t <= horizon) {
    const double depth = delta * std::pow(rng.uniform(), -1.0 / alpha);
    out.jumps.push_back(ClockJump{t, depth, rng.exponential(1.0)});
    t += rng.exponential(rate);
  }
  return out;
}

TruncatedClockPath thin(const TruncatedClockPath& fine, double delta) {
  if (delta < fine.delta) throw std::invalid_argument("thin: delta must be coarser");
  TruncatedClockPath out;
  out.alpha = fine.alpha;
  out.delta = delta;
  out.horizon = fine.horizon;
  for (const ClockJump& j : fine.jumps)
    if (j.depth >= delta) out.jumps.push_back(j);
  return out;
}

StepPath build_z(const SubordinatorPath& path, double horizon, double truncation) {
  StepPath z(0.0, horizon);
  double elapsed = 0.0;
  bool first = true;
  for (const Jump& j : path.jumps) {
    if (j.size < truncation) continue;
    if (first) {
      // the value before the first holding interval ends is already j.size
      z = StepPath(j.size, horizon);
      first = false;
    } else {
      z.add_jump(elapsed, j.size);
    }
    elapsed += j.size * j.mark;
    if (elapsed >= horizon) return z;
  }
  throw std::invalid_argument("build_z: path exhausted before the horizon");
}

StepPath path_inverse(const StepPath& f, double new_domain_end) { return f.inverse(new_domain_end); }

double psi_stable(double alpha, double lambda, double levy_const) {
  return levy_const * std::tgamma(1.0 - alpha) * std::pow(lambda, alpha);
}

double psi_delta(double alpha, double delta, double lambda) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(delta > 0.0) || !(lambda > 0.0))
    throw std::invalid_argument("psi_delta: bad arguments");
  // delta^{-alpha} E[1 - e^{-lambda e tau}]; the exponential mark integrates
  // to 1 - 1/(1 + lambda z), leaving one integral over the depth law:
  // integral_delta^inf alpha z^{-alpha-1} lambda z / (1 + lambda z) dz,
  // computed on the log scale z = delta e^s
  auto f = [&](double s) {
    const double z = delta * std::exp(s);
    return alpha * std::exp(-alpha * s) * (lambda * z) / (1.0 + lambda * z);
  };
  const double s_max = 80.0 / alpha;  // tail mass below e^{-80}
  return std::pow(delta, -alpha) * gauss_legendre_composite(f, 0.0, s_max, 64, 64);
}

}  // namespace rem
