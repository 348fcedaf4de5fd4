#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rem {

// Right-continuous piecewise-constant path on [0, domain_end]. The value is
// `initial` on [0, t_1) and values[i] on [t_i, t_{i+1}).
class StepPath {
 public:
  StepPath(double initial, double domain_end);

  // append a breakpoint; times must be nondecreasing and within the domain
  void add_jump(double t, double new_value);

  double value(double t) const;  // t in [0, domain_end]
  double final_value() const;
  double domain_end() const { return domain_end_; }
  double initial() const { return initial_; }
  std::size_t jump_count() const { return times_.size(); }
  std::span<const double> times() const { return times_; }
  std::span<const double> values() const { return values_; }

  bool is_nondecreasing() const;

  // inf{ y : f(y) > t } for nondecreasing paths, as a path in t on
  // [0, new_domain_end]; where no such y exists the inverse saturates at
  // domain_end(). Right-continuous by construction.
  StepPath inverse(double new_domain_end) const;

 private:
  double initial_;
  double domain_end_;
  std::vector<double> times_;
  std::vector<double> values_;
};

// breakpoints of |f - g| resolved exactly on the merged grid
double l1_distance(const StepPath& f, const StepPath& g);
double sup_distance(const StepPath& f, const StepPath& g);

}  // namespace rem
