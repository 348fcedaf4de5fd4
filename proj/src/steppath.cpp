#include "rem/steppath.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rem {

StepPath::StepPath(double initial, double domain_end)
    : initial_(initial), domain_end_(domain_end) {
  if (!(domain_end > 0.0)) throw std::invalid_argument("StepPath: domain_end must be positive");
}

void StepPath::add_jump(double t, double new_value) {
  if (t < 0.0 || t > domain_end_) throw std::invalid_argument("StepPath: breakpoint outside domain");
  if (!times_.empty() && t < times_.back())
    throw std::invalid_argument("StepPath: breakpoints must be nondecreasing");
  if (!times_.empty() && t == times_.back()) {
    values_.back() = new_value;  // same instant: the last write wins
    return;
  }
  times_.push_back(t);
  values_.push_back(new_value);
}

double StepPath::value(double t) const {
  if (t < 0.0 || t > domain_end_) throw std::invalid_argument("StepPath: evaluation outside domain");
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return initial_;
  return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double StepPath::final_value() const { return values_.empty() ? initial_ : values_.back(); }

bool StepPath::is_nondecreasing() const {
  double prev = initial_;
  for (double v : values_) {
    if (v < prev) return false;
    prev = v;
  }
  return true;
}

StepPath StepPath::inverse(double new_domain_end) const {
  if (!is_nondecreasing())
    throw std::invalid_argument("StepPath::inverse: path must be nondecreasing");
  StepPath g(domain_end_, new_domain_end);
  // Sweep levels from the top: on [v_{i-1}, v_i) the inverse equals t_i, and
  // below the initial level it is 0 (f(0) already exceeds those thresholds).
  // Levels at or above the final value keep the saturation value domain_end.
  struct Piece {
    double level_lo;
    double time;
  };
  std::vector<Piece> pieces;
  double level = initial_;
  pieces.push_back({0.0, 0.0});  // thresholds below initial_: inverse is 0
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (values_[i] > level) {
      pieces.push_back({level, times_[i]});
      level = values_[i];
    }
  }
  // assemble: inverse value on [pieces[k].level_lo, pieces[k+1].level_lo)
  // is pieces[k].time; at and beyond the final level it stays domain_end_.
  StepPath out(pieces[0].time, new_domain_end);
  for (std::size_t k = 1; k < pieces.size(); ++k) {
    if (pieces[k].level_lo > new_domain_end) return out;
    out.add_jump(pieces[k].level_lo, pieces[k].time);
  }
  if (level <= new_domain_end) out.add_jump(level, domain_end_);
  return out;
}

namespace {

template <typename Accumulate>
void sweep_pair(const StepPath& f, const StepPath& g, Accumulate&& acc) {
  if (std::fabs(f.domain_end() - g.domain_end()) > 1e-12 * (1.0 + f.domain_end()))
    throw std::invalid_argument("path distance: mismatched domains");
  const double end = f.domain_end();
  std::vector<double> grid;
  grid.reserve(f.jump_count() + g.jump_count() + 2);
  grid.push_back(0.0);
  for (double t : f.times()) grid.push_back(t);
  for (double t : g.times()) grid.push_back(t);
  grid.push_back(end);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    double lo = grid[i], hi = grid[i + 1];
    if (hi > end) hi = end;
    if (hi <= lo) continue;
    acc(std::fabs(f.value(lo) - g.value(lo)), hi - lo);
  }
}

}  // namespace

double l1_distance(const StepPath& f, const StepPath& g) {
  double total = 0.0;
  sweep_pair(f, g, [&](double d, double len) { total += d * len; });
  return total;
}

double sup_distance(const StepPath& f, const StepPath& g) {
  double best = 0.0;
  sweep_pair(f, g, [&](double d, double) {
    if (d > best) best = d;
  });
  return best;
}

}  // namespace rem
