#pragma once

#include <limits>
#include <vector>

#include "rem/env.hpp"
#include "rem/scales.hpp"
#include "rem/steppath.hpp"
#include "rem/walk.hpp"

namespace rem {

// One deep-trap encounter. Discovery (entering the 1-neighbourhood) and the
// first actual visit differ by at most a short mixing stretch; both are kept.
struct TrapEvent {
  std::size_t n = 0;  // rank within the replica, 1-based
  std::size_t replica = 0;
  Vertex site = 0;
  double t_over_tn = 0.0;  // discovery time / t_N
  double h_over_tn = std::numeric_limits<double>::infinity();  // first-visit time / t_N
  double depth_over_b = 0.0;
  bool visited_within_n = false;
  // occupation of the site over [H, H + e~], e~ ~ Exponential(mean N^2)
  double occupation = 0.0;
  bool window_complete = false;
  double green = std::numeric_limits<double>::quiet_NaN();
  double green_stderr = std::numeric_limits<double>::quiet_NaN();
  double e_mark = std::numeric_limits<double>::quiet_NaN();
};

// Walk observer that opens a TrapEvent whenever a discovered site clears the
// depth threshold, tracks the occupation window after the first visit, and
// closes the visited-within-N flag. Window randomness comes from its own
// stream so trap bookkeeping never perturbs the trajectory.
class TrapObserver : public WalkObserver {
 public:
  TrapObserver(const EnergyField& field, const ScaleSet& scales, double delta, RngStream& rng);

  void on_discover(Vertex site, double time, std::size_t index) override;
  void on_first_visit(Vertex site, double time) override;
  void on_event(Vertex site, double t_start, double hold) override;
  bool wants_more(double now) const override;  // an occupation window is live

  // finalize against the end of the simulated window and hand the events over
  std::vector<TrapEvent> take_events(double simulated_until);

 private:
  const EnergyField& field_;
  const ScaleSet& scales_;
  double log_threshold_;  // log delta + log B
  double n_ = 0.0;
  double t_n_ = 0.0;
  RngStream& rng_;
  struct Open {
    std::size_t event_index;
    Vertex site;
    double window_end = std::numeric_limits<double>::infinity();
    bool visited = false;
    double discover_time = 0.0;
  };
  std::vector<TrapEvent> events_;
  std::vector<Open> open_;
};

// Monte Carlo Green value at x: mean occupation of x by independent killed
// runs restarted there, alarm ~ Exponential(mean N^2). distance_cut > 0 ends
// a run once the walk strays that far from x and adds the stationary
// occupation mass N^2 2^{-N} the abandoned excursion would have collected
// (the alarm is memoryless, and from that far the walk mixes before any
// further visit, so the substitution is exact up to the pre-mixing return
// mass, which is far below the Monte Carlo error).
McEstimate green_mc(const EnergyField& field, Vertex x, std::size_t samples, RngStream& rng,
                    unsigned distance_cut = 0);

// normalized occupation mark; throws on a nonpositive green estimate
double extract_mark(const TrapEvent& trap, double occupation);

// rescaled clock on [0, T] (time in t_N units): value N^2 phi(a)^2 times the
// accumulated clock in depth-scale units
StepPath rescale_clock(const TrajectoryRecord& record, const ScaleSet& scales, double T);

// truncated variant keeping only increments from sites at depth >= delta B
StepPath rescale_clock_truncated(const TrajectoryRecord& record, const EnergyField& field,
                                 const ScaleSet& scales, double T, double delta);

// age path on [0, T_clock] (rescaled clock time): the depth of the currently
// occupied site, indexed on the clock's own grid
StepPath age_path(const TrajectoryRecord& record, const EnergyField& field,
                  const ScaleSet& scales, double t_clock);

}  // namespace rem
