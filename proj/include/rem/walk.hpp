#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "rem/env.hpp"
#include "rem/rng.hpp"

namespace rem {

struct WalkEvent {
  Vertex site;
  double hold;               // holding time, truncated at the horizon
  double t_end;              // cumulative time at the end of the holding
  double clock_inc_over_b;   // hold * tau_site / B
};

struct TrajectoryRecord {
  std::vector<WalkEvent> events;
  Vertex start = 0;
  double horizon = 0.0;
  double simulated_until = 0.0;
  double log_b = 0.0;               // clock increments are in units of e^{log_b}
  double clock_over_b_total = 0.0;  // compensated sum of all increments
};

// Exploration bookkeeping. A site is discovered when the walk first enters
// its 1-neighbourhood, visited when the walk first stands on it. Ties within
// one arrival are broken in a fixed order: the site itself first, then
// neighbours by ascending bit index.
class DiscoveryLog {
 public:
  DiscoveryLog() = default;

  std::span<const Vertex> order() const { return order_; }
  std::span<const double> discover_times() const { return discover_times_; }
  std::span<const double> visit_times() const { return visit_times_; }
  double horizon() const { return horizon_; }

  // (discovered, visited) counts by time t; throws beyond the simulated horizon
  std::pair<std::size_t, std::size_t> counts(double t) const;

  bool discovered(Vertex x) const;
  bool visited(Vertex x) const;

 private:
  friend struct WalkDriver;
  std::vector<Vertex> order_;
  std::vector<double> discover_times_;
  std::vector<double> visit_times_;
  double horizon_ = 0.0;

  // membership: dense bitset for small N, open-addressed set otherwise
  struct VertexSet {
    void init(unsigned n);
    bool contains(Vertex x) const;
    bool insert(Vertex x);  // returns true if newly inserted
    std::vector<std::uint64_t> dense;
    std::vector<std::uint64_t> sparse_keys;
    std::size_t sparse_size = 0;
    std::size_t sparse_mask = 0;
    bool use_dense = false;
  };
  VertexSet discovered_;
  VertexSet visited_;
};

// Per-event callbacks; discovery callbacks fire in the fixed tie-break order.
class WalkObserver {
 public:
  virtual ~WalkObserver() = default;
  virtual void on_discover(Vertex /*site*/, double /*time*/, std::size_t /*index*/) {}
  virtual void on_first_visit(Vertex /*site*/, double /*time*/) {}
  // one holding interval [t_start, t_start + hold) spent at `site`
  virtual void on_event(Vertex /*site*/, double /*t_start*/, double /*hold*/) {}
  // with RunOptions::soft_horizon set, the run continues past it only while
  // this returns true (bounded by the hard horizon)
  virtual bool wants_more(double /*now*/) const { return false; }
};

struct RunOptions {
  double horizon = 0.0;  // required > 0; final holding is truncated here
  double soft_horizon = 0.0;  // > 0: stop here once the observer is satisfied
  double log_b = 0.0;         // log of the clock unit (0: raw clock)
  // optional early stops
  double stop_clock_over_b = std::numeric_limits<double>::infinity();
  bool stop_on_full_discovery = false;
  std::uint64_t max_events = std::numeric_limits<std::uint64_t>::max();
  bool keep_events = true;
};

struct RunResult {
  TrajectoryRecord record;
  DiscoveryLog log;
};

// one Gillespie step: holding ~ Exponential(omega_site), jump target chosen
// among neighbours with probability proportional to e^{a E_y}
std::pair<double, Vertex> step_X(const EnergyField& field, Vertex state, RngStream& rng);

RunResult run_X(const EnergyField& field, Vertex start, const RunOptions& opts, RngStream& rng,
                WalkObserver* observer = nullptr);

// the time-changed dynamics: same site skeleton, holding times multiplied by
// tau_site (returned in units of e^{log_b}, i.e. the clock increments)
std::vector<std::pair<Vertex, double>> time_change_Z(const TrajectoryRecord& record);

}  // namespace rem
