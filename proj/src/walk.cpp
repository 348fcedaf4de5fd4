#include "rem/walk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rem {

void DiscoveryLog::VertexSet::init(unsigned n) {
  if (n <= 26) {
    use_dense = true;
    dense.assign((std::size_t{1} << n) / 64 + 1, 0);
  } else {
    use_dense = false;
    sparse_keys.assign(1 << 16, 0);
    sparse_mask = sparse_keys.size() - 1;
    sparse_size = 0;
  }
}

bool DiscoveryLog::VertexSet::contains(Vertex x) const {
  if (use_dense) return (dense[x >> 6] >> (x & 63)) & 1;
  const std::uint64_t key = x + 1;
  std::size_t i = static_cast<std::size_t>(splitmix64(key)) & sparse_mask;
  while (sparse_keys[i] != 0) {
    if (sparse_keys[i] == key) return true;
    i = (i + 1) & sparse_mask;
  }
  return false;
}

bool DiscoveryLog::VertexSet::insert(Vertex x) {
  if (use_dense) {
    std::uint64_t& word = dense[x >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (x & 63);
    if (word & bit) return false;
    word |= bit;
    return true;
  }
  if ((sparse_size + 1) * 10 >= sparse_keys.size() * 7) {
    std::vector<std::uint64_t> old = std::move(sparse_keys);
    sparse_keys.assign(old.size() * 2, 0);
    sparse_mask = sparse_keys.size() - 1;
    sparse_size = 0;
    for (std::uint64_t k : old)
      if (k != 0) insert(k - 1);
  }
  const std::uint64_t key = x + 1;
  std::size_t i = static_cast<std::size_t>(splitmix64(key)) & sparse_mask;
  while (sparse_keys[i] != 0) {
    if (sparse_keys[i] == key) return false;
    i = (i + 1) & sparse_mask;
  }
  sparse_keys[i] = key;
  ++sparse_size;
  return true;
}

std::pair<std::size_t, std::size_t> DiscoveryLog::counts(double t) const {
  if (t > horizon_) throw std::invalid_argument("DiscoveryLog::counts: t beyond simulated horizon");
  auto d = std::upper_bound(discover_times_.begin(), discover_times_.end(), t);
  auto r = std::upper_bound(visit_times_.begin(), visit_times_.end(), t);
  return {static_cast<std::size_t>(d - discover_times_.begin()),
          static_cast<std::size_t>(r - visit_times_.begin())};
}

bool DiscoveryLog::discovered(Vertex x) const { return discovered_.contains(x); }
bool DiscoveryLog::visited(Vertex x) const { return visited_.contains(x); }

namespace {

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    double y = v - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

struct WalkDriver {
  static void init(DiscoveryLog& log, unsigned n, double horizon) {
    log.discovered_.init(n);
    log.visited_.init(n);
    log.horizon_ = horizon;
  }
  static void set_horizon(DiscoveryLog& log, double t) { log.horizon_ = t; }
  static std::size_t discovered_count(const DiscoveryLog& log) { return log.order_.size(); }

  static void visit(DiscoveryLog& log, const EnergyField& field, Vertex site, double time,
                    WalkObserver* obs) {
    const unsigned n = field.params().N;
    // tie-break order: the site itself, then neighbours by ascending bit;
    // discovery always fires before the first-visit callback
    for (unsigned z = 0; z <= n; ++z) {
      Vertex candidate = z == 0 ? site : flip_bit(site, z - 1);
      if (log.discovered_.insert(candidate)) {
        log.order_.push_back(candidate);
        log.discover_times_.push_back(time);
        if (obs) obs->on_discover(candidate, time, log.order_.size() - 1);
      }
    }
    if (log.visited_.insert(site)) {
      log.visit_times_.push_back(time);
      if (obs) obs->on_first_visit(site, time);
    }
  }
};

std::pair<double, Vertex> step_X(const EnergyField& field, Vertex state, RngStream& rng) {
  const unsigned n = field.params().N;
  double weights[64];
  double total = 0.0;
  for (unsigned bit = 0; bit < n; ++bit) {
    weights[bit] = field.boltzmann(flip_bit(state, bit));
    total += weights[bit];
  }
  const double rate = field.boltzmann(state) * total;
  const double hold = rng.exponential(rate);
  const std::size_t pick = rng.pick_weighted(std::span<const double>(weights, n), total);
  return {hold, flip_bit(state, static_cast<unsigned>(pick))};
}

RunResult run_X(const EnergyField& field, Vertex start, const RunOptions& opts, RngStream& rng,
                WalkObserver* observer) {
  if (!(opts.horizon > 0.0)) throw std::invalid_argument("run_X: horizon must be positive");
  RunResult out;
  TrajectoryRecord& rec = out.record;
  DiscoveryLog& log = out.log;
  rec.start = start;
  rec.horizon = opts.horizon;
  rec.log_b = opts.log_b;
  WalkDriver::init(log, field.params().N, opts.horizon);

  const std::uint64_t full_count = field.num_vertices();
  KahanSum clock;
  double t = 0.0;
  Vertex state = start;
  std::uint64_t events = 0;
  WalkDriver::visit(log, field, state, t, observer);

  while (true) {
    if (opts.soft_horizon > 0.0 && t >= opts.soft_horizon &&
        !(observer && observer->wants_more(t)))
      break;
    if (++events > opts.max_events) throw std::runtime_error("run_X: event budget exceeded");
    auto [hold, next] = step_X(field, state, rng);
    bool final_event = false;
    if (t + hold >= opts.horizon) {
      hold = opts.horizon - t;  // truncate the last holding interval
      final_event = true;
    }
    const double inc = hold * std::exp(field.log_tau(state) - opts.log_b);
    clock.add(inc);
    if (observer) observer->on_event(state, t, hold);
    if (opts.keep_events) rec.events.push_back(WalkEvent{state, hold, t + hold, inc});
    t += hold;
    if (final_event) break;
    if (clock.sum >= opts.stop_clock_over_b) break;
    state = next;
    WalkDriver::visit(log, field, state, t, observer);
    if (opts.stop_on_full_discovery && WalkDriver::discovered_count(log) == full_count) break;
  }
  rec.simulated_until = t;
  WalkDriver::set_horizon(log, t);
  rec.clock_over_b_total = clock.sum;
  return out;
}

std::vector<std::pair<Vertex, double>> time_change_Z(const TrajectoryRecord& record) {
  if (record.events.empty()) throw std::invalid_argument("time_change_Z: empty record");
  std::vector<std::pair<Vertex, double>> z;
  z.reserve(record.events.size());
  for (const WalkEvent& e : record.events) z.emplace_back(e.site, e.clock_inc_over_b);
  return z;
}

}  // namespace rem
