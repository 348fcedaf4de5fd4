#include "rem/observe.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rem {

TrapObserver::TrapObserver(const EnergyField& field, const ScaleSet& scales, double delta,
                           RngStream& rng)
    : field_(field),
      scales_(scales),
      log_threshold_(std::log(delta) + scales.log_b_n),
      n_(static_cast<double>(field.params().N)),
      t_n_(scales.t_n),
      rng_(rng) {
  if (!(delta > 0.0)) throw std::invalid_argument("TrapObserver: delta must be positive");
}

void TrapObserver::on_discover(Vertex site, double time, std::size_t) {
  if (field_.log_tau(site) < log_threshold_) return;
  TrapEvent ev;
  ev.n = events_.size() + 1;
  ev.site = site;
  ev.t_over_tn = time / t_n_;
  ev.depth_over_b = std::exp(field_.log_tau(site) - scales_.log_b_n);
  events_.push_back(ev);
  open_.push_back(Open{events_.size() - 1, site,
                       std::numeric_limits<double>::infinity(), false, time});
}

void TrapObserver::on_first_visit(Vertex site, double time) {
  for (Open& o : open_) {
    if (o.site != site || o.visited) continue;
    o.visited = true;
    TrapEvent& ev = events_[o.event_index];
    ev.h_over_tn = time / t_n_;
    ev.visited_within_n = time <= o.discover_time + n_;
    o.window_end = time + rng_.exponential(1.0 / (n_ * n_));
  }
}

void TrapObserver::on_event(Vertex site, double t_start, double hold) {
  const double t_end = t_start + hold;
  for (const Open& o : open_) {
    if (o.site != site || !o.visited) continue;
    const double overlap = std::min(t_end, o.window_end) - t_start;
    if (overlap > 0.0) events_[o.event_index].occupation += overlap;
  }
  // retire windows that are over
  open_.erase(std::remove_if(open_.begin(), open_.end(),
                             [&](const Open& o) { return o.visited && o.window_end <= t_end; }),
              open_.end());
}

bool TrapObserver::wants_more(double now) const {
  for (const Open& o : open_)
    if (o.visited && o.window_end > now) return true;
  return false;
}

std::vector<TrapEvent> TrapObserver::take_events(double simulated_until) {
  // complete = visited and the occupation window closed inside the run
  for (TrapEvent& ev : events_) ev.window_complete = std::isfinite(ev.h_over_tn);
  for (const Open& o : open_)
    if (!o.visited || o.window_end > simulated_until)
      events_[o.event_index].window_complete = false;
  open_.clear();
  return std::move(events_);
}

McEstimate green_mc(const EnergyField& field, Vertex x, std::size_t samples, RngStream& rng,
                    unsigned distance_cut) {
  if (samples < 1) throw std::invalid_argument("green_mc: samples >= 1 required");
  const double n = static_cast<double>(field.params().N);
  const double kill_rate = 1.0 / (n * n);
  const unsigned bits = field.params().N;
  const double mixed_tail =
      n * n / std::pow(2.0, static_cast<double>(bits));  // stationary occupation mass
  double weights[64];
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double alarm = rng.exponential(kill_rate);
    double t = 0.0;
    double occupation = 0.0;
    Vertex state = x;
    while (t < alarm) {
      double total = 0.0;
      for (unsigned b = 0; b < bits; ++b) {
        weights[b] = field.boltzmann(flip_bit(state, b));
        total += weights[b];
      }
      const double rate = field.boltzmann(state) * total;
      const double hold = rng.exponential(rate);
      const double effective = std::min(hold, alarm - t);
      if (state == x) occupation += effective;
      t += hold;
      if (t >= alarm) break;
      state = flip_bit(state, static_cast<unsigned>(
                                  rng.pick_weighted(std::span<const double>(weights, bits), total)));
      if (distance_cut > 0 && hamming(state, x) > distance_cut) {
        occupation += mixed_tail;
        break;
      }
    }
    sum += occupation;
    sum_sq += occupation * occupation;
  }
  McEstimate est;
  est.n = samples;
  est.mean = sum / static_cast<double>(samples);
  if (samples > 1) {
    const double var =
        (sum_sq - sum * sum / static_cast<double>(samples)) / (static_cast<double>(samples) - 1.0);
    est.stderr_ = std::sqrt(std::max(var, 0.0) / static_cast<double>(samples));
  }
  return est;
}

double extract_mark(const TrapEvent& trap, double occupation) {
  if (!(trap.green > 0.0)) throw std::invalid_argument("extract_mark: nonpositive green estimate");
  return occupation / trap.green;
}

namespace {

StepPath clock_path(const TrajectoryRecord& record, const ScaleSet& scales, double T,
                    const EnergyField* field, double delta_cut) {
  const double horizon_needed = T * scales.t_n;
  if (record.simulated_until < horizon_needed * (1.0 - 1e-12))
    throw std::invalid_argument("rescale_clock: record horizon too short");
  StepPath path(0.0, T);
  double acc = 0.0, carry = 0.0;
  const double log_cut = field ? std::log(delta_cut) + scales.log_b_n : 0.0;
  for (const WalkEvent& e : record.events) {
    if (e.t_end > horizon_needed * (1.0 + 1e-12)) break;
    double inc = e.clock_inc_over_b;
    if (field && field->log_tau(e.site) < log_cut) inc = 0.0;
    // compensated accumulation, mirroring the recorder
    const double y = inc - carry;
    const double t = acc + y;
    carry = (t - acc) - y;
    acc = t;
    const double when = std::min(e.t_end / scales.t_n, T);
    path.add_jump(when, scales.n2phi2 * acc);
  }
  return path;
}

}  // namespace

StepPath rescale_clock(const TrajectoryRecord& record, const ScaleSet& scales, double T) {
  return clock_path(record, scales, T, nullptr, 0.0);
}

StepPath rescale_clock_truncated(const TrajectoryRecord& record, const EnergyField& field,
                                 const ScaleSet& scales, double T, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("rescale_clock_truncated: delta must be positive");
  return clock_path(record, scales, T, &field, delta);
}

StepPath age_path(const TrajectoryRecord& record, const EnergyField& field,
                  const ScaleSet& scales, double t_clock) {
  if (record.events.empty()) throw std::invalid_argument("age_path: empty record");
  const double total_clock = scales.n2phi2 * record.clock_over_b_total;
  if (total_clock < t_clock)
    throw std::invalid_argument("age_path: clock horizon too short for the requested span");
  StepPath path(std::exp(field.log_tau(record.events.front().site) - scales.log_b_n), t_clock);
  double acc = 0.0, carry = 0.0;
  for (std::size_t k = 0; k < record.events.size(); ++k) {
    const double y = record.events[k].clock_inc_over_b - carry;
    const double t = acc + y;
    carry = (t - acc) - y;
    acc = t;
    const double clock_now = scales.n2phi2 * acc;
    if (clock_now >= t_clock) break;
    if (k + 1 < record.events.size())
      path.add_jump(clock_now,
                    std::exp(field.log_tau(record.events[k + 1].site) - scales.log_b_n));
  }
  return path;
}

}  // namespace rem
