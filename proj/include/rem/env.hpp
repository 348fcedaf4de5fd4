#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rem/rng.hpp"

namespace rem {

// A configuration of N spins, packed into one 64-bit word (N <= 63).
using Vertex = std::uint64_t;

inline unsigned hamming(Vertex a, Vertex b) {
  return static_cast<unsigned>(std::popcount(a ^ b));
}

inline Vertex flip_bit(Vertex x, unsigned bit) { return x ^ (Vertex{1} << bit); }

struct ModelParams {
  unsigned N = 8;
  double beta = 1.0;          // inverse temperature
  double abar = 0.05;         // prefactor of the derived jump-bias exponent
  double a = -1.0;            // jump-bias exponent; negative means derive from abar
  double cbar = 0.3;          // growth exponent of the reference time scale
  double delta = 0.3;         // deep-trap threshold, in depth-scale units
  std::uint64_t seed = 1;

  // a defaults to abar * sqrt(2 log N); a = 0 gives uniform jump bias
  double a_eff() const;
  double alpha() const;  // tail index sqrt(2 cbar) / beta
  bool aging_regime() const { return alpha() < 1.0; }
  // the regime the limit statements are formulated in; at bench sizes it is
  // routinely violated and only worth a warning
  bool asymptotic_bias_regime() const;
  void validate() const;
};

namespace detail {

// Open-addressing map from vertex to cached site data. Vertices are stored
// shifted by one so that key 0 can mark an empty slot.
struct SiteData {
  double energy;
  double boltzmann;  // e^{a * energy}
};

class SiteCache {
 public:
  SiteCache() { rehash(1024); }

  SiteData* find(Vertex x) {
    const std::uint64_t key = x + 1;
    std::size_t i = static_cast<std::size_t>(splitmix64(key)) & mask_;
    while (keys_[i] != 0) {
      if (keys_[i] == key) return &vals_[i];
      i = (i + 1) & mask_;
    }
    return nullptr;
  }

  SiteData& insert(Vertex x, SiteData v) {
    if ((size_ + 1) * 10 >= keys_.size() * 7) rehash(keys_.size() * 2);
    const std::uint64_t key = x + 1;
    std::size_t i = static_cast<std::size_t>(splitmix64(key)) & mask_;
    while (keys_[i] != 0) {
      if (keys_[i] == key) {
        vals_[i] = v;
        return vals_[i];
      }
      i = (i + 1) & mask_;
    }
    keys_[i] = key;
    vals_[i] = v;
    ++size_;
    return vals_[i];
  }

  std::size_t size() const { return size_; }

 private:
  void rehash(std::size_t cap) {
    std::vector<std::uint64_t> old_keys = std::move(keys_);
    std::vector<SiteData> old_vals = std::move(vals_);
    keys_.assign(cap, 0);
    vals_.assign(cap, SiteData{});
    mask_ = cap - 1;
    size_ = 0;
    for (std::size_t i = 0; i < old_keys.size(); ++i)
      if (old_keys[i] != 0) insert(old_keys[i] - 1, old_vals[i]);
  }

  std::vector<std::uint64_t> keys_;
  std::vector<SiteData> vals_;
  std::size_t mask_ = 0;
  std::size_t size_ = 0;
};

}  // namespace detail

// The random landscape: i.i.d. energies distributed as the positive part of a
// standard Gaussian, generated lazily and deterministically from (seed, site).
// No instance ever materializes all 2^N values. A single instance memoizes,
// so it must either be confined to one worker or treated as read-only after a
// warm-up; replicas normally get their own instance each.
class EnergyField {
 public:
  explicit EnergyField(const ModelParams& params);

  // landscape with every energy pinned to zero (uniform-rate dynamics)
  static EnergyField zero_disorder(const ModelParams& params);
  // landscape with the listed energies pinned, all other sites at zero
  static EnergyField with_energies(const ModelParams& params,
                                   std::span<const std::pair<Vertex, double>> values);

  // E_x >= 0; repeated queries return the identical memoized value
  double energy(Vertex x) const;
  // e^{a E_x}
  double boltzmann(Vertex x) const;
  // beta * sqrt(N) * E_x; depths are only ever handled in log domain
  double log_tau(Vertex x) const;
  // symmetric edge rate e^{a (E_x + E_y)}; throws unless x ~ y
  double omega_pair(Vertex x, Vertex y) const;
  // total jump rate out of x
  double omega_site(Vertex x) const;

  const ModelParams& params() const { return params_; }
  std::uint64_t num_vertices() const { return Vertex{1} << params_.N; }

 private:
  ModelParams params_;
  bool hashed_ = true;
  double a_;
  double beta_sqrt_n_;
  std::uint64_t site_seed_;
  mutable detail::SiteCache cache_;

  const detail::SiteData& site(Vertex x) const;
};

}  // namespace rem
