#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>

namespace rem {

// SplitMix64 finalizer. Used both as a one-shot mixer for deriving stream
// seeds and as the per-site counter hash of the energy landscape.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ (b + 0x9e3779b97f4a7c15ull));
}

inline std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return hash_mix(hash_mix(a, b), c);
}

inline std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                              std::uint64_t d) {
  return hash_mix(hash_mix(a, b, c), d);
}

// Maps 64 random bits to a double strictly inside (0,1).
inline double bits_to_unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// One random stream. mt19937_64 is fully specified by the standard and we map
// raw bits to doubles ourselves, so identical seeds give identical draws on
// every platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  // uniform on (0,1), never exactly 0 or 1
  double uniform() { return bits_to_unit_open(bits()); }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % n);
    std::uint64_t v;
    do {
      v = bits();
    } while (v >= limit);
    return v % n;
  }

  // index into a nonnegative weight table, probability proportional to weight
  std::size_t pick_weighted(std::span<const double> weights, double total) {
    double target = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (target < acc) return i;
    }
    return weights.size() - 1;
  }

 private:
  std::mt19937_64 gen_;
};

// Stream tags keep trajectory, environment, observer and auxiliary randomness
// on disjoint streams derived from one base seed.
namespace stream {
inline constexpr std::uint64_t kEnvironment = 0xE57A7E;
inline constexpr std::uint64_t kTrajectory = 0x7247EC;
inline constexpr std::uint64_t kObserver = 0x0B5E42;
inline constexpr std::uint64_t kGreen = 0x62EE11;
inline constexpr std::uint64_t kLimit = 0x11A177;
inline constexpr std::uint64_t kStats = 0x57A75B;
}  // namespace stream

}  // namespace rem
