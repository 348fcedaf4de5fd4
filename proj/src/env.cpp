#include "rem/env.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rem/mathfn.hpp"

namespace rem {

double ModelParams::a_eff() const {
  if (a >= 0.0) return a;
  return abar * std::sqrt(2.0 * std::log(static_cast<double>(N)));
}

double ModelParams::alpha() const { return std::sqrt(2.0 * cbar) / beta; }

bool ModelParams::asymptotic_bias_regime() const {
  return a_eff() >= 1.0 && abar < 0.05;
}

void ModelParams::validate() const {
  if (N < 1 || N > 4096) throw std::invalid_argument("ModelParams: N must be in [1, 4096]");
  if (!(beta > 0.0)) throw std::invalid_argument("ModelParams: beta must be positive");
  if (!(cbar > 0.0 && cbar < std::numbers::ln2))
    throw std::invalid_argument("ModelParams: cbar must lie in (0, log 2)");
  if (!(delta > 0.0)) throw std::invalid_argument("ModelParams: delta must be positive");
  if (a >= 0.0 ? false : abar < 0.0)
    throw std::invalid_argument("ModelParams: abar must be nonnegative");
}

EnergyField::EnergyField(const ModelParams& params)
    : params_(params),
      hashed_(true),
      a_(params.a_eff()),
      beta_sqrt_n_(params.beta * std::sqrt(static_cast<double>(params.N))),
      site_seed_(hash_mix(params.seed, stream::kEnvironment)) {
  params_.validate();
  if (params_.N > 63)
    throw std::invalid_argument("EnergyField: vertices pack into 64 bits, N <= 63 required");
}

EnergyField EnergyField::zero_disorder(const ModelParams& params) {
  EnergyField f(params);
  f.hashed_ = false;
  return f;
}

EnergyField EnergyField::with_energies(const ModelParams& params,
                                       std::span<const std::pair<Vertex, double>> values) {
  EnergyField f = zero_disorder(params);
  for (const auto& [x, e] : values) {
    if (e < 0.0) throw std::invalid_argument("EnergyField: energies must be nonnegative");
    f.cache_.insert(x, detail::SiteData{e, std::exp(f.a_ * e)});
  }
  return f;
}

const detail::SiteData& EnergyField::site(Vertex x) const {
  if (detail::SiteData* hit = cache_.find(x)) return *hit;
  double e = 0.0;
  if (hashed_) {
    // one counter value per site: hash (seed, x), then inverse-CDF
    double u = bits_to_unit_open(splitmix64(site_seed_ ^ (x + 1)));
    double g = norm_quantile(u);
    e = g > 0.0 ? g : 0.0;
  }
  return cache_.insert(x, detail::SiteData{e, std::exp(a_ * e)});
}

double EnergyField::energy(Vertex x) const { return site(x).energy; }

double EnergyField::boltzmann(Vertex x) const { return site(x).boltzmann; }

double EnergyField::log_tau(Vertex x) const { return beta_sqrt_n_ * site(x).energy; }

double EnergyField::omega_pair(Vertex x, Vertex y) const {
  if (hamming(x, y) != 1) throw std::invalid_argument("omega_pair: sites are not neighbours");
  return site(x).boltzmann * site(y).boltzmann;
}

double EnergyField::omega_site(Vertex x) const {
  double sum = 0.0;
  for (unsigned bit = 0; bit < params_.N; ++bit) sum += site(flip_bit(x, bit)).boltzmann;
  return site(x).boltzmann * sum;
}

}  // namespace rem
