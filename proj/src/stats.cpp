#include "rem/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rem/mathfn.hpp"
#include "rem/rng.hpp"

namespace rem {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "inconclusive";
  }
}

ReferenceCdf ReferenceCdf::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("ReferenceCdf::exponential: rate > 0 required");
  return {"Exponential(" + std::to_string(rate) + ")",
          [rate](double z) { return z <= 0.0 ? 0.0 : 1.0 - std::exp(-rate * z); }};
}

ReferenceCdf ReferenceCdf::pareto_tail(double alpha, double delta) {
  if (!(alpha > 0.0) || !(delta > 0.0))
    throw std::invalid_argument("ReferenceCdf::pareto_tail: positive parameters required");
  return {"ParetoTail(" + std::to_string(alpha) + "," + std::to_string(delta) + ")",
          [alpha, delta](double z) {
            return z <= delta ? 0.0 : 1.0 - std::pow(delta / z, alpha);
          }};
}

ReferenceCdf ReferenceCdf::half_gaussian() {
  return {"HalfGaussian", [](double z) { return z <= 0.0 ? 0.0 : 2.0 * norm_cdf(z) - 1.0; }};
}

namespace {

void require_samples(const std::vector<double>& s, std::size_t minimum, const char* who) {
  if (s.size() < minimum) throw std::invalid_argument(std::string(who) + ": too few samples");
  const double first = s.front();
  bool degenerate = true;
  for (double v : s)
    if (v != first) {
      degenerate = false;
      break;
    }
  if (degenerate) throw std::invalid_argument(std::string(who) + ": degenerate samples");
}

}  // namespace

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    const double lo = std::fabs(f - static_cast<double>(i) / n);
    const double hi = std::fabs(static_cast<double>(i + 1) / n - f);
    d = std::max(d, std::max(lo, hi));
  }
  return d;
}

double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

TestReport ks_test(std::vector<double> samples, const ReferenceCdf& ref, double level) {
  require_samples(samples, 20, "ks_test");
  TestReport r;
  r.name = "ks vs " + ref.name;
  r.sample_size = samples.size();
  r.level = level;
  r.statistic = ks_statistic(std::move(samples), ref.cdf);
  r.p_value = ks_p_value(r.statistic, static_cast<double>(r.sample_size));
  r.verdict = r.p_value >= level ? Verdict::pass : Verdict::fail;
  return r;
}

TestReport ks_two_sample(std::vector<double> a, std::vector<double> b, double level) {
  require_samples(a, 20, "ks_two_sample");
  require_samples(b, 20, "ks_two_sample");
  TestReport r;
  r.name = "ks two-sample";
  r.sample_size = a.size() + b.size();
  r.level = level;
  const double n_eff = static_cast<double>(a.size()) * static_cast<double>(b.size()) /
                       static_cast<double>(a.size() + b.size());
  r.statistic = ks_statistic_two_sample(std::move(a), std::move(b));
  r.p_value = ks_p_value(r.statistic, n_eff);
  r.verdict = r.p_value >= level ? Verdict::pass : Verdict::fail;
  return r;
}

HillEstimate hill_alpha(std::vector<double> samples, std::size_t k, double confidence) {
  if (k < 5 || 2 * k >= samples.size())
    throw std::invalid_argument("hill_alpha: k must satisfy 5 <= k < n/2");
  std::sort(samples.begin(), samples.end(), std::greater<double>());
  if (!(samples[k] > 0.0)) throw std::invalid_argument("hill_alpha: top order statistics must be positive");
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) acc += std::log(samples[i] / samples[k]);
  const double hill = acc / static_cast<double>(k);
  HillEstimate e;
  e.k = k;
  e.alpha = 1.0 / hill;
  const double z = norm_quantile(0.5 + 0.5 * confidence);
  const double half = z * e.alpha / std::sqrt(static_cast<double>(k));
  e.ci_lo = e.alpha - half;
  e.ci_hi = e.alpha + half;
  return e;
}

TestReport laplace_compare(std::span<const double> samples,
                           const std::function<double(double)>& psi,
                           std::span<const double> lambdas, std::size_t bootstrap, double level,
                           std::uint64_t bootstrap_seed) {
  if (samples.size() < 100) throw std::invalid_argument("laplace_compare: need >= 100 samples");
  if (bootstrap < 100) throw std::invalid_argument("laplace_compare: need >= 100 resamples");
  TestReport r;
  r.name = "laplace exponent";
  r.sample_size = samples.size();
  r.level = level;
  r.verdict = Verdict::pass;
  const std::size_t n = samples.size();
  RngStream rng(bootstrap_seed);
  double worst_gap = 0.0;
  for (double lambda : lambdas) {
    std::vector<double> transformed(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      transformed[i] = std::exp(-lambda * samples[i]);
      mean += transformed[i];
    }
    mean /= static_cast<double>(n);
    if (!(mean > 0.0)) throw std::runtime_error("laplace_compare: underflow, clip the lambda grid");
    const double point = -std::log(mean);
    std::vector<double> boot(bootstrap);
    for (std::size_t b = 0; b < bootstrap; ++b) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += transformed[rng.below(n)];
      boot[b] = -std::log(acc / static_cast<double>(n));
    }
    std::sort(boot.begin(), boot.end());
    const auto quant = [&](double q) {
      double pos = q * static_cast<double>(bootstrap - 1);
      std::size_t lo = static_cast<std::size_t>(pos);
      double frac = pos - static_cast<double>(lo);
      return lo + 1 < bootstrap ? boot[lo] * (1.0 - frac) + boot[lo + 1] * frac : boot[lo];
    };
    const double lo = quant(0.5 * level);
    const double hi = quant(1.0 - 0.5 * level);
    const double target = psi(lambda);
    if (!(target >= lo && target <= hi)) r.verdict = Verdict::fail;
    const double gap = std::fabs(target - point);
    if (gap > worst_gap) {
      worst_gap = gap;
      r.statistic = point;
      r.ci_lo = lo;
      r.ci_hi = hi;
      r.details = "worst lambda = " + std::to_string(lambda) + ", psi = " + std::to_string(target);
    }
  }
  return r;
}

double path_distance(const StepPath& f, const StepPath& g, PathMetric kind) {
  switch (kind) {
    case PathMetric::l1: return l1_distance(f, g);
    case PathMetric::sup: return sup_distance(f, g);
    case PathMetric::inverse_sup: {
      const double top = std::max(f.final_value(), g.final_value());
      return sup_distance(f.inverse(top > 0.0 ? top : 1.0), g.inverse(top > 0.0 ? top : 1.0));
    }
  }
  throw std::logic_error("path_distance: unknown metric");
}

namespace {
std::vector<double> ranks_of(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}
}  // namespace

double rank_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("rank_correlation: need matched samples of size >= 3");
  const std::vector<double> rx = ranks_of(x);
  const std::vector<double> ry = ranks_of(y);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> counts,
                               std::span<const double> probabilities) {
  if (counts.size() != probabilities.size() || counts.size() < 2)
    throw std::invalid_argument("chi_square_gof: need matched cells");
  double total = 0.0;
  for (std::uint64_t c : counts) total += static_cast<double>(c);
  ChiSquareResult r;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = total * probabilities[i];
    if (!(expected > 0.0)) throw std::invalid_argument("chi_square_gof: zero expected count");
    const double diff = static_cast<double>(counts[i]) - expected;
    r.statistic += diff * diff / expected;
  }
  r.dof = static_cast<double>(counts.size() - 1);
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> counts) {
  std::vector<double> p(counts.size(), 1.0 / static_cast<double>(counts.size()));
  return chi_square_gof(counts, p);
}

ChiSquareResult chi_square_independence(const std::vector<std::vector<std::uint64_t>>& table) {
  const std::size_t rows = table.size();
  if (rows < 2) throw std::invalid_argument("chi_square_independence: need >= 2 rows");
  const std::size_t cols = table.front().size();
  std::vector<double> row_tot(rows, 0.0), col_tot(cols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (table[i].size() != cols)
      throw std::invalid_argument("chi_square_independence: ragged table");
    for (std::size_t j = 0; j < cols; ++j) {
      row_tot[i] += static_cast<double>(table[i][j]);
      col_tot[j] += static_cast<double>(table[i][j]);
      total += static_cast<double>(table[i][j]);
    }
  }
  ChiSquareResult r;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const double expected = row_tot[i] * col_tot[j] / total;
      if (expected <= 0.0) continue;
      const double diff = static_cast<double>(table[i][j]) - expected;
      r.statistic += diff * diff / expected;
    }
  r.dof = static_cast<double>((rows - 1) * (cols - 1));
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

}  // namespace rem
