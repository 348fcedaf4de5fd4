#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rem/steppath.hpp"

namespace rem {

enum class Verdict { pass, fail, inconclusive };

struct TestReport {
  std::string name;
  double statistic = 0.0;
  double p_value = -1.0;  // negative when the test reports a CI instead
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t sample_size = 0;
  double level = 0.0;
  Verdict verdict = Verdict::inconclusive;
  std::string details;
};

const char* verdict_name(Verdict v);

// named reference distributions for one-sample comparisons
struct ReferenceCdf {
  std::string name;
  std::function<double(double)> cdf;

  static ReferenceCdf exponential(double rate);
  static ReferenceCdf pareto_tail(double alpha, double delta);
  // continuous part of the positive-part Gaussian, conditioned on > 0
  static ReferenceCdf half_gaussian();
};

// two-sided Kolmogorov-Smirnov against a named reference; asymptotic p-value
TestReport ks_test(std::vector<double> samples, const ReferenceCdf& ref, double level = 0.01);

// two-sample variant
TestReport ks_two_sample(std::vector<double> a, std::vector<double> b, double level = 0.01);

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b);

struct HillEstimate {
  double alpha = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t k = 0;
};

// Hill tail-index estimator on the top-k order statistics, normal CI
HillEstimate hill_alpha(std::vector<double> samples, std::size_t k, double confidence = 0.95);

// Bootstrap comparison of the empirical Laplace exponent -log mean(e^{-l X})
// against psi on a lambda grid; passes when psi lies in every CI. The
// bootstrap seed is part of the input, so reruns are identical.
TestReport laplace_compare(std::span<const double> samples,
                           const std::function<double(double)>& psi,
                           std::span<const double> lambdas, std::size_t bootstrap, double level,
                           std::uint64_t bootstrap_seed);

enum class PathMetric { l1, sup, inverse_sup };

// L1 / sup distance on the merged breakpoint grid; inverse_sup compares the
// right-continuous inverses of monotone paths
double path_distance(const StepPath& f, const StepPath& g, PathMetric kind);

// Spearman rank correlation with average ranks on ties
double rank_correlation(std::span<const double> x, std::span<const double> y);

// Pearson chi-square of observed counts against given probabilities
struct ChiSquareResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double dof = 0.0;
};
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> counts,
                               std::span<const double> probabilities);
ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> counts);
// contingency-table independence test
ChiSquareResult chi_square_independence(const std::vector<std::vector<std::uint64_t>>& table);

}  // namespace rem
