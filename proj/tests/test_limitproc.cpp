#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rem/limitproc.hpp"
#include "rem/quadrature.hpp"
#include "rem/stats.hpp"

using namespace rem;

namespace {
constexpr double kAlpha = 0.6;
double levy_clock() { return std::tgamma(kAlpha + 1.0); }

// oracle: Laplace exponent by direct quadrature of (1 - e^{-lambda u}) against
// the jump intensity, independent of the closed form under test
double psi_quadrature(double alpha, double lambda, double levy_const) {
  auto f = [&](double s) {  // u = e^s over the whole line
    const double u = std::exp(s);
    return -std::expm1(-lambda * u) * levy_const * alpha * std::pow(u, -alpha);
  };
  return gauss_legendre_composite(f, -60.0, 60.0, 64, 120);
}
}  // namespace

TEST_CASE("laplace exponent closed form matches quadrature") {
  for (double lambda : {0.5, 1.0, 2.0}) {
    const double oracle = psi_quadrature(kAlpha, lambda, levy_clock());
    CHECK(psi_stable(kAlpha, lambda, levy_clock()) == doctest::Approx(oracle).epsilon(1e-8));
  }
}

TEST_CASE("stable samples: jump intensity, value law, self-similarity") {
  RngStream rng(41);
  const double eps = 1e-4;
  const double expected_jumps = levy_clock() * std::pow(eps, -kAlpha);
  const std::size_t paths = 10000;
  double jumps = 0.0;
  std::vector<double> v1, v2_scaled;
  for (std::size_t i = 0; i < paths; ++i) {
    const SubordinatorPath p = sample_stable(kAlpha, 1.0, eps, levy_clock(), rng);
    jumps += static_cast<double>(p.jumps.size());
    v1.push_back(p.value(1.0));
    for (const Jump& j : p.jumps) {
      CHECK(j.size >= eps);
      CHECK(j.location <= 1.0);
    }
  }
  // Poisson count against the intensity integral
  const double se = std::sqrt(expected_jumps / static_cast<double>(paths));
  CHECK(std::fabs(jumps / paths - expected_jumps) < 4.0 * se);

  // empirical Laplace transform within the bootstrap band of the exponent
  const std::vector<double> lambdas = {0.5, 1.0, 2.0};
  const TestReport lap = laplace_compare(
      v1, [](double l) { return psi_stable(kAlpha, l, levy_clock()); }, lambdas, 1000, 0.01, 7);
  CHECK(lap.verdict == Verdict::pass);

  // value(c t) / c^{1/alpha} has the law of value(t)
  RngStream rng2(42);
  for (std::size_t i = 0; i < paths / 2; ++i) {
    const SubordinatorPath p = sample_stable(kAlpha, 2.0, eps, levy_clock(), rng2);
    v2_scaled.push_back(p.value(2.0) / std::pow(2.0, 1.0 / kAlpha));
  }
  CHECK(ks_two_sample(v1, v2_scaled, 0.01).verdict == Verdict::pass);
  CHECK_THROWS_AS(sample_stable(1.2, 1.0, eps, 1.0, rng), std::invalid_argument);
}

TEST_CASE("paths are nondecreasing and right-continuous by construction") {
  RngStream rng(43);
  const SubordinatorPath p = sample_stable(kAlpha, 1.0, 1e-3, levy_clock(), rng);
  const StepPath jumps = p.jump_part();
  CHECK(jumps.is_nondecreasing());
  double prev = -1.0;
  for (double t : jumps.times()) {
    CHECK(t >= prev);
    prev = t;
  }
  const TruncatedClockPath c = sample_c_delta(kAlpha, 0.3, 10.0, rng);
  CHECK(c.path().is_nondecreasing());
}

TEST_CASE("truncated clock: arrivals, laplace exponent, thinning coupling") {
  RngStream rng(44);
  const double delta = 0.3;
  const double rate = std::pow(delta, -kAlpha);
  const std::size_t paths = 10000;
  double count = 0.0;
  std::vector<double> values;
  for (std::size_t i = 0; i < paths; ++i) {
    const TruncatedClockPath c = sample_c_delta(kAlpha, delta, 1.0, rng);
    count += static_cast<double>(c.jumps.size());
    values.push_back(c.path().final_value());
  }
  const double se = std::sqrt(rate / static_cast<double>(paths));
  CHECK(std::fabs(count / paths - rate) < 4.0 * se);

  const std::vector<double> lambdas = {0.5, 1.0, 2.0};
  const TestReport lap = laplace_compare(
      values, [&](double l) { return psi_delta(kAlpha, delta, l); }, lambdas, 1000, 0.01, 8);
  CHECK(lap.verdict == Verdict::pass);

  // thinning a finer path dominates the coarser one pathwise
  const TruncatedClockPath fine = sample_c_delta(kAlpha, 0.05, 5.0, rng);
  const TruncatedClockPath coarse = thin(fine, delta);
  const StepPath pf = fine.path(), pc = coarse.path();
  for (double t = 0.0; t <= 5.0; t += 0.25) CHECK(pc.value(t) <= pf.value(t));
  CHECK_THROWS_AS(thin(coarse, 0.01), std::invalid_argument);
}

TEST_CASE("laplace exponent of the truncation converges as delta shrinks") {
  for (double lambda : {0.5, 1.0, 2.0}) {
    double prev = 0.0;
    for (double delta : {0.3, 0.05, 1e-2, 1e-3, 1e-4}) {
      const double pd = psi_delta(kAlpha, delta, lambda);
      CHECK(pd > prev);  // monotone increase towards the limit
      prev = pd;
    }
    CHECK(prev <= psi_stable(kAlpha, lambda, levy_clock()) + 1e-9);
  }
  // the truncation gap scales like delta^{1-alpha}, so the grid where a 2%
  // agreement at delta = 1e-4 is attainable stops near lambda = 1
  for (double lambda : {0.25, 0.5, 1.0}) {
    const double pd = psi_delta(kAlpha, 1e-4, lambda);
    const double ps = psi_stable(kAlpha, lambda, levy_clock());
    CHECK(std::fabs(pd - ps) / ps < 0.02);
  }
}

TEST_CASE("age limit construction") {
  SUBCASE("holding structure matches the jump list") {
    // small path with hand-checkable jumps
    SubordinatorPath p;
    p.horizon = 10.0;
    p.truncation = 0.1;
    p.jumps = {{0.5, 2.0, 0.4}, {1.1, 0.3, 1.0}, {2.0, 1.5, 2.0}};
    const StepPath z = build_z(p, 3.5);
    // values mu(v_i) with holding times mu(v_i) T_i: 2.0 for 0.8, 0.3 for
    // 0.3, then 1.5 until the horizon
    CHECK(z.value(0.0) == 2.0);
    CHECK(z.value(0.79) == 2.0);
    CHECK(z.value(0.81) == 0.3);
    CHECK(z.value(1.09) == 0.3);
    CHECK(z.value(1.2) == 1.5);
    CHECK(z.value(3.4) == 1.5);
    // truncated build skips the sub-threshold jump
    const StepPath zt = build_z(p, 3.0, 0.5);
    CHECK(zt.value(0.79) == 2.0);
    CHECK(zt.value(0.81) == 1.5);
    CHECK_THROWS_AS(build_z(p, 100.0), std::invalid_argument);
  }
  SUBCASE("self-similarity of index one") {
    std::vector<double> z1, z2_scaled;
    RngStream rng(45);
    for (int i = 0; i < 6000; ++i) {
      const SubordinatorPath p = sample_stable(kAlpha, 4.0, 1e-4, levy_clock(), rng);
      try {
        z1.push_back(build_z(p, 1.0 + 1e-9).value(1.0));
      } catch (const std::invalid_argument&) {
      }
    }
    RngStream rng2(46);
    for (int i = 0; i < 6000; ++i) {
      const SubordinatorPath p = sample_stable(kAlpha, 6.0, 1e-4, levy_clock(), rng2);
      try {
        z2_scaled.push_back(build_z(p, 2.0 + 1e-9).value(2.0) / 2.0);
      } catch (const std::invalid_argument&) {
      }
    }
    REQUIRE(z1.size() >= 5000);
    REQUIRE(z2_scaled.size() >= 5000);
    CHECK(ks_two_sample(z1, z2_scaled, 0.01).verdict == Verdict::pass);
  }
  SUBCASE("inverse correctness of the sojourn accumulation") {
    RngStream rng(46);
    const SubordinatorPath p = sample_stable(kAlpha, 2.0, 1e-3, levy_clock(), rng);
    // V = cumulative size * mark over jumps; W = inverse; V(W(t)-) <= t <= V(W(t))
    StepPath v(0.0, p.horizon);
    double acc = 0.0;
    for (const Jump& j : p.jumps) {
      acc += j.size * j.mark;
      v.add_jump(j.location, acc);
    }
    const StepPath w = path_inverse(v, acc * 0.99);
    for (double t = 0.0; t < acc * 0.99; t += acc / 57.0) {
      const double y = w.value(t);
      const double before = y > 1e-9 ? v.value(y - 1e-9) : 0.0;
      CHECK(before <= t + 1e-9);
      CHECK(v.value(y) >= t - 1e-9);
    }
  }
}
