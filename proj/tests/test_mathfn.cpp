#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rem/mathfn.hpp"
#include "rem/quadrature.hpp"

using namespace rem;

TEST_CASE("normal cdf and quantile invert each other") {
  for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-6}) {
    const double z = norm_quantile(p);
    CHECK(norm_cdf(z) == doctest::Approx(p).epsilon(1e-11));
  }
  CHECK(norm_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(norm_quantile(0.0), std::invalid_argument);
}

TEST_CASE("normal tail matches quadrature of the density") {
  // oracle: integrate the density over [z, 12]
  for (double z : {0.5, 1.0, 2.0, 3.0}) {
    const double oracle = gauss_legendre_composite(
        [](double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI); }, z, 12.0, 64, 16);
    CHECK(norm_sf(z) == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("chi-square survival against known points") {
  // dof 2 is Exponential(1/2): sf(x) = e^{-x/2}
  CHECK(chi_square_sf(3.0, 2.0) == doctest::Approx(std::exp(-1.5)).epsilon(1e-12));
  // median of chi-square with 1 dof: x with P = 0.5 is 0.454936...
  CHECK(chi_square_sf(0.4549364231195724, 1.0) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("kolmogorov survival sanity") {
  CHECK(kolmogorov_sf(0.0) == doctest::Approx(1.0));
  CHECK(kolmogorov_sf(1.2238) == doctest::Approx(0.10).epsilon(5e-3));
  CHECK(kolmogorov_sf(1.6276) == doctest::Approx(0.01).epsilon(5e-2));
  CHECK(kolmogorov_sf(10.0) < 1e-12);
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const double val = gauss_legendre([](double x) { return x * x * x + 2 * x + 1; }, -1.0, 3.0, 16);
  // antiderivative x^4/4 + x^2 + x
  const double exact = (81.0 / 4.0 + 9.0 + 3.0) - (1.0 / 4.0 + 1.0 - 1.0);
  CHECK(val == doctest::Approx(exact).epsilon(1e-13));
}
