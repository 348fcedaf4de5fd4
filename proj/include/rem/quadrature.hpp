#pragma once

#include <functional>
#include <vector>

namespace rem {

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  explicit GaussLegendre(int n);
};

// integral of f over [a, b] with an n-point Gauss-Legendre rule
double gauss_legendre(const std::function<double(double)>& f, double a, double b, int n = 128);

// composite rule: `pieces` equal subintervals, n points each
double gauss_legendre_composite(const std::function<double(double)>& f, double a, double b,
                                int n, int pieces);

}  // namespace rem
