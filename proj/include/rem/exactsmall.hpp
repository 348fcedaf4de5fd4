#pragma once

#include <Eigen/Dense>
#include <memory>

#include "rem/env.hpp"
#include "rem/rng.hpp"

namespace rem {

// Dense generator of the accelerated walk on the full hypercube, with the
// spectral machinery built on top. Dense storage is limited to N <= 10
// (1024 x 1024); use spectral_gap_lanczos for N in {11, 12}.
class ExactChain {
 public:
  explicit ExactChain(const EnergyField& field);

  unsigned n() const { return n_; }
  std::size_t dim() const { return static_cast<std::size_t>(L_.rows()); }
  const Eigen::MatrixXd& generator() const { return L_; }

  // second-smallest eigenvalue magnitude of -L on mean-zero functions
  double spectral_gap() const;

  // transition matrix e^{tL}; row x gives the law of X_t started from x
  Eigen::MatrixXd heat_kernel(double t) const;
  double heat_kernel(Vertex x, Vertex y, double t) const;

  // G^t = ((1/t) I - L)^{-1}; symmetric, rows sum to t
  Eigen::MatrixXd green(double t_scale) const;

  // max over x,y of 1 - P_x[X_t = y] / u(y)
  double separation(double t) const;
  // max over pairs of starting points of the total-variation distance at t
  double max_pairwise_tv(double t) const;

 private:
  unsigned n_;
  Eigen::MatrixXd L_;
  Eigen::VectorXd eigenvalues_;   // of L (nonpositive)
  Eigen::MatrixXd eigenvectors_;
};

// matrix-free Lanczos route for the spectral gap, N <= 12
double spectral_gap_lanczos(const EnergyField& field, int steps = 220);

// exponential rate of the total time spent at x before the walk first reaches
// distance 2; defined for N >= 2
double exit_rate_h2(const EnergyField& field, Vertex x);

// Randomized stopping time with uniform, independent terminal state. The
// block length is searched as the smallest multiple of N whose separation
// clears 1/e, so the construction stays valid at small N.
class StationaryTimeSampler {
 public:
  // block = 0: search k*N for k = 1, 2, ...; otherwise use the given length
  StationaryTimeSampler(const ExactChain& chain, double block = 0.0);

  double block() const { return block_; }
  double separation_at_block() const { return separation_; }

  struct Draw {
    double time = 0.0;
    Vertex terminal = 0;
    unsigned blocks = 0;
  };
  Draw sample(Vertex start, RngStream& rng) const;

 private:
  Eigen::MatrixXd p_block_;
  double block_ = 0.0;
  double separation_ = 0.0;
  double uniform_mass_ = 0.0;
};

}  // namespace rem
