#include "rem/exactsmall.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace rem {

ExactChain::ExactChain(const EnergyField& field) : n_(field.params().N) {
  if (n_ > 10) throw std::invalid_argument("ExactChain: dense route limited to N <= 10");
  const std::size_t dim = static_cast<std::size_t>(field.num_vertices());
  L_.setZero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t x = 0; x < dim; ++x) {
    double total = 0.0;
    for (unsigned bit = 0; bit < n_; ++bit) {
      const std::size_t y = static_cast<std::size_t>(flip_bit(x, bit));
      const double w = field.omega_pair(x, y);
      L_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = w;
      total += w;
    }
    L_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) = -total;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L_);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("ExactChain: eigendecomposition failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

double ExactChain::spectral_gap() const {
  // eigenvalues ascend; the largest is 0 (constants), the gap is -lambda_{d-2}
  return -eigenvalues_(eigenvalues_.size() - 2);
}

Eigen::MatrixXd ExactChain::heat_kernel(double t) const {
  if (t < 0.0) throw std::invalid_argument("heat_kernel: t must be nonnegative");
  Eigen::VectorXd e = (eigenvalues_.array() * t).exp();
  return eigenvectors_ * e.asDiagonal() * eigenvectors_.transpose();
}

double ExactChain::heat_kernel(Vertex x, Vertex y, double t) const {
  if (t < 0.0) throw std::invalid_argument("heat_kernel: t must be nonnegative");
  double acc = 0.0;
  for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k)
    acc += eigenvectors_(static_cast<Eigen::Index>(x), k) *
           eigenvectors_(static_cast<Eigen::Index>(y), k) * std::exp(eigenvalues_(k) * t);
  return acc;
}

Eigen::MatrixXd ExactChain::green(double t_scale) const {
  if (!(t_scale > 0.0)) throw std::invalid_argument("green: t scale must be positive");
  Eigen::MatrixXd a = -L_;
  a.diagonal().array() += 1.0 / t_scale;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw std::runtime_error("green: factorization failed");
  return llt.solve(Eigen::MatrixXd::Identity(L_.rows(), L_.cols()));
}

double ExactChain::separation(double t) const {
  const Eigen::MatrixXd p = heat_kernel(t);
  const double u = 1.0 / static_cast<double>(dim());
  double worst = 0.0;
  for (Eigen::Index x = 0; x < p.rows(); ++x)
    for (Eigen::Index y = 0; y < p.cols(); ++y) {
      const double s = 1.0 - p(x, y) / u;
      if (s > worst) worst = s;
    }
  return worst;
}

double ExactChain::max_pairwise_tv(double t) const {
  const Eigen::MatrixXd p = heat_kernel(t);
  double worst = 0.0;
  for (Eigen::Index x = 0; x < p.rows(); ++x)
    for (Eigen::Index y = x + 1; y < p.rows(); ++y) {
      const double tv = 0.5 * (p.row(x) - p.row(y)).cwiseAbs().sum();
      if (tv > worst) worst = tv;
    }
  return worst;
}

double spectral_gap_lanczos(const EnergyField& field, int steps) {
  const unsigned n = field.params().N;
  if (n > 12) throw std::invalid_argument("spectral_gap_lanczos: N <= 12 required");
  const std::size_t dim = static_cast<std::size_t>(field.num_vertices());
  std::vector<double> boltz(dim), site_rate(dim);
  for (std::size_t x = 0; x < dim; ++x) boltz[x] = field.boltzmann(x);
  double shift = 0.0;
  for (std::size_t x = 0; x < dim; ++x) {
    double total = 0.0;
    for (unsigned bit = 0; bit < n; ++bit) total += boltz[flip_bit(x, bit)];
    site_rate[x] = boltz[x] * total;
    if (site_rate[x] > shift) shift = site_rate[x];
  }
  // Lanczos on shift*I + L restricted to mean-zero vectors; the gap is
  // shift minus the top eigenvalue of that restriction.
  auto apply = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    for (std::size_t x = 0; x < dim; ++x) {
      double acc = (shift - site_rate[x]) * v[static_cast<Eigen::Index>(x)];
      double nb = 0.0;
      for (unsigned bit = 0; bit < n; ++bit) {
        const std::size_t y = flip_bit(x, bit);
        nb += boltz[y] * v[static_cast<Eigen::Index>(y)];
      }
      out[static_cast<Eigen::Index>(x)] = acc + boltz[x] * nb;
    }
  };
  const Eigen::Index d = static_cast<Eigen::Index>(dim);
  if (steps > static_cast<int>(dim) - 1) steps = static_cast<int>(dim) - 1;
  std::vector<Eigen::VectorXd> basis;
  basis.reserve(static_cast<std::size_t>(steps));
  Eigen::VectorXd q(d);
  RngStream rng(hash_mix(field.params().seed, 0x1a2c05));
  for (Eigen::Index i = 0; i < d; ++i) q[i] = rng.uniform() - 0.5;
  q.array() -= q.mean();
  q.normalize();
  std::vector<double> alpha, beta;
  Eigen::VectorXd w(d);
  for (int k = 0; k < steps; ++k) {
    basis.push_back(q);
    apply(q, w);
    w.array() -= w.mean();  // stay orthogonal to constants
    double a = q.dot(w);
    alpha.push_back(a);
    w -= a * q;
    if (k > 0) w -= beta.back() * basis[static_cast<std::size_t>(k - 1)];
    for (const auto& b : basis) w -= b.dot(w) * b;  // full reorthogonalization
    double nb = w.norm();
    if (nb < 1e-13) break;
    beta.push_back(nb);
    q = w / nb;
  }
  const int m = static_cast<int>(alpha.size());
  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    tri(i, i) = alpha[static_cast<std::size_t>(i)];
    if (i + 1 < m) {
      tri(i, i + 1) = beta[static_cast<std::size_t>(i)];
      tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(tri);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("spectral_gap_lanczos: tridiagonal solve failed");
  return shift - solver.eigenvalues().maxCoeff();
}

double exit_rate_h2(const EnergyField& field, Vertex x) {
  const unsigned n = field.params().N;
  if (n < 2) throw std::invalid_argument("exit_rate_h2: N >= 2 required");
  // a = rate out of x; b = sum over neighbours y of the outward rate mass
  // e^{aE_y} sum_{z ~ y, z != x} e^{aE_z}; the exit rate is a*b / (a + b)
  double sum_y = 0.0;
  double outward = 0.0;
  for (unsigned i = 0; i < n; ++i) {
    const Vertex y = flip_bit(x, i);
    const double by = field.boltzmann(y);
    sum_y += by;
    double inner = 0.0;
    for (unsigned j = 0; j < n; ++j) {
      const Vertex z = flip_bit(y, j);
      if (z == x) continue;
      inner += field.boltzmann(z);
    }
    outward += by * inner;
  }
  const double a = field.boltzmann(x) * sum_y;
  return a * outward / (a + outward);
}

StationaryTimeSampler::StationaryTimeSampler(const ExactChain& chain, double block) {
  const double inv_e = std::exp(-1.0);
  const unsigned n = chain.n();
  if (block > 0.0) {
    block_ = block;
    separation_ = chain.separation(block_);
    if (separation_ > inv_e)
      throw std::invalid_argument("StationaryTimeSampler: separation exceeds 1/e at this block");
  } else {
    bool found = false;
    for (unsigned k = 1; k <= 64; ++k) {
      block_ = static_cast<double>(k) * static_cast<double>(n);
      separation_ = chain.separation(block_);
      if (separation_ <= inv_e) {
        found = true;
        break;
      }
    }
    if (!found)
      throw std::runtime_error("StationaryTimeSampler: no block multiple of N clears 1/e");
  }
  p_block_ = chain.heat_kernel(block_);
  uniform_mass_ = 1.0 / static_cast<double>(chain.dim());
}

StationaryTimeSampler::Draw StationaryTimeSampler::sample(Vertex start, RngStream& rng) const {
  const double accept_scale = (1.0 - std::exp(-1.0)) * uniform_mass_;
  Vertex z = start;
  unsigned k = 0;
  while (true) {
    ++k;
    // draw the state one block ahead from row z of the block kernel
    const Eigen::Index row = static_cast<Eigen::Index>(z);
    double target = rng.uniform();
    double acc = 0.0;
    Eigen::Index y = 0;
    for (; y + 1 < p_block_.cols(); ++y) {
      acc += p_block_(row, y);
      if (target < acc) break;
    }
    const double p_zy = p_block_(row, y);
    z = static_cast<Vertex>(y);
    if (rng.uniform() <= accept_scale / p_zy)
      return Draw{static_cast<double>(k) * block_, z, k};
  }
}

}  // namespace rem
