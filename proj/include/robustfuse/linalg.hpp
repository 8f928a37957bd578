#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "robustfuse/errors.hpp"

namespace robustfuse::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest absolute eigenvalue of a (not necessarily symmetric) square matrix.
double spectral_radius(const Matrix& a);

/// True if ||a - a'|| is below `tol` relative to ||a||.
bool is_symmetric(const Matrix& a, double rel_tol = 1e-12);

/// SplitMix64 step; used to derive independent seed streams from one master seed.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

/// One standard normal deviate from explicit Box-Muller over mt19937_64 output.
/// Kept out of std::normal_distribution so streams are reproducible regardless
/// of the standard library implementation.
double standard_normal(std::mt19937_64& rng);

/// Solve X = A X A' - A X H' (H X H' + Sigma)^-1 H X A' + Q by fixed-point
/// iteration of the Riccati map from X0 = Q. The iterate is re-symmetrized at
/// every step to damp roundoff drift.
///
/// Throws NonConvergence if the Frobenius delta between iterates does not drop
/// below `tol` within `max_iter` steps, and SingularInnovation if H X H' + Sigma
/// loses positive definiteness.
Matrix dare_solve(const Matrix& a, const Matrix& h, const Matrix& sigma,
                  const Matrix& q, double tol = 1e-10,
                  long max_iter = 1'000'000);

/// Solve X = Acl X Acl' + W for a stable Acl (spectral radius < 1) by
/// fixed-point iteration. Throws NonConvergence when the partial sums diverge
/// or the iteration cap is hit.
Matrix lyapunov_solve(const Matrix& acl, const Matrix& w, double tol = 1e-10,
                      long max_iter = 1'000'000);

/// Seeded multivariate Gaussian N(mean, covariance).
///
/// The covariance must be symmetric (1e-12 relative) and PSD up to
/// -1e-10 * trace; factorization is Cholesky with an eigenvalue fallback for
/// semidefinite matrices. Draws are bitwise reproducible for a given seed.
class GaussianSampler {
 public:
  GaussianSampler(Vector mean, const Matrix& covariance, std::uint64_t seed);

  /// Next draw; advances the internal stream.
  Vector draw();

  const Vector& mean() const { return mean_; }
  Eigen::Index dim() const { return mean_.size(); }

 private:
  Vector mean_;
  Matrix factor_;  // L with L L' = covariance
  std::mt19937_64 rng_;
};

std::vector<Vector> sample(GaussianSampler& sampler, long count);

}  // namespace robustfuse::linalg
