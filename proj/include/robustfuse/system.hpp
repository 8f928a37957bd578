#pragma once

#include <vector>

#include "robustfuse/linalg.hpp"

namespace robustfuse::sim {

using linalg::Matrix;
using linalg::Vector;

/// LTI plant x(k+1) = A x(k) + w(k) observed by m homogeneous sensors
/// y_i(k) = C x(k) + eps_i(k), w ~ N(0,Q), eps_i ~ N(0,R), x(0) ~ N(mu0, P0).
struct SystemModel {
  Matrix a;     // n x n
  Matrix c;     // l x n
  Matrix q;     // n x n, symmetric PSD
  Matrix r;     // l x l, symmetric PSD
  int m = 1;    // sensor count, all sensors share C and R
  Vector mu0;   // n
  Matrix p0;    // n x n, symmetric PSD

  Eigen::Index state_dim() const { return a.rows(); }
  Eigen::Index meas_dim() const { return c.rows(); }

  /// Stacked measurement matrix H = [C; ...; C] (lm x n).
  Matrix stacked_h() const;
  /// Stacked noise covariance Sigma = diag(R, ..., R) (lm x lm).
  Matrix stacked_sigma() const;

  void validate() const;
};

/// Steady-state Kalman quantities: gain K (n x lm), its per-sensor block G
/// (n x l), closed-loop matrix Acl = A - K H A, prediction covariance Pbar
/// and posterior covariance Ppost.
struct SteadyKalman {
  Matrix k;
  Matrix g;
  Matrix acl;
  Matrix pbar;
  Matrix ppost;
  double rho_acl = 0.0;  ///< spectral radius of Acl
};

/// The m per-sensor recursive estimates x~_i(k).
struct EstimatorBank {
  std::vector<Vector> locals;
  long step = 0;
};

/// Steady-state covariances of the local estimation errors: Pii for one
/// sensor, Pij (i != j) for a pair, and the stacked nm x nm Gamma whose (i,j)
/// block depends only on whether i == j.
struct CovarianceStructure {
  Matrix pii;
  Matrix pij;
  Matrix gamma;
};

/// Solves the DARE for Pbar and forms K, G, Acl. Verifies that K is m
/// replicated copies of G (1e-8 relative); a violation signals heterogeneous
/// inputs.
SteadyKalman build_steady_kalman(const SystemModel& model, double tol = 1e-10);

/// One plant step: next = A state + w, then one concurrent measurement per
/// sensor y_i = C next + eps_i. Sensors draw independently from eps_rng.
std::pair<Vector, std::vector<Vector>> simulate_step(
    const SystemModel& model, const Vector& state,
    linalg::GaussianSampler& w_rng, linalg::GaussianSampler& eps_rng);

/// Advance every local estimate: x~_i <- Acl x~_i + m G y_i.
EstimatorBank local_update(const EstimatorBank& bank, const SteadyKalman& sk,
                           int m, const std::vector<Vector>& measurements);

/// Arithmetic mean of the locals: equals the centralized steady-state Kalman
/// estimate when all locals start from mu0.
Vector kalman_fuse(const EstimatorBank& bank);

/// Pii solves X = Acl X Acl' + (mGC - I) Q (mGC - I)' + m^2 G R G';
/// Pij drops the measurement-noise term.
CovarianceStructure steady_covariances(const SystemModel& model,
                                       const SteadyKalman& sk,
                                       double tol = 1e-10);

/// One recorded simulation: per step the true state, the m raw measurements,
/// the m local estimates and the fused Kalman estimate.
struct TrajectoryRecord {
  struct Step {
    Vector x_true;
    std::vector<Vector> measurements;
    EstimatorBank bank;
    Vector kf_estimate;
  };
  std::vector<Step> steps;
};

/// Seed-fixed closed loop: x(0) ~ N(mu0, P0), locals start at mu0, one
/// record entry per step. Stream layout: split_seed(seed, 1) for the initial
/// state, 2 for process noise, 3 for measurement noise.
TrajectoryRecord simulate_trajectory(const SystemModel& model,
                                     const SteadyKalman& sk, long steps,
                                     std::uint64_t seed);

}  // namespace robustfuse::sim
