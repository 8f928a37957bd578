#pragma once

#include <span>
#include <vector>

#include "robustfuse/linalg.hpp"

namespace robustfuse::fusion {

using linalg::Vector;

struct FusionConfig {
  double lambda = 1.0;  ///< L1 penalty weight, > 0
  double tol = 1e-9;    ///< tolerance used by invariance checks

  void validate() const;
};

/// Value function of the scalar lasso subproblem min_v (tau - v)^2 + lambda|v|:
/// tau^2 inside |tau| <= lambda/2, lambda|tau| - lambda^2/4 outside. Convex,
/// even, C1, and both branches agree at the kink.
double huber_f(double tau, double lambda);

/// Minimizer v* of (tau - v)^2 + lambda|v|: zero inside |tau| <= lambda/2,
/// tau shrunk by lambda/2 toward zero outside.
double soft_threshold(double tau, double lambda);

/// F(u) = sum_j huber_f(u[j]); equals min_v ||u - v||^2 + lambda ||v||_1.
double big_f(const Vector& u, double lambda);

/// Entrywise gradient of F: 2 u[j] on the quadratic branch,
/// lambda * sign(u[j]) when saturated. phi(0) = 0.
Vector phi(const Vector& u, double lambda);

/// Exact minimizer set of sum_i huber_f(values[i] - x) over x for one
/// coordinate. The solution is the closed interval [lo, hi] (degenerate when
/// unique); xstar is its midpoint. The active-piece counts describe the
/// residual zones at xstar.
struct CoordinateSolution {
  double xstar = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int quadratic = 0;      ///< residuals with |values[i] - xstar| <= lambda/2
  int saturated_below = 0;  ///< values[i] < xstar - lambda/2
  int saturated_above = 0;  ///< values[i] > xstar + lambda/2
};

/// Exact per-coordinate solver: sorts the 2m breakpoints values[i] +- lambda/2;
/// on each open interval the objective derivative is affine, so the zero set
/// is found by a breakpoint scan plus one linear solve per boundary piece.
CoordinateSolution coordinate_minimize(std::span<const double> values,
                                       double lambda);

struct RobustEstimate {
  Vector xhat;
  std::vector<CoordinateSolution> per_coordinate;
};

/// The robust fusion estimator: argmin_x sum_i F(z_i - x). F is separable
/// across coordinates, so each coordinate is an independent exact
/// coordinate_minimize.
RobustEstimate robust_fuse(const std::vector<Vector>& z,
                           const FusionConfig& config);

/// Checks ||g(z + E u) - (u + g(z))||_inf < config.tol, where E stacks m
/// identity blocks.
bool check_translation_invariance(const std::vector<Vector>& z,
                                  const Vector& u, const FusionConfig& config);

}  // namespace robustfuse::fusion
