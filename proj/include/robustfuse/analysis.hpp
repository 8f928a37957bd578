#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "robustfuse/fusion.hpp"
#include "robustfuse/system.hpp"

namespace robustfuse::analysis {

using linalg::Vector;

enum class Verdict { RobustSufficient, NotRobust, Boundary };

struct RobustnessVerdict {
  Verdict verdict = Verdict::Boundary;
  int p = 0;
  int m = 0;
};

std::string to_string(Verdict v);

/// 2p < m -> robust (sufficient); 2p > m -> not robust; 2p == m -> boundary,
/// covered by neither direction.
RobustnessVerdict robustness_condition(int p, int m);

/// Lower group order statistic: the ceil((m-2p)/2)-th smallest element of u.
/// Requires 2p < m; throws RankOutOfRange otherwise. For m=5, p=2 this is the
/// minimum; for p=0 it is the lower median.
double kappa_lo(std::span<const double> u, int p, int m);

/// Mirror of kappa_lo: the ceil((m-2p)/2)-th largest element.
double kappa_hi(std::span<const double> u, int p, int m);

/// Worst-case deviation bound: per coordinate j, theta from the kappa order
/// statistics of the centered locals x~_i - xhat_r, then
/// beta+_j = max(|theta_lo_j - lambda/2|, |theta_hi_j + lambda/2|) and
/// mu = ||beta+||_1. Valid whenever 2p < m: no admissible attack can move the
/// estimate by more than mu in L1.
struct BoundReport {
  Vector theta_lo;
  Vector theta_hi;
  Vector beta_plus;
  double mu = 0.0;
};

BoundReport worst_case_bound(const std::vector<Vector>& locals,
                             const Vector& robust_estimate_no_attack, int p,
                             double lambda);

/// True iff max_i ||x~_i - mean(x~)||_1 <= lambda/2; on that region the robust
/// estimator returns the plain mean (the MMSE estimate).
bool mmse_region_check(const std::vector<Vector>& locals, double lambda);

struct RecoveryEstimate {
  double probability = 0.0;
  long samples = 0;
  double lambda = 0.0;
};

/// Monte Carlo estimate of Pr(x~ in G): draws stacked errors e ~ N(0, Gamma)
/// (the state cancels by translation invariance) and counts region hits.
/// Deterministic per seed; identical seeds across lambdas reuse the same
/// draws, so the probability is exactly monotone in lambda.
RecoveryEstimate recovery_probability(const sim::CovarianceStructure& cov,
                                      double lambda, long samples,
                                      std::uint64_t seed);

/// Asymptotic directional slope of F: C(u) = lambda ||u||_1.
double c_of_u(const Vector& u, double lambda);

}  // namespace robustfuse::analysis
