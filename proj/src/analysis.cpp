#include "robustfuse/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "robustfuse/errors.hpp"

namespace robustfuse::analysis {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::RobustSufficient: return "RobustSufficient";
    case Verdict::NotRobust: return "NotRobust";
    case Verdict::Boundary: return "Boundary";
  }
  return "Boundary";
}

RobustnessVerdict robustness_condition(int p, int m) {
  if (m < 1 || p < 0 || p > m) {
    throw Error("robustness_condition: need 0 <= p <= m, m >= 1");
  }
  RobustnessVerdict rv;
  rv.p = p;
  rv.m = m;
  if (2 * p < m) rv.verdict = Verdict::RobustSufficient;
  else if (2 * p > m) rv.verdict = Verdict::NotRobust;
  else rv.verdict = Verdict::Boundary;
  return rv;
}

namespace {

// Rank of the group order statistic, 1-indexed from either end. ceil((m-2p)/2)
// is the deepest rank for which the force balance stays one-sided against any
// p-subset of saturated adversaries: with K entries strictly beyond theta the
// total gradient is at least (m - 2p - 2K) * lambda, positive iff
// K < (m - 2p)/2.
int kappa_rank(int p, int m) {
  if (m < 1 || p < 0 || 2 * p >= m) {
    throw RankOutOfRange("kappa: rank undefined unless 0 <= p and 2p < m");
  }
  return (m - 2 * p + 1) / 2;
}

}  // namespace

double kappa_lo(std::span<const double> u, int p, int m) {
  if (static_cast<int>(u.size()) != m) {
    throw DimensionMismatch("kappa_lo: |u| != m");
  }
  const int r = kappa_rank(p, m);
  std::vector<double> s(u.begin(), u.end());
  std::nth_element(s.begin(), s.begin() + (r - 1), s.end());
  return s[static_cast<std::size_t>(r - 1)];
}

double kappa_hi(std::span<const double> u, int p, int m) {
  if (static_cast<int>(u.size()) != m) {
    throw DimensionMismatch("kappa_hi: |u| != m");
  }
  const int r = kappa_rank(p, m);
  std::vector<double> s(u.begin(), u.end());
  std::nth_element(s.begin(), s.begin() + (r - 1), s.end(),
                   std::greater<double>());
  return s[static_cast<std::size_t>(r - 1)];
}

BoundReport worst_case_bound(const std::vector<Vector>& locals,
                             const Vector& robust_estimate_no_attack, int p,
                             double lambda) {
  if (locals.empty()) throw Error("worst_case_bound: no locals");
  const int m = static_cast<int>(locals.size());
  const Eigen::Index n = locals.front().size();
  if (robust_estimate_no_attack.size() != n) {
    throw DimensionMismatch("worst_case_bound: estimate dimension mismatch");
  }

  BoundReport report;
  report.theta_lo.resize(n);
  report.theta_hi.resize(n);
  report.beta_plus.resize(n);
  std::vector<double> zeta(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) {
      zeta[static_cast<std::size_t>(i)] =
          locals[static_cast<std::size_t>(i)][j] -
          robust_estimate_no_attack[j];
    }
    report.theta_lo[j] = kappa_lo(zeta, p, m);
    report.theta_hi[j] = kappa_hi(zeta, p, m);
    report.beta_plus[j] = std::max(std::abs(report.theta_lo[j] - lambda / 2),
                                   std::abs(report.theta_hi[j] + lambda / 2));
  }
  report.mu = report.beta_plus.lpNorm<1>();
  return report;
}

bool mmse_region_check(const std::vector<Vector>& locals, double lambda) {
  if (locals.empty()) throw Error("mmse_region_check: no locals");
  Vector mean = Vector::Zero(locals.front().size());
  for (const auto& x : locals) mean += x;
  mean /= static_cast<double>(locals.size());
  double worst = 0.0;
  for (const auto& x : locals) {
    worst = std::max(worst, (x - mean).lpNorm<1>());
  }
  return worst <= lambda / 2;
}

RecoveryEstimate recovery_probability(const sim::CovarianceStructure& cov,
                                      double lambda, long samples,
                                      std::uint64_t seed) {
  if (samples < 1) throw Error("recovery_probability: samples must be >= 1");
  const Eigen::Index nm = cov.gamma.rows();
  const Eigen::Index n = cov.pii.rows();
  const int m = static_cast<int>(nm / n);

  linalg::GaussianSampler sampler(Vector::Zero(nm), cov.gamma, seed);
  std::vector<Vector> locals(static_cast<std::size_t>(m));
  long hits = 0;
  for (long s = 0; s < samples; ++s) {
    const Vector e = sampler.draw();
    for (int i = 0; i < m; ++i) {
      locals[static_cast<std::size_t>(i)] = e.segment(i * n, n);
    }
    if (mmse_region_check(locals, lambda)) ++hits;
  }

  RecoveryEstimate est;
  est.probability = static_cast<double>(hits) / static_cast<double>(samples);
  est.samples = samples;
  est.lambda = lambda;
  return est;
}

double c_of_u(const Vector& u, double lambda) {
  return lambda * u.lpNorm<1>();
}

}  // namespace robustfuse::analysis
