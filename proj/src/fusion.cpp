#include "robustfuse/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "robustfuse/errors.hpp"

namespace robustfuse::fusion {

void FusionConfig::validate() const {
  if (!(lambda > 0)) throw Error("FusionConfig: lambda must be positive");
  if (!(tol > 0)) throw Error("FusionConfig: tol must be positive");
}

double huber_f(double tau, double lambda) {
  const double a = std::abs(tau);
  if (a <= lambda / 2) return tau * tau;
  return lambda * a - lambda * lambda / 4;
}

double soft_threshold(double tau, double lambda) {
  if (tau > lambda / 2) return tau - lambda / 2;
  if (tau < -lambda / 2) return tau + lambda / 2;
  return 0.0;
}

double big_f(const Vector& u, double lambda) {
  double out = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) out += huber_f(u[j], lambda);
  return out;
}

Vector phi(const Vector& u, double lambda) {
  Vector g(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    const double a = std::abs(u[j]);
    // Both branches agree at |u| = lambda/2; at zero the quadratic branch
    // applies, so phi(0) = 0 despite sgn(0) = +1.
    g[j] = (a <= lambda / 2) ? 2.0 * u[j]
                             : (u[j] > 0 ? lambda : -lambda);
  }
  return g;
}

namespace {

// Affine coefficients of d(x) = d/dx sum_i f(values[i] - x) on one open
// interval between breakpoints: d(x) = 2 q x - 2 sq + lambda (below - above).
// q, below, above are integer zone counts, so flat pieces evaluate to an exact
// zero when the saturated counts balance.
struct Piece {
  int quadratic = 0;
  double quad_sum = 0.0;
  int below = 0;  // values[i] < x - lambda/2
  int above = 0;  // values[i] > x + lambda/2

  double d_at(double x, double lambda) const {
    return 2.0 * quadratic * x - 2.0 * quad_sum +
           lambda * static_cast<double>(below - above);
  }
  double root(double lambda) const {
    return (2.0 * quad_sum - lambda * static_cast<double>(below - above)) /
           (2.0 * quadratic);
  }
};

Piece classify(std::span<const double> values, double lambda, double x) {
  Piece p;
  for (double v : values) {
    if (v < x - lambda / 2) {
      ++p.below;
    } else if (v > x + lambda / 2) {
      ++p.above;
    } else {
      ++p.quadratic;
      p.quad_sum += v;
    }
  }
  return p;
}

}  // namespace

CoordinateSolution coordinate_minimize(std::span<const double> values,
                                       double lambda) {
  if (values.empty()) throw Error("coordinate_minimize: empty input");
  if (!(lambda > 0)) throw Error("coordinate_minimize: lambda must be > 0");

  std::vector<double> bps;
  bps.reserve(2 * values.size());
  for (double v : values) {
    bps.push_back(v - lambda / 2);
    bps.push_back(v + lambda / 2);
  }
  std::sort(bps.begin(), bps.end());

  // d is continuous, nondecreasing, -m*lambda left of all breakpoints and
  // +m*lambda right of them, so the minimizer set [lo, hi] lies strictly
  // inside. Scan from the left for the piece where d(b) turns >= 0 and from
  // the right for the piece where d(a) turns <= 0; each boundary piece either
  // has quadratic members (unique linear root) or is an exactly flat zero run.
  double lo = bps.front();
  for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
    const double a = bps[k], b = bps[k + 1];
    if (!(a < b)) continue;
    const Piece p = classify(values, lambda, (a + b) / 2);
    if (p.d_at(b, lambda) >= 0) {
      lo = p.quadratic > 0 ? std::clamp(p.root(lambda), a, b) : a;
      break;
    }
  }
  double hi = bps.back();
  for (std::size_t k = bps.size() - 1; k > 0; --k) {
    const double a = bps[k - 1], b = bps[k];
    if (!(a < b)) continue;
    const Piece p = classify(values, lambda, (a + b) / 2);
    if (p.d_at(a, lambda) <= 0) {
      hi = p.quadratic > 0 ? std::clamp(p.root(lambda), a, b) : b;
      break;
    }
  }

  CoordinateSolution sol;
  sol.lo = lo;
  sol.hi = std::max(hi, lo);
  sol.xstar = (sol.lo + sol.hi) / 2;
  const Piece at = classify(values, lambda, sol.xstar);
  sol.quadratic = at.quadratic;
  sol.saturated_below = at.below;
  sol.saturated_above = at.above;
  return sol;
}

RobustEstimate robust_fuse(const std::vector<Vector>& z,
                           const FusionConfig& config) {
  config.validate();
  if (z.empty()) throw Error("robust_fuse: need at least one local estimate");
  const Eigen::Index n = z.front().size();
  for (const auto& zi : z) {
    if (zi.size() != n) {
      throw DimensionMismatch("robust_fuse: local estimates differ in size");
    }
  }

  RobustEstimate est;
  est.xhat.resize(n);
  est.per_coordinate.reserve(static_cast<std::size_t>(n));
  std::vector<double> column(z.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < z.size(); ++i) column[i] = z[i][j];
    CoordinateSolution sol = coordinate_minimize(column, config.lambda);
    est.xhat[j] = sol.xstar;
    est.per_coordinate.push_back(sol);
  }
  return est;
}

bool check_translation_invariance(const std::vector<Vector>& z,
                                  const Vector& u,
                                  const FusionConfig& config) {
  std::vector<Vector> shifted;
  shifted.reserve(z.size());
  for (const auto& zi : z) shifted.push_back(zi + u);
  const Vector lhs = robust_fuse(shifted, config).xhat;
  const Vector rhs = robust_fuse(z, config).xhat + u;
  return (lhs - rhs).lpNorm<Eigen::Infinity>() < config.tol;
}

}  // namespace robustfuse::fusion
