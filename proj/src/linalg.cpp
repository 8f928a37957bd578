#include "robustfuse/linalg.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace robustfuse::linalg {

double spectral_radius(const Matrix& a) {
  Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_symmetric(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = a.norm();
  return (a - a.transpose()).norm() <= rel_tol * std::max(scale, 1.0);
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + stream * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

inline double uniform01(std::mt19937_64& rng) {
  // 53-bit mantissa in (0, 1]; never returns 0 so log() below is safe.
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

double standard_normal(std::mt19937_64& rng) {
  const double u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

Matrix dare_solve(const Matrix& a, const Matrix& h, const Matrix& sigma,
                  const Matrix& q, double tol, long max_iter) {
  if (tol <= 0) throw Error("dare_solve: tol must be positive");
  const Eigen::Index n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n || h.cols() != n ||
      sigma.rows() != h.rows() || sigma.cols() != h.rows()) {
    throw DimensionMismatch("dare_solve: inconsistent matrix dimensions");
  }

  Matrix x = q;
  for (long it = 0; it < max_iter; ++it) {
    const Matrix s = h * x * h.transpose() + sigma;
    Eigen::LLT<Matrix> llt(s);
    if (llt.info() != Eigen::Success) {
      throw SingularInnovation(
          "dare_solve: H X H' + Sigma is numerically singular");
    }
    const Matrix hxat = h * x * a.transpose();
    Matrix next =
        a * x * a.transpose() - hxat.transpose() * llt.solve(hxat) + q;
    next = ((next + next.transpose()) / 2.0).eval();
    const double delta = (next - x).norm();
    x = next;
    if (delta < tol) return x;
    if (!x.allFinite()) {
      throw NonConvergence("dare_solve: iterates are not finite");
    }
  }
  std::ostringstream msg;
  msg << "dare_solve: no convergence to tol=" << tol << " within " << max_iter
      << " iterations";
  throw NonConvergence(msg.str());
}

Matrix lyapunov_solve(const Matrix& acl, const Matrix& w, double tol,
                      long max_iter) {
  if (tol <= 0) throw Error("lyapunov_solve: tol must be positive");
  const Eigen::Index n = acl.rows();
  if (acl.cols() != n || w.rows() != n || w.cols() != n) {
    throw DimensionMismatch("lyapunov_solve: inconsistent matrix dimensions");
  }

  const double diverge_cap =
      1e12 * std::max(1.0, w.norm()) / std::max(tol, 1e-300);
  Matrix x = Matrix::Zero(n, n);
  for (long it = 0; it < max_iter; ++it) {
    Matrix next = acl * x * acl.transpose() + w;
    next = ((next + next.transpose()) / 2.0).eval();
    const double delta = (next - x).norm();
    x = next;
    if (delta < tol) return x;
    if (!x.allFinite() || x.norm() > diverge_cap) {
      throw NonConvergence(
          "lyapunov_solve: partial sums diverge (spectral radius >= 1?)");
    }
  }
  throw NonConvergence("lyapunov_solve: iteration cap reached");
}

GaussianSampler::GaussianSampler(Vector mean, const Matrix& covariance,
                                 std::uint64_t seed)
    : mean_(std::move(mean)), rng_(seed) {
  const Eigen::Index n = mean_.size();
  if (covariance.rows() != n || covariance.cols() != n) {
    throw DimensionMismatch("GaussianSampler: mean/covariance size mismatch");
  }
  if (!is_symmetric(covariance)) {
    throw FactorizationFailure("GaussianSampler: covariance not symmetric");
  }

  Eigen::LLT<Matrix> llt(covariance);
  if (llt.info() == Eigen::Success) {
    factor_ = llt.matrixL();
    return;
  }

  // Semidefinite fallback: eigenvalue factorization with a small negative
  // tolerance proportional to the trace.
  Eigen::SelfAdjointEigenSolver<Matrix> es(covariance);
  if (es.info() != Eigen::Success) {
    throw FactorizationFailure("GaussianSampler: eigendecomposition failed");
  }
  const double floor = -1e-10 * std::abs(covariance.trace());
  Vector evals = es.eigenvalues();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (evals[i] < floor) {
      throw FactorizationFailure(
          "GaussianSampler: covariance is not positive semidefinite");
    }
    evals[i] = std::max(evals[i], 0.0);
  }
  factor_ = es.eigenvectors() * evals.cwiseSqrt().asDiagonal();
}

Vector GaussianSampler::draw() {
  Vector z(mean_.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = standard_normal(rng_);
  return mean_ + factor_ * z;
}

std::vector<Vector> sample(GaussianSampler& sampler, long count) {
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) out.push_back(sampler.draw());
  return out;
}

}  // namespace robustfuse::linalg
