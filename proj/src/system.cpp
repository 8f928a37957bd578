#include "robustfuse/system.hpp"

#include <cmath>

#include "robustfuse/errors.hpp"

namespace robustfuse::sim {

Matrix SystemModel::stacked_h() const {
  Matrix h(c.rows() * m, c.cols());
  for (int i = 0; i < m; ++i) h.middleRows(i * c.rows(), c.rows()) = c;
  return h;
}

Matrix SystemModel::stacked_sigma() const {
  const Eigen::Index l = r.rows();
  Matrix sigma = Matrix::Zero(l * m, l * m);
  for (int i = 0; i < m; ++i) sigma.block(i * l, i * l, l, l) = r;
  return sigma;
}

void SystemModel::validate() const {
  const Eigen::Index n = a.rows();
  const Eigen::Index l = c.rows();
  if (m < 1) throw ConfigError("SystemModel: m must be >= 1");
  if (a.cols() != n) throw DimensionMismatch("SystemModel: A must be square");
  if (c.cols() != n) throw DimensionMismatch("SystemModel: C must be l x n");
  if (q.rows() != n || q.cols() != n)
    throw DimensionMismatch("SystemModel: Q must be n x n");
  if (r.rows() != l || r.cols() != l)
    throw DimensionMismatch("SystemModel: R must be l x l");
  if (mu0.size() != n) throw DimensionMismatch("SystemModel: mu0 must be n");
  if (p0.rows() != n || p0.cols() != n)
    throw DimensionMismatch("SystemModel: P0 must be n x n");
  for (const auto* sym : {&q, &r, &p0}) {
    if (!linalg::is_symmetric(*sym, 1e-9))
      throw ConfigError("SystemModel: Q, R, P0 must be symmetric");
  }
}

SteadyKalman build_steady_kalman(const SystemModel& model, double tol) {
  model.validate();
  const Eigen::Index n = model.state_dim();
  const Eigen::Index l = model.meas_dim();
  const Matrix h = model.stacked_h();
  const Matrix sigma = model.stacked_sigma();

  SteadyKalman sk;
  sk.pbar = linalg::dare_solve(model.a, h, sigma, model.q, tol);

  // Homogeneity makes K = [G ... G] with G solving the l x l system
  // G (m C Pbar C' + R) = Pbar C'. This route is well conditioned even for
  // R -> 0, where the stacked lm x lm innovation is nearly rank deficient.
  const Matrix cpc = model.c * sk.pbar * model.c.transpose();
  const Matrix s_small = static_cast<double>(model.m) * cpc + model.r;
  Eigen::LDLT<Matrix> ldlt(s_small);
  if (ldlt.info() != Eigen::Success) {
    throw SingularInnovation("build_steady_kalman: singular innovation");
  }
  sk.g = ldlt.solve(model.c * sk.pbar).transpose();  // n x l
  sk.k.resize(sk.g.rows(), l * model.m);
  for (int i = 0; i < model.m; ++i) sk.k.middleCols(i * l, l) = sk.g;

  // Replication is structural here, so verify the stacked defining equation
  // K (H Pbar H' + Sigma) = Pbar H' instead; a large residual means the
  // blocks cannot all equal G, i.e. the inputs were not homogeneous.
  const Matrix s_full = h * sk.pbar * h.transpose() + sigma;
  const Matrix rhs = sk.pbar * h.transpose();
  if ((sk.k * s_full - rhs).norm() >
      1e-8 * std::max(1.0, rhs.norm())) {
    throw BlockStructureViolation(
        "build_steady_kalman: replicated gain does not solve the stacked "
        "innovation equation");
  }

  sk.acl = model.a - sk.k * h * model.a;
  sk.rho_acl = linalg::spectral_radius(sk.acl);
  sk.ppost = (Matrix::Identity(n, n) - sk.k * h) * sk.pbar;
  return sk;
}

std::pair<Vector, std::vector<Vector>> simulate_step(
    const SystemModel& model, const Vector& state,
    linalg::GaussianSampler& w_rng, linalg::GaussianSampler& eps_rng) {
  Vector next = model.a * state + w_rng.draw();
  std::vector<Vector> ys;
  ys.reserve(static_cast<std::size_t>(model.m));
  for (int i = 0; i < model.m; ++i) {
    ys.push_back(model.c * next + eps_rng.draw());
  }
  return {std::move(next), std::move(ys)};
}

EstimatorBank local_update(const EstimatorBank& bank, const SteadyKalman& sk,
                           int m, const std::vector<Vector>& measurements) {
  if (bank.locals.size() != static_cast<std::size_t>(m) ||
      measurements.size() != static_cast<std::size_t>(m)) {
    throw DimensionMismatch("local_update: bank/measurement count != m");
  }
  EstimatorBank next;
  next.step = bank.step + 1;
  next.locals.reserve(bank.locals.size());
  for (int i = 0; i < m; ++i) {
    if (measurements[i].size() != sk.g.cols()) {
      throw DimensionMismatch("local_update: measurement dimension mismatch");
    }
    next.locals.push_back(sk.acl * bank.locals[i] +
                          static_cast<double>(m) * sk.g * measurements[i]);
  }
  return next;
}

Vector kalman_fuse(const EstimatorBank& bank) {
  if (bank.locals.empty()) throw Error("kalman_fuse: empty bank");
  Vector acc = Vector::Zero(bank.locals.front().size());
  for (const auto& x : bank.locals) acc += x;
  return acc / static_cast<double>(bank.locals.size());
}

CovarianceStructure steady_covariances(const SystemModel& model,
                                       const SteadyKalman& sk, double tol) {
  const Eigen::Index n = model.state_dim();
  const double md = static_cast<double>(model.m);
  const Matrix mgc = md * sk.g * model.c - Matrix::Identity(n, n);
  const Matrix w_common = mgc * model.q * mgc.transpose();
  const Matrix w_noise = md * md * sk.g * model.r * sk.g.transpose();

  CovarianceStructure cov;
  cov.pii = linalg::lyapunov_solve(sk.acl, w_common + w_noise, tol);
  cov.pij = linalg::lyapunov_solve(sk.acl, w_common, tol);

  cov.gamma.resize(n * model.m, n * model.m);
  for (int i = 0; i < model.m; ++i) {
    for (int j = 0; j < model.m; ++j) {
      cov.gamma.block(i * n, j * n, n, n) = (i == j) ? cov.pii : cov.pij;
    }
  }
  return cov;
}

TrajectoryRecord simulate_trajectory(const SystemModel& model,
                                     const SteadyKalman& sk, long steps,
                                     std::uint64_t seed) {
  const Eigen::Index n = model.state_dim();
  linalg::GaussianSampler x0_rng(model.mu0, model.p0,
                                 linalg::split_seed(seed, 1));
  linalg::GaussianSampler w_rng(Vector::Zero(n), model.q,
                                linalg::split_seed(seed, 2));
  linalg::GaussianSampler eps_rng(Vector::Zero(model.meas_dim()), model.r,
                                  linalg::split_seed(seed, 3));

  TrajectoryRecord record;
  record.steps.reserve(static_cast<std::size_t>(steps));
  Vector x = x0_rng.draw();
  EstimatorBank bank;
  bank.locals.assign(static_cast<std::size_t>(model.m), model.mu0);
  for (long k = 0; k < steps; ++k) {
    auto [next, ys] = simulate_step(model, x, w_rng, eps_rng);
    x = next;
    bank = local_update(bank, sk, model.m, ys);
    record.steps.push_back({x, ys, bank, kalman_fuse(bank)});
  }
  return record;
}

}  // namespace robustfuse::sim
