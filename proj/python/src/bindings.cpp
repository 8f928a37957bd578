#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "robustfuse/analysis.hpp"
#include "robustfuse/attack.hpp"
#include "robustfuse/fusion.hpp"
#include "robustfuse/harness.hpp"

namespace py = pybind11;

using namespace robustfuse;

namespace {

std::vector<linalg::Vector> rows_to_locals(
    const Eigen::Ref<const Eigen::MatrixXd>& z) {
  std::vector<linalg::Vector> locals;
  locals.reserve(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    locals.push_back(z.row(i).transpose());
  }
  return locals;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Robust fusion of per-sensor state estimates under sparse "
            "integrity attacks";

  py::register_exception<Error>(m, "RobustFuseError");

  // ---- fusion ----------------------------------------------------------
  m.def("huber_f", &fusion::huber_f, py::arg("tau"), py::arg("lambda_"));
  m.def("soft_threshold", &fusion::soft_threshold, py::arg("tau"),
        py::arg("lambda_"));
  m.def("big_f", &fusion::big_f, py::arg("u"), py::arg("lambda_"));
  m.def("phi", &fusion::phi, py::arg("u"), py::arg("lambda_"));
  m.def(
      "coordinate_minimize",
      [](const std::vector<double>& values, double lambda) {
        const auto sol = fusion::coordinate_minimize(values, lambda);
        return py::make_tuple(sol.xstar, py::make_tuple(sol.lo, sol.hi));
      },
      py::arg("values"), py::arg("lambda_"),
      "Exact minimizer of sum_i f(values[i] - x); returns (xstar, (lo, hi)).");
  m.def(
      "robust_fuse",
      [](const Eigen::Ref<const Eigen::MatrixXd>& z, double lambda) {
        fusion::FusionConfig fc{lambda, 1e-9};
        return fusion::robust_fuse(rows_to_locals(z), fc).xhat;
      },
      py::arg("z"), py::arg("lambda_"),
      "Robust estimate from an (m, n) array of local estimates.");
  m.def(
      "check_translation_invariance",
      [](const Eigen::Ref<const Eigen::MatrixXd>& z, const linalg::Vector& u,
         double lambda, double tol) {
        fusion::FusionConfig fc{lambda, tol};
        return fusion::check_translation_invariance(rows_to_locals(z), u, fc);
      },
      py::arg("z"), py::arg("u"), py::arg("lambda_"), py::arg("tol") = 1e-9);

  // ---- linalg ------------------------------------------------------------
  m.def("dare_solve", &linalg::dare_solve, py::arg("a"), py::arg("h"),
        py::arg("sigma"), py::arg("q"), py::arg("tol") = 1e-10,
        py::arg("max_iter") = 1000000L);
  m.def("lyapunov_solve", &linalg::lyapunov_solve, py::arg("acl"),
        py::arg("w"), py::arg("tol") = 1e-10, py::arg("max_iter") = 1000000L);

  // ---- system -------------------------------------------------------------
  py::class_<sim::SystemModel>(m, "SystemModel")
      .def(py::init<>())
      .def_readwrite("a", &sim::SystemModel::a)
      .def_readwrite("c", &sim::SystemModel::c)
      .def_readwrite("q", &sim::SystemModel::q)
      .def_readwrite("r", &sim::SystemModel::r)
      .def_readwrite("m", &sim::SystemModel::m)
      .def_readwrite("mu0", &sim::SystemModel::mu0)
      .def_readwrite("p0", &sim::SystemModel::p0);
  py::class_<sim::SteadyKalman>(m, "SteadyKalman")
      .def_readonly("k", &sim::SteadyKalman::k)
      .def_readonly("g", &sim::SteadyKalman::g)
      .def_readonly("acl", &sim::SteadyKalman::acl)
      .def_readonly("pbar", &sim::SteadyKalman::pbar)
      .def_readonly("ppost", &sim::SteadyKalman::ppost)
      .def_readonly("rho_acl", &sim::SteadyKalman::rho_acl);
  py::class_<sim::CovarianceStructure>(m, "CovarianceStructure")
      .def_readonly("pii", &sim::CovarianceStructure::pii)
      .def_readonly("pij", &sim::CovarianceStructure::pij)
      .def_readonly("gamma", &sim::CovarianceStructure::gamma);
  m.def("build_steady_kalman", &sim::build_steady_kalman, py::arg("model"),
        py::arg("tol") = 1e-10);
  m.def("steady_covariances", &sim::steady_covariances, py::arg("model"),
        py::arg("sk"), py::arg("tol") = 1e-10);
  m.def(
      "simulate_trajectory",
      [](const sim::SystemModel& model, const sim::SteadyKalman& sk,
         long steps, std::uint64_t seed) {
        const auto record = sim::simulate_trajectory(model, sk, steps, seed);
        const Eigen::Index n = model.state_dim();
        Eigen::MatrixXd x_true(steps, n), kf(steps, n);
        Eigen::MatrixXd locals(steps, model.m * n);
        for (long k = 0; k < steps; ++k) {
          const auto& step = record.steps[static_cast<std::size_t>(k)];
          x_true.row(k) = step.x_true.transpose();
          kf.row(k) = step.kf_estimate.transpose();
          for (int i = 0; i < model.m; ++i) {
            locals.block(k, i * n, 1, n) =
                step.bank.locals[static_cast<std::size_t>(i)].transpose();
          }
        }
        return py::make_tuple(x_true, kf, locals);
      },
      py::arg("model"), py::arg("sk"), py::arg("steps"), py::arg("seed"),
      "Seed-fixed closed-loop run; returns (x_true, kf, locals) with shapes "
      "(steps, n), (steps, n) and (steps, m*n) — reshape locals to "
      "(steps, m, n) to index per sensor.");

  // ---- analysis -------------------------------------------------------------
  m.def(
      "robustness_condition",
      [](int p, int mm) {
        return analysis::to_string(analysis::robustness_condition(p, mm).verdict);
      },
      py::arg("p"), py::arg("m"));
  m.def(
      "kappa_lo",
      [](const std::vector<double>& u, int p, int mm) {
        return analysis::kappa_lo(u, p, mm);
      },
      py::arg("u"), py::arg("p"), py::arg("m"));
  m.def(
      "kappa_hi",
      [](const std::vector<double>& u, int p, int mm) {
        return analysis::kappa_hi(u, p, mm);
      },
      py::arg("u"), py::arg("p"), py::arg("m"));
  py::class_<analysis::BoundReport>(m, "BoundReport")
      .def_readonly("theta_lo", &analysis::BoundReport::theta_lo)
      .def_readonly("theta_hi", &analysis::BoundReport::theta_hi)
      .def_readonly("beta_plus", &analysis::BoundReport::beta_plus)
      .def_readonly("mu", &analysis::BoundReport::mu);
  m.def(
      "worst_case_bound",
      [](const Eigen::Ref<const Eigen::MatrixXd>& locals, int p,
         double lambda) {
        const auto l = rows_to_locals(locals);
        fusion::FusionConfig fc{lambda, 1e-9};
        const auto xr = fusion::robust_fuse(l, fc).xhat;
        return analysis::worst_case_bound(l, xr, p, lambda);
      },
      py::arg("locals"), py::arg("p"), py::arg("lambda_"),
      "Worst-case L1 deviation bound mu over all attacks on up to p sensors; "
      "centers at the robust estimate of `locals`.");
  m.def(
      "mmse_region_check",
      [](const Eigen::Ref<const Eigen::MatrixXd>& locals, double lambda) {
        return analysis::mmse_region_check(rows_to_locals(locals), lambda);
      },
      py::arg("locals"), py::arg("lambda_"));
  py::class_<analysis::RecoveryEstimate>(m, "RecoveryEstimate")
      .def_readonly("probability", &analysis::RecoveryEstimate::probability)
      .def_readonly("samples", &analysis::RecoveryEstimate::samples)
      .def_readonly("lambda_", &analysis::RecoveryEstimate::lambda);
  m.def("recovery_probability", &analysis::recovery_probability,
        py::arg("cov"), py::arg("lambda_"), py::arg("samples"),
        py::arg("seed"));
  m.def("c_of_u", &analysis::c_of_u, py::arg("u"), py::arg("lambda_"));

  // ---- harness -------------------------------------------------------------
  m.def("demo_model", &harness::demo_model,
        "The two-state, five-sensor demo system used across the test suite.");
  m.def(
      "run_table1",
      [](long samples, std::uint64_t seed) {
        harness::ExperimentConfig config = harness::default_config();
        config.seed = seed;
        return harness::run_table1(config, {1.0, 2.0, 5.0, 10.0}, samples);
      },
      py::arg("samples") = 100000L, py::arg("seed") = 42ULL);
}
