#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "robustfuse/fusion.hpp"
#include "robustfuse/system.hpp"

using namespace robustfuse;
using linalg::Vector;

namespace {

std::mt19937_64 rng(20240811);

double uniform(double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

double objective(const std::vector<double>& values, double x, double lambda) {
  double acc = 0.0;
  for (double v : values) acc += fusion::huber_f(v - x, lambda);
  return acc;
}

// Function-value golden-section search. Comparisons near the optimum cannot
// resolve objective differences below machine-eps * J, so the objective is
// evaluated in __float128 (needs only +,-,*,<): in double the localization
// floor is ~sqrt(eps * J) ~ 5e-9, coarser than the 1e-9 these tests demand.
double golden_section(const std::vector<double>& values, double lambda) {
  using quad = __float128;
  auto obj = [&](quad x) {
    quad acc = 0;
    const quad l = lambda;
    for (double v : values) {
      const quad t = static_cast<quad>(v) - x;
      const quad a = t < 0 ? -t : t;
      acc += (a <= l / 2) ? t * t : l * a - l * l / 4;
    }
    return acc;
  };
  quad a = *std::min_element(values.begin(), values.end()) - (quad)lambda;
  quad b = *std::max_element(values.begin(), values.end()) + (quad)lambda;
  const quad gr = 0.6180339887498948482L;
  quad c = b - gr * (b - a);
  quad d = a + gr * (b - a);
  for (int it = 0; it < 220; ++it) {
    if (obj(c) < obj(d)) {
      b = d;
      d = c;
      c = b - gr * (b - a);
    } else {
      a = c;
      c = d;
      d = a + gr * (b - a);
    }
  }
  return static_cast<double>((a + b) / 2);
}

std::vector<Vector> random_locals(int m, int n, double scale) {
  std::vector<Vector> z;
  for (int i = 0; i < m; ++i) {
    Vector v(n);
    for (int j = 0; j < n; ++j) v[j] = scale * linalg::standard_normal(rng);
    z.push_back(v);
  }
  return z;
}

}  // namespace

TEST_CASE("huber_f: branch values and continuity at the kink") {
  CHECK(fusion::huber_f(0.3, 1.0) == doctest::Approx(0.09));
  CHECK(fusion::huber_f(2.0, 1.0) == doctest::Approx(1.75));
  // Both branches give lambda^2/4 at |tau| = lambda/2.
  for (double lambda : {0.25, 1.0, 7.5}) {
    const double kink = lambda / 2;
    CHECK(fusion::huber_f(kink, lambda) ==
          doctest::Approx(lambda * lambda / 4).epsilon(1e-12));
    CHECK(fusion::huber_f(std::nextafter(kink, 1e300), lambda) ==
          doctest::Approx(lambda * lambda / 4).epsilon(1e-9));
    CHECK(fusion::huber_f(-kink, lambda) ==
          doctest::Approx(lambda * lambda / 4).epsilon(1e-12));
  }
}

TEST_CASE("soft_threshold: kill zone and shrinkage") {
  CHECK(fusion::soft_threshold(0.3, 1.0) == 0.0);
  CHECK(fusion::soft_threshold(2.0, 1.0) == doctest::Approx(1.5));
  CHECK(fusion::soft_threshold(-2.0, 1.0) == doctest::Approx(-1.5));
}

TEST_CASE("big_f: sums branch values; F(0) = 0") {
  Vector u(2);
  u << 0.3, 2.0;
  CHECK(fusion::big_f(u, 1.0) == doctest::Approx(1.84));
  CHECK(fusion::big_f(Vector::Zero(3), 1.0) == 0.0);
}

TEST_CASE("big_f: prox identity against soft_threshold") {
  for (int trial = 0; trial < 200; ++trial) {
    const double lambda = uniform(0.05, 20.0);
    Vector u(4);
    for (int j = 0; j < 4; ++j) u[j] = 5.0 * linalg::standard_normal(rng);
    Vector v(4);
    for (int j = 0; j < 4; ++j) v[j] = fusion::soft_threshold(u[j], lambda);
    const double direct = fusion::big_f(u, lambda);
    const double via_prox = (u - v).squaredNorm() + lambda * v.lpNorm<1>();
    CHECK(direct == doctest::Approx(via_prox).epsilon(1e-12));
  }
}

TEST_CASE("properties of f and F: even, nonnegative, midpoint convex") {
  for (int trial = 0; trial < 200; ++trial) {
    const double lambda = uniform(0.05, 20.0);
    const double a = 10.0 * linalg::standard_normal(rng);
    const double b = 10.0 * linalg::standard_normal(rng);
    CHECK(fusion::huber_f(a, lambda) ==
          doctest::Approx(fusion::huber_f(-a, lambda)));
    CHECK(fusion::huber_f(a, lambda) >= 0.0);
    const double mid = fusion::huber_f((a + b) / 2, lambda);
    const double avg =
        (fusion::huber_f(a, lambda) + fusion::huber_f(b, lambda)) / 2;
    CHECK(mid <= avg + 1e-12 * std::max(1.0, avg));

    Vector u(3), v(3);
    for (int j = 0; j < 3; ++j) {
      u[j] = 6.0 * linalg::standard_normal(rng);
      v[j] = 6.0 * linalg::standard_normal(rng);
    }
    CHECK(fusion::big_f(u, lambda) ==
          doctest::Approx(fusion::big_f(-u, lambda)));
    CHECK(fusion::big_f(u, lambda) >= 0.0);
    const double fmid = fusion::big_f((u + v) / 2, lambda);
    const double favg =
        (fusion::big_f(u, lambda) + fusion::big_f(v, lambda)) / 2;
    CHECK(fmid <= favg + 1e-12 * std::max(1.0, favg));
  }
}

TEST_CASE("phi: branch values, oddness, zero at zero") {
  Vector u(1);
  u << 0.2;
  CHECK(fusion::phi(u, 1.0)(0) == doctest::Approx(0.4));
  u << 3.0;
  CHECK(fusion::phi(u, 1.0)(0) == doctest::Approx(1.0));
  u << -3.0;
  CHECK(fusion::phi(u, 1.0)(0) == doctest::Approx(-1.0));
  u << 0.0;
  CHECK(fusion::phi(u, 1.0)(0) == 0.0);
}

TEST_CASE("phi: matches central finite differences of big_f") {
  const double step = 1e-6;
  int checked = 0;
  while (checked < 100) {
    const double lambda = uniform(0.1, 5.0);
    Vector u(3);
    for (int j = 0; j < 3; ++j) u[j] = 3.0 * linalg::standard_normal(rng);
    // Stay away from the kinks, where the difference quotient straddles the
    // branch change.
    bool near_kink = false;
    for (int j = 0; j < 3; ++j) {
      if (std::abs(std::abs(u[j]) - lambda / 2) < 1e-3) near_kink = true;
    }
    if (near_kink) continue;
    const Vector g = fusion::phi(u, lambda);
    for (int j = 0; j < 3; ++j) {
      Vector up = u, dn = u;
      up[j] += step;
      dn[j] -= step;
      const double fd =
          (fusion::big_f(up, lambda) - fusion::big_f(dn, lambda)) / (2 * step);
      CHECK(std::abs(g[j] - fd) < 1e-4);
    }
    ++checked;
  }
}

TEST_CASE("phi: gradient bound and asymptotic slope (directional limits)") {
  for (int trial = 0; trial < 200; ++trial) {
    const double lambda = uniform(0.05, 10.0);
    Vector u(3), v(3);
    for (int j = 0; j < 3; ++j) {
      u[j] = 4.0 * linalg::standard_normal(rng);
      v[j] = 4.0 * linalg::standard_normal(rng);
    }
    // phi(v + u)' u <= lambda ||u||_1 for every u, v.
    const double lhs = fusion::phi(v + u, lambda).dot(u);
    CHECK(lhs <= lambda * u.lpNorm<1>() + 1e-10);

    // At t = 1e6 every nonzero coordinate is saturated, so the directional
    // slope equals lambda ||u||_1 up to roundoff.
    for (int j = 0; j < 3; ++j) {
      if (std::abs(u[j]) < 0.01) u[j] = 0.0;
    }
    if (u.lpNorm<1>() == 0.0) continue;
    const double slope = fusion::phi(1e6 * u, lambda).dot(u);
    CHECK(std::abs(slope - lambda * u.lpNorm<1>()) < 1e-9);
  }
}

TEST_CASE("coordinate_minimize: constant input returns the constant") {
  std::vector<double> values(5, 3.25);
  const auto sol = fusion::coordinate_minimize(values, 2.0);
  CHECK(sol.xstar == doctest::Approx(3.25));
  CHECK(sol.lo == doctest::Approx(sol.hi));
}

TEST_CASE("coordinate_minimize: mixed zones have an exact stationary point") {
  // Two points at 0 in the quadratic zone and one saturated at 10:
  // derivative -4x + lambda = 0 on (0, 1/2) gives x = 1/4.
  const auto sol = fusion::coordinate_minimize(std::vector<double>{0, 0, 10}, 1.0);
  CHECK(sol.xstar == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(golden_section({0, 0, 10}, 1.0) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(sol.quadratic == 2);
  CHECK(sol.saturated_above == 1);
}

TEST_CASE("coordinate_minimize: all-quadratic regime is the sample mean") {
  const auto sol =
      fusion::coordinate_minimize(std::vector<double>{1, 2, 3}, 100.0);
  CHECK(sol.xstar == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sol.quadratic == 3);
}

TEST_CASE("coordinate_minimize: flat minimizer interval is reported") {
  // m = 2 far apart: every x between the saturation edges is optimal.
  const auto sol = fusion::coordinate_minimize(std::vector<double>{0, 10}, 1.0);
  CHECK(sol.lo == doctest::Approx(0.5));
  CHECK(sol.hi == doctest::Approx(9.5));
  CHECK(sol.xstar == doctest::Approx(5.0));
  const double j_mid = objective({0, 10}, sol.xstar, 1.0);
  CHECK(objective({0, 10}, sol.lo, 1.0) == doctest::Approx(j_mid));
  CHECK(objective({0, 10}, sol.hi, 1.0) == doctest::Approx(j_mid));
}

TEST_CASE("coordinate_minimize: golden-section agreement on random instances") {
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 1 + static_cast<int>(rng() % 9);
    const double lambda = std::pow(10.0, uniform(-2.0, 2.0));
    std::vector<double> values(m);
    const double scale = uniform(0.1, 10.0);
    for (double& v : values) v = scale * linalg::standard_normal(rng);

    const auto sol = fusion::coordinate_minimize(values, lambda);
    const double gs = golden_section(values, lambda);
    CHECK(gs >= sol.lo - 1e-9);
    CHECK(gs <= sol.hi + 1e-9);
    if (sol.hi - sol.lo < 1e-9) {
      CHECK(std::abs(sol.xstar - gs) <= 1e-9);
    }
    CHECK(objective(values, sol.xstar, lambda) <=
          objective(values, gs, lambda) + 1e-9);

    // Subgradient straddles zero across the solution.
    const double h = 1e-7 * std::max(1.0, std::abs(sol.xstar));
    CHECK(objective(values, sol.lo - h, lambda) >=
          objective(values, sol.xstar, lambda) - 1e-12);
    CHECK(objective(values, sol.hi + h, lambda) >=
          objective(values, sol.xstar, lambda) - 1e-12);
  }
}

TEST_CASE("robust_fuse: trivial and composed coordinate problems") {
  fusion::FusionConfig fc{1.0, 1e-9};
  Vector c(2);
  c << -1.5, 2.5;
  const auto same = fusion::robust_fuse(std::vector<Vector>(4, c), fc);
  CHECK((same.xhat - c).norm() < 1e-12);

  // Coordinates are independent: {0,0,10} and {1,2,3} side by side.
  std::vector<Vector> z(3, Vector(2));
  z[0] << 0, 1;
  z[1] << 0, 2;
  z[2] << 10, 3;
  const auto est = fusion::robust_fuse(z, fc);
  CHECK(est.xhat(0) == doctest::Approx(0.25).epsilon(1e-12));
  // lambda = 1 saturates residuals in coordinate 2 as well; the minimizer is
  // the median there.
  CHECK(est.xhat(1) == doctest::Approx(2.0).epsilon(1e-12));

  fusion::FusionConfig wide{100.0, 1e-9};
  const auto mean_est = fusion::robust_fuse(z, wide);
  sim::EstimatorBank bank{z, 0};
  CHECK((mean_est.xhat - sim::kalman_fuse(bank)).lpNorm<Eigen::Infinity>() <
        1e-12);
}

TEST_CASE("robust_fuse: objective at the estimate beats every input") {
  fusion::FusionConfig fc{0.7, 1e-9};
  for (int trial = 0; trial < 50; ++trial) {
    const auto z = random_locals(5, 2, 3.0);
    const auto est = fusion::robust_fuse(z, fc);
    auto total = [&](const Vector& x) {
      double acc = 0.0;
      for (const auto& zi : z) acc += fusion::big_f(zi - x, fc.lambda);
      return acc;
    };
    const double at_est = total(est.xhat);
    for (const auto& zi : z) CHECK(at_est <= total(zi) + 1e-12);
  }
}

TEST_CASE("translation invariance: random shifts and extreme magnitudes") {
  fusion::FusionConfig fc{1.0, 1e-9};
  Vector zero = Vector::Zero(2);
  CHECK(fusion::check_translation_invariance(random_locals(5, 2, 2.0), zero,
                                             fc));
  for (int trial = 0; trial < 100; ++trial) {
    const auto z = random_locals(5, 2, 5.0);
    Vector u(2);
    u << 10.0 * linalg::standard_normal(rng),
        10.0 * linalg::standard_normal(rng);
    CHECK(fusion::check_translation_invariance(z, u, fc));
  }
  Vector huge(2);
  huge << 1e6, -1e6;
  fusion::FusionConfig loose{1.0, 1e-7};  // breakpoints shifted by 1e6 round
  CHECK(fusion::check_translation_invariance(random_locals(5, 2, 5.0), huge,
                                             loose));
}

TEST_CASE("robust_fuse solves the constrained lasso form") {
  // Alternating minimization over (xhat, a) of
  //   sum_i ||z_i - xhat - a_i||^2 + lambda sum_i ||a_i||_1
  // is an independent route to the same optimum (inner step: soft threshold;
  // outer step: mean of z_i - a_i).
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 2 + static_cast<int>(rng() % 4);
    const int n = 1 + static_cast<int>(rng() % 2);
    const double lambda = uniform(0.2, 5.0);
    const auto z = random_locals(m, n, 2.0);

    Vector xhat = Vector::Zero(n);
    for (const auto& zi : z) xhat += zi;
    xhat /= m;
    std::vector<Vector> a(z.size(), Vector::Zero(n));
    double obj = 0.0;
    for (int it = 0; it < 20000; ++it) {
      for (std::size_t i = 0; i < z.size(); ++i) {
        for (int j = 0; j < n; ++j) {
          a[i][j] = fusion::soft_threshold(z[i][j] - xhat[j], lambda);
        }
      }
      xhat.setZero();
      for (std::size_t i = 0; i < z.size(); ++i) xhat += z[i] - a[i];
      xhat /= m;
      double next = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) {
        next += (z[i] - xhat - a[i]).squaredNorm() + lambda * a[i].lpNorm<1>();
      }
      if (it > 10 && std::abs(next - obj) < 1e-14) {
        obj = next;
        break;
      }
      obj = next;
    }

    fusion::FusionConfig fc{lambda, 1e-9};
    const auto est = fusion::robust_fuse(z, fc);
    double direct = 0.0;
    for (const auto& zi : z) direct += fusion::big_f(zi - est.xhat, lambda);
    CHECK(direct <= obj + 1e-6);
    CHECK(obj <= direct + 1e-6);
  }
}

TEST_CASE("fusion config validation") {
  CHECK_THROWS_AS(fusion::FusionConfig({-1.0, 1e-9}).validate(), Error);
  CHECK_THROWS_AS(
      fusion::coordinate_minimize(std::vector<double>{}, 1.0), Error);
}
