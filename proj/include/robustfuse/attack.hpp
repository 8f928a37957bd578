#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "robustfuse/system.hpp"

namespace robustfuse::attack {

using linalg::Vector;
using sim::EstimatorBank;

/// A (p,m)-sparse attack at one step: per-sensor offsets a_i, nonzero only on
/// the declared support. The support is fixed for the lifetime of a scenario.
struct AttackVector {
  std::vector<Vector> a;
  std::vector<int> support;  ///< sorted compromised indices, |support| <= p
};

/// Strategy interface: (step, clean bank) -> attack offsets. The estimator
/// never sees this; only z = x~ + a.
using AttackGenerator =
    std::function<AttackVector(long step, const EstimatorBank& bank)>;

struct AttackScenario {
  std::vector<int> compromised;
  AttackGenerator strategy;
};

/// z_i = x~_i + a_i. Throws SparsityViolation if some nonzero a_i lies outside
/// the declared support.
std::vector<Vector> apply_attack(const EstimatorBank& bank,
                                 const AttackVector& attack);

/// The necessity-proof construction: place every compromised local exactly at
/// t*u, i.e. a_i = t*u - x~_i on the support and zero elsewhere.
AttackVector drive_attack(const Vector& u, double t, const EstimatorBank& bank,
                          const std::vector<int>& compromised);

/// a_i ~ scale * N(0, I_n) on the support, zero elsewhere; reproducible per
/// rng state.
AttackVector random_bias_attack(const std::vector<int>& compromised,
                                double scale, Eigen::Index n, int m,
                                std::mt19937_64& rng);

AttackGenerator no_attack_generator();
AttackGenerator drive_attack_generator(Vector u, double t,
                                       std::vector<int> compromised);
AttackGenerator random_bias_generator(std::vector<int> compromised,
                                      double scale, Eigen::Index n,
                                      std::uint64_t seed);

}  // namespace robustfuse::attack
