#include "robustfuse/attack.hpp"

#include <algorithm>
#include <memory>

#include "robustfuse/errors.hpp"

namespace robustfuse::attack {

std::vector<Vector> apply_attack(const EstimatorBank& bank,
                                 const AttackVector& attack) {
  if (attack.a.size() != bank.locals.size()) {
    throw DimensionMismatch("apply_attack: attack size != sensor count");
  }
  std::vector<Vector> z;
  z.reserve(bank.locals.size());
  for (std::size_t i = 0; i < bank.locals.size(); ++i) {
    if (attack.a[i].size() != bank.locals[i].size()) {
      throw DimensionMismatch("apply_attack: attack dimension mismatch");
    }
    const bool compromised =
        std::find(attack.support.begin(), attack.support.end(),
                  static_cast<int>(i)) != attack.support.end();
    if (!compromised && attack.a[i].norm() != 0.0) {
      throw SparsityViolation(
          "apply_attack: nonzero attack outside declared support");
    }
    z.push_back(bank.locals[i] + attack.a[i]);
  }
  return z;
}

AttackVector drive_attack(const Vector& u, double t, const EstimatorBank& bank,
                          const std::vector<int>& compromised) {
  const Eigen::Index n = bank.locals.empty() ? u.size()
                                             : bank.locals.front().size();
  AttackVector av;
  av.support = compromised;
  std::sort(av.support.begin(), av.support.end());
  av.a.assign(bank.locals.size(), Vector::Zero(n));
  const Vector target = t * u;
  for (int i : av.support) {
    av.a[static_cast<std::size_t>(i)] =
        target - bank.locals[static_cast<std::size_t>(i)];
  }
  return av;
}

AttackVector random_bias_attack(const std::vector<int>& compromised,
                                double scale, Eigen::Index n, int m,
                                std::mt19937_64& rng) {
  AttackVector av;
  av.support = compromised;
  std::sort(av.support.begin(), av.support.end());
  av.a.assign(static_cast<std::size_t>(m), Vector::Zero(n));
  for (int i : av.support) {
    Vector noise(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      noise[j] = scale * linalg::standard_normal(rng);
    }
    av.a[static_cast<std::size_t>(i)] = noise;
  }
  return av;
}

AttackGenerator no_attack_generator() {
  return [](long, const EstimatorBank& bank) {
    AttackVector av;
    const Eigen::Index n =
        bank.locals.empty() ? 0 : bank.locals.front().size();
    av.a.assign(bank.locals.size(), Vector::Zero(n));
    return av;
  };
}

AttackGenerator drive_attack_generator(Vector u, double t,
                                       std::vector<int> compromised) {
  return [u = std::move(u), t, compromised = std::move(compromised)](
             long, const EstimatorBank& bank) {
    return drive_attack(u, t, bank, compromised);
  };
}

AttackGenerator random_bias_generator(std::vector<int> compromised,
                                      double scale, Eigen::Index n,
                                      std::uint64_t seed) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return [compromised = std::move(compromised), scale, n, rng](
             long, const EstimatorBank& bank) {
    return random_bias_attack(compromised, scale, n,
                              static_cast<int>(bank.locals.size()), *rng);
  };
}

}  // namespace robustfuse::attack
