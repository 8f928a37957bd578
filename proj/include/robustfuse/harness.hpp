#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "robustfuse/analysis.hpp"
#include "robustfuse/attack.hpp"

namespace robustfuse::harness {

using linalg::Vector;

struct AttackSpec {
  std::string type = "none";  ///< none | drive | random
  Vector direction;           ///< drive direction, normalized at run time
  double magnitude = 1e6;     ///< drive magnitude t
  double scale = 1e3;         ///< random bias scale
  std::vector<int> compromised;  ///< defaults to the first p indices
};

struct ExperimentConfig {
  sim::SystemModel model;
  int p = 2;
  std::vector<double> lambdas = {0.1, 1.0, 10.0};
  long steps = 200;
  std::uint64_t seed = 42;
  AttackSpec attack;
  std::string output;

  void validate() const;
};

/// Built-in demo scenario: two-state plant with one unstable mode, five
/// identical full-state sensors, p = 2.
ExperimentConfig default_config();
sim::SystemModel demo_model();

/// Parse a JSON config file; throws ConfigError naming the offending key.
ExperimentConfig load_config(const std::string& path);

struct ScenarioSummary {
  std::string verdict;
  int p = 0;
  int m = 0;
  long steps = 0;
  std::uint64_t seed = 0;
  std::string attack_type;
  std::vector<double> lambdas;
  std::vector<double> recovery_probability;   ///< per lambda, Monte Carlo
  std::vector<double> kf_agreement_fraction;  ///< steps with robust == KF
  std::vector<double> max_deviation;          ///< per lambda, over steps
  std::vector<double> max_mu;                 ///< per lambda, over steps
};

/// Per-step rows: k, true state, KF estimate, then per lambda the robust
/// estimate from the attacked data, the L1 deviation ||g(x~) - g(z)||_1 and
/// the bound mu(x~) (nan when 2p >= m leaves the bound undefined).
struct RunArtifact {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  ScenarioSummary summary;
};

RunArtifact run_scenario(const ExperimentConfig& config);

/// Recovery probabilities on the steady-state Gamma of config.model for each
/// lambda (Table-style sweep).
std::vector<analysis::RecoveryEstimate> run_table1(
    const ExperimentConfig& config,
    const std::vector<double>& lambdas = {1.0, 2.0, 5.0, 10.0},
    long samples = 100000);

/// CSV with a header row; floats serialized with 17 significant digits so a
/// fixed config + seed yields a byte-identical artifact.
void write_csv(const RunArtifact& artifact, std::ostream& os);
void write_csv_file(const RunArtifact& artifact, const std::string& path);

std::string summary_to_json(const ScenarioSummary& summary);
void write_summary_file(const ScenarioSummary& summary,
                        const std::string& path);

std::string format_double(double v);  ///< %.17g

}  // namespace robustfuse::harness
