#include "robustfuse/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "robustfuse/errors.hpp"

namespace robustfuse::harness {

using nlohmann::json;

void ExperimentConfig::validate() const {
  model.validate();
  if (steps < 1) throw ConfigError("config key 'steps': must be >= 1");
  if (p < 0 || p > model.m) {
    throw ConfigError("config key 'p': must satisfy 0 <= p <= m");
  }
  if (lambdas.empty()) {
    throw ConfigError("config key 'lambdas': need at least one value");
  }
  for (double l : lambdas) {
    if (!(l > 0)) throw ConfigError("config key 'lambdas': values must be > 0");
  }
  if (attack.type != "none" && attack.type != "drive" &&
      attack.type != "random") {
    throw ConfigError("config key 'attack.type': expected none|drive|random");
  }
  for (int i : attack.compromised) {
    if (i < 0 || i >= model.m) {
      throw ConfigError("config key 'attack.compromised': index out of range");
    }
  }
  if (static_cast<int>(attack.compromised.size()) > p) {
    throw ConfigError("config key 'attack.compromised': more than p indices");
  }
}

sim::SystemModel demo_model() {
  sim::SystemModel model;
  model.a.resize(2, 2);
  model.a << 0.95, 1.0, 0.0, 1.01;
  model.q.resize(2, 2);
  model.q << 1.5, 1.0, 1.0, 2.0;
  model.c = linalg::Matrix::Identity(2, 2);
  model.r.resize(2, 2);
  model.r << 2.0, 1.0, 1.0, 1.0;
  model.m = 5;
  model.mu0 = Vector::Zero(2);
  model.p0 = linalg::Matrix::Identity(2, 2);
  return model;
}

ExperimentConfig default_config() {
  ExperimentConfig config;
  config.model = demo_model();
  return config;
}

namespace {

linalg::Matrix parse_matrix(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw ConfigError("config key '" + key +
                      "': expected an array of row arrays");
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().size();
  linalg::Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ConfigError("config key '" + key + "': ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) {
        throw ConfigError("config key '" + key + "': non-numeric entry");
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          j[r][c].get<double>();
    }
  }
  return m;
}

Vector parse_vector(const json& j, const std::string& key) {
  if (!j.is_array()) {
    throw ConfigError("config key '" + key + "': expected an array");
  }
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ConfigError("config key '" + key + "': non-numeric entry");
    }
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

template <typename T>
T parse_scalar(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  ExperimentConfig config = default_config();
  if (j.contains("model")) {
    const json& jm = j["model"];
    sim::SystemModel& model = config.model;
    if (jm.contains("A")) model.a = parse_matrix(jm["A"], "model.A");
    if (jm.contains("C")) model.c = parse_matrix(jm["C"], "model.C");
    if (jm.contains("Q")) model.q = parse_matrix(jm["Q"], "model.Q");
    if (jm.contains("R")) model.r = parse_matrix(jm["R"], "model.R");
    if (jm.contains("m")) model.m = parse_scalar<int>(jm["m"], "model.m");
    if (jm.contains("mu0")) {
      model.mu0 = parse_vector(jm["mu0"], "model.mu0");
    } else if (model.mu0.size() != model.a.rows()) {
      model.mu0 = Vector::Zero(model.a.rows());
    }
    if (jm.contains("P0")) {
      model.p0 = parse_matrix(jm["P0"], "model.P0");
    } else if (model.p0.rows() != model.a.rows()) {
      model.p0 = linalg::Matrix::Identity(model.a.rows(), model.a.rows());
    }
  }
  if (j.contains("p")) config.p = parse_scalar<int>(j["p"], "p");
  if (j.contains("lambdas")) {
    const Vector l = parse_vector(j["lambdas"], "lambdas");
    config.lambdas.assign(l.begin(), l.end());
  }
  if (j.contains("steps")) {
    config.steps = parse_scalar<long>(j["steps"], "steps");
  }
  if (j.contains("seed")) {
    config.seed = parse_scalar<std::uint64_t>(j["seed"], "seed");
  }
  if (j.contains("attack")) {
    const json& ja = j["attack"];
    if (ja.contains("type")) {
      config.attack.type = parse_scalar<std::string>(ja["type"], "attack.type");
    }
    if (ja.contains("direction")) {
      config.attack.direction =
          parse_vector(ja["direction"], "attack.direction");
    }
    if (ja.contains("magnitude")) {
      config.attack.magnitude =
          parse_scalar<double>(ja["magnitude"], "attack.magnitude");
    }
    if (ja.contains("scale")) {
      config.attack.scale = parse_scalar<double>(ja["scale"], "attack.scale");
    }
    if (ja.contains("compromised")) {
      const Vector c = parse_vector(ja["compromised"], "attack.compromised");
      config.attack.compromised.clear();
      for (double v : c) {
        config.attack.compromised.push_back(static_cast<int>(v));
      }
    }
  }
  if (j.contains("output")) {
    config.output = parse_scalar<std::string>(j["output"], "output");
  }
  config.validate();
  return config;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string lambda_tag(double lambda) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", lambda);
  return buf;
}

std::vector<int> effective_support(const ExperimentConfig& config) {
  if (!config.attack.compromised.empty()) return config.attack.compromised;
  std::vector<int> support;
  for (int i = 0; i < config.p; ++i) support.push_back(i);
  return support;
}

attack::AttackScenario make_scenario(const ExperimentConfig& config) {
  const Eigen::Index n = config.model.state_dim();
  attack::AttackScenario scenario;
  scenario.compromised = effective_support(config);
  if (config.attack.type == "drive") {
    Vector u = config.attack.direction;
    if (u.size() == 0) {
      u = Vector::Zero(n);
      u[0] = 1.0;
    }
    if (u.size() != n) {
      throw ConfigError("config key 'attack.direction': wrong dimension");
    }
    const double norm = u.norm();
    if (norm == 0.0) {
      throw ConfigError("config key 'attack.direction': zero vector");
    }
    scenario.strategy = attack::drive_attack_generator(
        u / norm, config.attack.magnitude, scenario.compromised);
  } else if (config.attack.type == "random") {
    scenario.strategy = attack::random_bias_generator(
        scenario.compromised, config.attack.scale, n,
        linalg::split_seed(config.seed, 1001));
  } else {
    scenario.strategy = attack::no_attack_generator();
  }
  return scenario;
}

}  // namespace

RunArtifact run_scenario(const ExperimentConfig& config) {
  config.validate();
  const sim::SystemModel& model = config.model;
  const Eigen::Index n = model.state_dim();
  const int m = model.m;

  const sim::SteadyKalman sk = sim::build_steady_kalman(model);
  const auto verdict = analysis::robustness_condition(config.p, m);
  const bool bounded = verdict.verdict == analysis::Verdict::RobustSufficient;

  RunArtifact artifact;
  artifact.columns.push_back("k");
  for (Eigen::Index i = 0; i < n; ++i) {
    artifact.columns.push_back("x" + std::to_string(i) + "_true");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    artifact.columns.push_back("x" + std::to_string(i) + "_kf");
  }
  for (double lambda : config.lambdas) {
    const std::string tag = lambda_tag(lambda);
    for (Eigen::Index i = 0; i < n; ++i) {
      artifact.columns.push_back("x" + std::to_string(i) + "_rob_" + tag);
    }
    artifact.columns.push_back("dev1_" + tag);
    artifact.columns.push_back("mu_" + tag);
  }

  const attack::AttackScenario scenario = make_scenario(config);
  const sim::TrajectoryRecord record =
      sim::simulate_trajectory(model, sk, config.steps, config.seed);

  ScenarioSummary& summary = artifact.summary;
  summary.verdict = analysis::to_string(verdict.verdict);
  summary.p = config.p;
  summary.m = m;
  summary.steps = config.steps;
  summary.seed = config.seed;
  summary.attack_type = config.attack.type;
  summary.lambdas = config.lambdas;
  const std::size_t nl = config.lambdas.size();
  summary.kf_agreement_fraction.assign(nl, 0.0);
  summary.max_deviation.assign(nl, 0.0);
  summary.max_mu.assign(nl, 0.0);

  artifact.rows.reserve(static_cast<std::size_t>(config.steps));
  for (long k = 1; k <= config.steps; ++k) {
    const auto& step = record.steps[static_cast<std::size_t>(k - 1)];
    const sim::EstimatorBank& bank = step.bank;
    const attack::AttackVector av = scenario.strategy(k, bank);
    const std::vector<Vector> z = attack::apply_attack(bank, av);
    const Vector& kf = step.kf_estimate;

    std::vector<double> row;
    row.reserve(artifact.columns.size());
    row.push_back(static_cast<double>(k));
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(step.x_true[i]);
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(kf[i]);

    for (std::size_t li = 0; li < nl; ++li) {
      const double lambda = config.lambdas[li];
      fusion::FusionConfig fc{lambda, 1e-9};
      const Vector clean = fusion::robust_fuse(bank.locals, fc).xhat;
      const Vector attacked = fusion::robust_fuse(z, fc).xhat;
      const double dev = (clean - attacked).lpNorm<1>();
      double mu = std::numeric_limits<double>::quiet_NaN();
      if (bounded) {
        mu = analysis::worst_case_bound(bank.locals, clean, config.p, lambda)
                 .mu;
      }
      for (Eigen::Index i = 0; i < n; ++i) row.push_back(attacked[i]);
      row.push_back(dev);
      row.push_back(mu);

      if ((clean - kf).lpNorm<Eigen::Infinity>() < 1e-9) {
        summary.kf_agreement_fraction[li] += 1.0;
      }
      summary.max_deviation[li] = std::max(summary.max_deviation[li], dev);
      if (bounded) summary.max_mu[li] = std::max(summary.max_mu[li], mu);
    }
    artifact.rows.push_back(std::move(row));
  }
  for (std::size_t li = 0; li < nl; ++li) {
    summary.kf_agreement_fraction[li] /= static_cast<double>(config.steps);
  }

  // Monte Carlo recovery probabilities on the steady-state Gamma; a fixed
  // sample budget keeps the summary deterministic and cheap.
  const sim::CovarianceStructure cov = sim::steady_covariances(model, sk);
  for (double lambda : config.lambdas) {
    summary.recovery_probability.push_back(
        analysis::recovery_probability(cov, lambda, 10000,
                                       linalg::split_seed(config.seed, 4))
            .probability);
  }
  return artifact;
}

std::vector<analysis::RecoveryEstimate> run_table1(
    const ExperimentConfig& config, const std::vector<double>& lambdas,
    long samples) {
  config.model.validate();
  const sim::SteadyKalman sk = sim::build_steady_kalman(config.model);
  const sim::CovarianceStructure cov =
      sim::steady_covariances(config.model, sk);
  std::vector<analysis::RecoveryEstimate> out;
  out.reserve(lambdas.size());
  for (double lambda : lambdas) {
    // Same seed for every lambda: identical draws make the sweep exactly
    // monotone, not just statistically.
    out.push_back(analysis::recovery_probability(
        cov, lambda, samples, linalg::split_seed(config.seed, 4)));
  }
  return out;
}

void write_csv(const RunArtifact& artifact, std::ostream& os) {
  for (std::size_t c = 0; c < artifact.columns.size(); ++c) {
    if (c) os << ',';
    os << artifact.columns[c];
  }
  os << '\n';
  for (const auto& row : artifact.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      os << format_double(row[c]);
    }
    os << '\n';
  }
}

void write_csv_file(const RunArtifact& artifact, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path);
  write_csv(artifact, out);
}

std::string summary_to_json(const ScenarioSummary& summary) {
  json j;
  j["verdict"] = summary.verdict;
  j["p"] = summary.p;
  j["m"] = summary.m;
  j["steps"] = summary.steps;
  j["seed"] = summary.seed;
  j["attack"] = summary.attack_type;
  j["lambdas"] = summary.lambdas;
  j["recovery_probability"] = summary.recovery_probability;
  j["kf_agreement_fraction"] = summary.kf_agreement_fraction;
  j["max_deviation"] = summary.max_deviation;
  j["max_mu"] = summary.max_mu;
  return j.dump(2);
}

void write_summary_file(const ScenarioSummary& summary,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open summary file: " + path);
  out << summary_to_json(summary) << '\n';
}

}  // namespace robustfuse::harness
