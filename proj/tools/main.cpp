#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "robustfuse/harness.hpp"

namespace {

using robustfuse::harness::ExperimentConfig;

struct CommonOpts {
  std::string config_path;
  std::vector<double> lambdas;
  long steps = -1;
  std::int64_t seed = -1;
  int p = -1;
  std::string attack;
  std::vector<double> drive_direction;
  double drive_magnitude = -1.0;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file");
  cmd->add_option("--lambda", opts.lambdas,
                  "penalty value(s); repeatable, replaces the config list");
  cmd->add_option("--steps", opts.steps, "trajectory length");
  cmd->add_option("--seed", opts.seed, "master seed");
  cmd->add_option("--p", opts.p, "number of compromised sensors");
  cmd->add_option("--attack", opts.attack, "attack strategy")
      ->check(CLI::IsMember({"none", "drive", "random"}));
  cmd->add_option("--drive-direction", opts.drive_direction,
                  "drive attack direction (n components)");
  cmd->add_option("--drive-magnitude", opts.drive_magnitude,
                  "drive attack magnitude t");
  cmd->add_option("--out", opts.out, "output CSV path");
}

ExperimentConfig resolve(const CommonOpts& opts) {
  ExperimentConfig config = opts.config_path.empty()
                                ? robustfuse::harness::default_config()
                                : robustfuse::harness::load_config(
                                      opts.config_path);
  if (!opts.lambdas.empty()) config.lambdas = opts.lambdas;
  if (opts.steps >= 0) config.steps = opts.steps;
  if (opts.seed >= 0) config.seed = static_cast<std::uint64_t>(opts.seed);
  if (opts.p >= 0) config.p = opts.p;
  if (!opts.attack.empty()) config.attack.type = opts.attack;
  if (!opts.drive_direction.empty()) {
    config.attack.direction = Eigen::Map<const Eigen::VectorXd>(
        opts.drive_direction.data(),
        static_cast<Eigen::Index>(opts.drive_direction.size()));
  }
  if (opts.drive_magnitude >= 0) {
    config.attack.magnitude = opts.drive_magnitude;
  }
  if (!opts.out.empty()) config.output = opts.out;
  config.validate();
  return config;
}

void emit(const robustfuse::harness::RunArtifact& artifact,
          const std::string& out) {
  if (out.empty()) {
    robustfuse::harness::write_csv(artifact, std::cout);
  } else {
    robustfuse::harness::write_csv_file(artifact, out);
    robustfuse::harness::write_summary_file(artifact.summary,
                                            out + ".summary.json");
    std::cerr << "wrote " << out << " and " << out << ".summary.json\n";
  }
}

robustfuse::harness::RunArtifact mu_only(
    const robustfuse::harness::RunArtifact& artifact) {
  robustfuse::harness::RunArtifact slim;
  slim.summary = artifact.summary;
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < artifact.columns.size(); ++c) {
    const std::string& name = artifact.columns[c];
    if (name == "k" || name.rfind("mu_", 0) == 0) {
      keep.push_back(c);
      slim.columns.push_back(name);
    }
  }
  for (const auto& row : artifact.rows) {
    std::vector<double> out;
    out.reserve(keep.size());
    for (std::size_t c : keep) out.push_back(row[c]);
    slim.rows.push_back(std::move(out));
  }
  return slim;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "robustfuse: robust sensor-fusion state estimation under sparse "
      "integrity attacks"};
  app.require_subcommand(1);

  CommonOpts sim_opts;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "simulate a trajectory with estimates, attack deviations "
                  "and bounds (CSV)");
  add_common(simulate, sim_opts);

  CommonOpts bound_opts;
  CLI::App* bound = app.add_subcommand(
      "bound", "emit only the per-step worst-case deviation bound mu");
  add_common(bound, bound_opts);

  CommonOpts t1_opts;
  long t1_samples = 100000;
  CLI::App* table1 = app.add_subcommand(
      "table1", "Monte Carlo probability of recovering the Kalman estimate "
                "per lambda");
  add_common(table1, t1_opts);
  table1->add_option("--samples", t1_samples, "Monte Carlo sample count");

  int check_p = 2;
  int check_m = 5;
  CLI::App* check =
      app.add_subcommand("check", "robustness verdict for p out of m sensors");
  check->add_option("--p", check_p, "compromised sensor count");
  check->add_option("--m", check_m, "total sensor count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      const ExperimentConfig config = resolve(sim_opts);
      emit(robustfuse::harness::run_scenario(config), config.output);
    } else if (bound->parsed()) {
      const ExperimentConfig config = resolve(bound_opts);
      emit(mu_only(robustfuse::harness::run_scenario(config)), config.output);
    } else if (table1->parsed()) {
      const ExperimentConfig config = resolve(t1_opts);
      std::vector<double> lambdas = {1.0, 2.0, 5.0, 10.0};
      if (!t1_opts.lambdas.empty()) lambdas = t1_opts.lambdas;
      std::ostringstream csv;
      csv << "lambda,probability,samples\n";
      for (const auto& est :
           robustfuse::harness::run_table1(config, lambdas, t1_samples)) {
        csv << robustfuse::harness::format_double(est.lambda) << ','
            << robustfuse::harness::format_double(est.probability) << ','
            << est.samples << '\n';
      }
      if (config.output.empty()) {
        std::cout << csv.str();
      } else {
        std::ofstream out(config.output);
        if (!out) throw robustfuse::Error("cannot open " + config.output);
        out << csv.str();
        std::cerr << "wrote " << config.output << "\n";
      }
    } else if (check->parsed()) {
      const auto verdict =
          robustfuse::analysis::robustness_condition(check_p, check_m);
      std::cout << robustfuse::analysis::to_string(verdict.verdict) << " (p="
                << check_p << ", m=" << check_m << ", 2p"
                << (2 * check_p < check_m
                        ? " < "
                        : (2 * check_p > check_m ? " > " : " = "))
                << "m)\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
