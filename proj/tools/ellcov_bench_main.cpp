#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ellcov/bench.hpp"

namespace {

using ellcov::bench::ConfigError;
using ellcov::bench::ExperimentConfig;
using ellcov::bench::RawFlags;
using ellcov::bench::Subcommand;

struct CommandState {
  RawFlags flags;
  std::string out_path;
};

void add_experiment_flags(CLI::App* cmd, CommandState& state) {
  cmd->add_option_function<int>(
      "--p", [&state](int v) { state.flags.p = v; }, "Response dimension p");
  cmd->add_option_function<int>(
      "--m", [&state](int v) { state.flags.m = v; },
      "Residual degrees of freedom m (rows of U)");
  cmd->add_option_function<std::string>(
      "--dist", [&state](const std::string& v) { state.flags.dist = v; },
      "Sampling distribution: gaussian | student");
  cmd->add_option_function<double>(
      "--df", [&state](double v) { state.flags.df = v; },
      "Degrees of freedom for --dist student (must exceed 2)");
  cmd->add_option_function<std::string>(
      "--sigma", [&state](const std::string& v) { state.flags.sigma = v; },
      "Scale-matrix structure: identity | ar1");
  cmd->add_option_function<double>(
      "--rho", [&state](double v) { state.flags.rho = v; },
      "AR1 coefficient (default 0.9)");
  cmd->add_option_function<std::string>(
      "--alpha", [&state](const std::string& v) { state.flags.alpha = v; },
      "Comma-separated shrinkage exponents");
  cmd->add_option_function<std::string>(
      "--b", [&state](const std::string& v) { state.flags.b = v; },
      "Shrink weight: comma-separated list, or b0 / b1");
  cmd->add_option_function<int>(
      "--reps", [&state](int v) { state.flags.reps = v; },
      "Monte-Carlo replications (default 1000)");
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&state](std::uint64_t v) { state.flags.seed = v; },
      "Base seed (default 42)");
  cmd->add_option_function<std::string>(
      "--threads", [&state](const std::string& v) { state.flags.threads = v; },
      "Worker threads: positive integer or auto (default auto)");
  cmd->add_option("--out", state.out_path, "Output file (default stdout)");
}

int run_csv_command(Subcommand sub, const CommandState& state,
                    void (*fn)(const ExperimentConfig&, std::ostream&)) {
  const ExperimentConfig cfg = ellcov::bench::build_config(sub, state.flags);
  std::ostringstream buffer;
  fn(cfg, buffer);
  if (state.out_path.empty()) {
    std::cout << buffer.str();
    return 0;
  }
  std::ofstream file(state.out_path, std::ios::binary);
  if (!file) {
    throw ConfigError("cannot open output file: " + state.out_path);
  }
  file << buffer.str();
  file.flush();
  if (!file) {
    throw ConfigError("failed writing output file: " + state.out_path);
  }
  return 0;
}

int parse_threads_arg(const std::string& text) {
  if (text == "auto") return 0;
  try {
    std::size_t used = 0;
    const int n = std::stoi(text, &used);
    if (used == text.size() && n >= 1) return n;
  } catch (const std::exception&) {
  }
  throw ConfigError("--threads: expected a positive integer or 'auto'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ellcov-bench: Monte-Carlo PRIAL experiments for orthogonally invariant "
      "scale-matrix estimators under the data-based loss"};
  app.require_subcommand(1);

  CommandState sweep_b_state;
  CLI::App* sweep_b = app.add_subcommand(
      "sweep-b", "PRIAL of the Haff estimator over a grid of shrink weights b");
  add_experiment_flags(sweep_b, sweep_b_state);

  CommandState sweep_alpha_state;
  CLI::App* sweep_alpha = app.add_subcommand(
      "sweep-alpha", "PRIAL of the Haff estimator over a grid of exponents alpha");
  add_experiment_flags(sweep_alpha, sweep_alpha_state);

  CommandState compare_state;
  CLI::App* compare_loss = app.add_subcommand(
      "compare-loss",
      "Data-based PRIAL at b0 and quadratic-loss PRIAL at b1 per alpha");
  add_experiment_flags(compare_loss, compare_state);

  ellcov::bench::VerifyConfig verify_cfg;
  std::string verify_threads = "auto";
  std::string verify_out;
  CLI::App* verify = app.add_subcommand(
      "verify", "Run the identity, optimality and matrix-primitive check suite");
  verify->add_option("--seed", verify_cfg.seed, "Base seed (default 42)");
  verify->add_option("--threads", verify_threads,
                     "Worker threads: positive integer or auto (default auto)");
  verify->add_option("--reps", verify_cfg.stein_haff_reps,
                     "Replications for the Stein-Haff checks (default 20000)");
  verify->add_option("--scan-reps", verify_cfg.scan_reps,
                     "Replications for the optimality scans (default 5000)");
  verify->add_option("--gpsi-triples", verify_cfg.gpsi_triples,
                     "Random triples per improvement-certificate case (default 1000)");
  verify->add_option("--matrix-instances", verify_cfg.matrix_instances,
                     "Random instances for the matrix-primitive suite (default 500)");
  verify->add_flag("--inject-broken", verify_cfg.inject_broken_a,
                   "Self-test: feed a doubled scale constant to the optimality "
                   "scan; verify must then fail");
  verify->add_option("--out", verify_out, "Report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sweep_b->parsed()) {
      return run_csv_command(Subcommand::SweepB, sweep_b_state,
                             ellcov::bench::cmd_sweep_b);
    }
    if (sweep_alpha->parsed()) {
      return run_csv_command(Subcommand::SweepAlpha, sweep_alpha_state,
                             ellcov::bench::cmd_sweep_alpha);
    }
    if (compare_loss->parsed()) {
      return run_csv_command(Subcommand::CompareLoss, compare_state,
                             ellcov::bench::cmd_compare_loss);
    }
    if (verify->parsed()) {
      verify_cfg.threads = parse_threads_arg(verify_threads);
      if (verify_cfg.stein_haff_reps < 2 || verify_cfg.scan_reps < 2 ||
          verify_cfg.gpsi_triples < 1 || verify_cfg.matrix_instances < 1) {
        throw ConfigError("verify: counts must be positive (reps >= 2)");
      }
      if (verify_out.empty()) {
        return ellcov::bench::cmd_verify(verify_cfg, std::cout);
      }
      std::ofstream file(verify_out, std::ios::binary);
      if (!file) throw ConfigError("cannot open output file: " + verify_out);
      return ellcov::bench::cmd_verify(verify_cfg, file);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
