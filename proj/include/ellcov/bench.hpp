#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ellcov/elliptical_model.hpp"
#include "ellcov/losses_risk.hpp"

namespace ellcov::bench {

inline constexpr const char* kVersion = "0.1.0";

/// Invalid command-line / experiment configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Subcommand { SweepB, SweepAlpha, CompareLoss };

/// How the shrink weight b is chosen: the certified data-based threshold b0,
/// the quadratic-loss threshold b1, or an explicit list (empty list selects
/// the subcommand's default grid).
enum class BSelect { List, B0, B1 };

struct ExperimentConfig {
  Subcommand sub = Subcommand::SweepB;
  int p = 25;
  int m = 10;
  ModelSpec model = ModelSpec::gaussian();
  SigmaSpec sigma = SigmaSpec::identity(25);
  LossKind loss = LossKind::DataBased;
  std::vector<double> alphas;  // resolved at build time, never empty
  BSelect b_select = BSelect::List;
  std::vector<double> b_list;  // explicit b values; empty means default grid
  int reps = 1000;
  std::uint64_t seed = 42;
  int threads = 0;  // 0 = hardware concurrency

  bool operator==(const ExperimentConfig& other) const;
};

/// Raw flag values as collected from the command line, pre-validation.
struct RawFlags {
  std::optional<int> p, m, reps;
  std::optional<double> df, rho;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> dist, sigma, alpha, b, threads;
};

/// Validates raw flags against a subcommand's defaults and produces the
/// resolved configuration. Throws ConfigError on anything invalid.
ExperimentConfig build_config(Subcommand sub, const RawFlags& raw);

/// Inverse of build_config: the flag set that reproduces `config` exactly.
RawFlags config_to_raw(const ExperimentConfig& config);

/// One-line "# ..." comment recording version, subcommand, config and seed.
/// Thread count is deliberately excluded: output must not depend on it.
std::string config_summary(const ExperimentConfig& config);

/// PRIAL of the Haff estimator over the b grid at fixed alpha, one CSV row
/// per b, paired against the optimally scaled baseline a0*S.
void cmd_sweep_b(const ExperimentConfig& config, std::ostream& out);

/// PRIAL over the alpha grid at fixed b (default b0), one CSV row per alpha.
void cmd_sweep_alpha(const ExperimentConfig& config, std::ostream& out);

/// For each alpha, the data-based PRIAL of Haff(alpha, b0) against S/v and
/// the quadratic-loss PRIAL of Haff(alpha, b1) against S/(v+r+1).
/// Gaussian sampling only.
void cmd_compare_loss(const ExperimentConfig& config, std::ostream& out);

struct VerifyConfig {
  std::uint64_t seed = 42;
  int threads = 0;
  int stein_haff_reps = 20000;
  int scan_reps = 5000;
  int gpsi_triples = 1000;
  int matrix_instances = 500;
  /// Self-test hook: doubles the scale constant fed to the optimality scan,
  /// which must make the scan fail and the command exit 1.
  bool inject_broken_a = false;
};

/// Runs the verification suite (Stein-Haff identity, improvement-bound sweep,
/// scale-optimality scan, matrix primitive residuals) and prints one
/// [PASS]/[FAIL] line per check. Returns 0 when everything passed, 1 otherwise.
int cmd_verify(const VerifyConfig& config, std::ostream& out);

}  // namespace ellcov::bench
