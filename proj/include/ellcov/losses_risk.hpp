#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "ellcov/elliptical_model.hpp"
#include "ellcov/estimators.hpp"
#include "ellcov/matrix_core.hpp"

namespace ellcov {

/// DataBased: tr(S+ Sigma (Sigma^-1 SigmaHat - I)^2), the quadratic-type loss
/// weighted by the Moore-Penrose inverse of the sample matrix.
/// Quadratic:  tr((Sigma^-1 SigmaHat - I)^2).
enum class LossKind { DataBased, Quadratic };

/// Loss of sigma_hat against the true sigma. sigma_inv is precomputed once
/// per experiment; s_pinv is required for the data-based kind. Both kinds are
/// evaluated through the symmetric difference form
///   tr((SigmaHat - Sigma) Sigma^-1 (SigmaHat - Sigma) W),
/// W = S+ or Sigma^-1, which is algebraically identical (cyclic trace) and
/// nonnegative under round-off.
double loss(LossKind kind, const Eigen::MatrixXd& sigma_hat,
            const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& sigma_inv,
            const Eigen::MatrixXd* s_pinv = nullptr);

struct McRiskResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::vector<double> losses;
  int skipped = 0;
};

/// Paired loss table: every estimator is evaluated on the identical sample at
/// each replication index (common random numbers). Replications run on
/// `threads` threads (0 = hardware concurrency); results are reduced in
/// replication order, so output is independent of the thread count.
/// Degenerate rank-0 draws are counted and skipped; more than 1% aborts.
struct PanelResult {
  std::vector<std::vector<double>> losses;  // [estimator][kept replication]
  int skipped = 0;
};

PanelResult mc_loss_panel(const ModelSpec& model, const SigmaSpec& sigma_spec,
                          int p, int m, const std::vector<EstimatorSpec>& estimators,
                          LossKind kind, int reps, std::uint64_t base_seed,
                          int threads = 1);

/// Monte-Carlo risk of one estimator.
McRiskResult mc_risk(const ModelSpec& model, const SigmaSpec& sigma_spec,
                     int p, int m, const EstimatorSpec& estimator, LossKind kind,
                     int reps, std::uint64_t base_seed, int threads = 1);

/// Percentage reduction in average loss of `alt` relative to `baseline`,
/// with a delta-method standard error from the paired per-replication losses.
struct PrialReport {
  std::vector<double> baseline_losses;
  std::vector<double> alt_losses;
  double baseline_mean = 0.0;
  double alt_mean = 0.0;
  double prial_percent = 0.0;
  double std_error_prial = 0.0;
  int replications = 0;
  std::uint64_t seed = 0;
};

PrialReport prial(const std::vector<double>& baseline, const std::vector<double>& alt,
                  std::uint64_t seed = 0);

/// Paired risk scan over a grid of scale constants a (the same draws are
/// reused across the grid). argmin indexes the smallest mean risk.
struct OptimalityScan {
  std::vector<double> a_values;
  std::vector<double> mean_risk;
  std::vector<double> std_error;
  int argmin = -1;
  int skipped = 0;
};

OptimalityScan risk_optimality_scan(const ModelSpec& model, const SigmaSpec& sigma_spec,
                                    int p, int m, const std::vector<double>& a_grid,
                                    LossKind kind, int reps, std::uint64_t seed,
                                    int threads = 1);

/// Mean and standard error of a loss vector.
void mean_and_se(const std::vector<double>& values, double& mean, double& se);

/// Runs body(i) for i in [0, reps) on the requested number of threads
/// (0 = hardware concurrency). Exceptions from workers are rethrown.
void parallel_for_reps(int reps, int threads, const std::function<void(int)>& body);

}  // namespace ellcov
