#include "ellcov/losses_risk.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace ellcov {

double loss(LossKind kind, const Eigen::MatrixXd& sigma_hat,
            const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& sigma_inv,
            const Eigen::MatrixXd* s_pinv) {
  const Eigen::Index p = sigma.rows();
  if (sigma_hat.rows() != p || sigma_hat.cols() != p || sigma.cols() != p ||
      sigma_inv.rows() != p || sigma_inv.cols() != p) {
    throw std::invalid_argument("loss: dimension mismatch");
  }
  const Eigen::MatrixXd diff = sigma_hat - sigma;
  const Eigen::MatrixXd core = diff * sigma_inv * diff;
  if (kind == LossKind::Quadratic) {
    return (core * sigma_inv).trace();
  }
  if (s_pinv == nullptr) {
    throw std::invalid_argument("loss: data-based loss needs the pseudo-inverse of S");
  }
  if (s_pinv->rows() != p || s_pinv->cols() != p) {
    throw std::invalid_argument("loss: s_pinv dimension mismatch");
  }
  return (core * (*s_pinv)).trace();
}

void mean_and_se(const std::vector<double>& values, double& mean, double& se) {
  const std::size_t n = values.size();
  if (n == 0) {
    mean = 0.0;
    se = 0.0;
    return;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  mean = sum / static_cast<double>(n);
  if (n < 2) {
    se = 0.0;
    return;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  se = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
}

void parallel_for_reps(int reps, int threads, const std::function<void(int)>& body) {
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
  }
  threads = std::min(threads, reps);
  if (threads <= 1) {
    for (int i = 0; i < reps; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr error;
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= reps) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

PanelResult mc_loss_panel(const ModelSpec& model, const SigmaSpec& sigma_spec,
                          int p, int m, const std::vector<EstimatorSpec>& estimators,
                          LossKind kind, int reps, std::uint64_t base_seed,
                          int threads) {
  if (reps < 2) {
    throw std::invalid_argument("mc_loss_panel: reps must be >= 2");
  }
  if (sigma_spec.p != p) {
    throw std::invalid_argument("mc_loss_panel: sigma_spec.p and p disagree");
  }
  if (estimators.empty()) {
    throw std::invalid_argument("mc_loss_panel: no estimators");
  }
  const Eigen::MatrixXd sigma = sigma_build(sigma_spec);
  const Eigen::MatrixXd sqrt_sigma = sym_sqrt(sigma);
  const Eigen::MatrixXd sigma_inv = pinv_from_eigen(eigen_sym_truncated(sigma));
  const double a0 = kind == LossKind::DataBased ? optimal_a(model, p, m)
                                                : quadratic_loss_a(model, p, m);
  const std::size_t n_est = estimators.size();

  std::vector<std::vector<double>> table(n_est, std::vector<double>(reps, 0.0));
  std::vector<char> kept(reps, 0);

  parallel_for_reps(reps, threads, [&](int rep) {
    Rng rng = Rng::for_replication(base_seed, static_cast<std::uint64_t>(rep));
    const CanonicalSample sample = sample_canonical(model, m, sqrt_sigma, rng);
    EigenSystem es;
    try {
      es = eigen_sym_truncated(sample.S);
    } catch (const RankZeroError&) {
      return;  // kept[rep] stays 0
    }
    Eigen::MatrixXd s_pinv;
    const Eigen::MatrixXd* s_pinv_ptr = nullptr;
    if (kind == LossKind::DataBased) {
      s_pinv = pinv_from_eigen(es);
      s_pinv_ptr = &s_pinv;
    }
    for (std::size_t e = 0; e < n_est; ++e) {
      const Eigen::MatrixXd sigma_hat = estimate(estimators[e], sample, es, a0);
      table[e][rep] = loss(kind, sigma_hat, sigma, sigma_inv, s_pinv_ptr);
    }
    kept[rep] = 1;
  });

  PanelResult result;
  result.losses.assign(n_est, {});
  for (auto& v : result.losses) v.reserve(reps);
  for (int rep = 0; rep < reps; ++rep) {
    if (!kept[rep]) {
      ++result.skipped;
      continue;
    }
    for (std::size_t e = 0; e < n_est; ++e) {
      result.losses[e].push_back(table[e][rep]);
    }
  }
  if (result.skipped * 100 >= reps) {
    throw std::runtime_error("mc_loss_panel: more than 1% of replications degenerate");
  }
  return result;
}

McRiskResult mc_risk(const ModelSpec& model, const SigmaSpec& sigma_spec,
                     int p, int m, const EstimatorSpec& estimator, LossKind kind,
                     int reps, std::uint64_t base_seed, int threads) {
  PanelResult panel = mc_loss_panel(model, sigma_spec, p, m, {estimator}, kind,
                                    reps, base_seed, threads);
  McRiskResult result;
  result.losses = std::move(panel.losses[0]);
  result.skipped = panel.skipped;
  mean_and_se(result.losses, result.mean, result.std_error);
  return result;
}

PrialReport prial(const std::vector<double>& baseline, const std::vector<double>& alt,
                  std::uint64_t seed) {
  if (baseline.size() != alt.size()) {
    throw std::invalid_argument("prial: loss vectors must be paired (equal length)");
  }
  if (baseline.size() < 2) {
    throw std::invalid_argument("prial: need at least 2 replications");
  }
  PrialReport report;
  report.baseline_losses = baseline;
  report.alt_losses = alt;
  report.replications = static_cast<int>(baseline.size());
  report.seed = seed;

  double base_se = 0.0;
  double alt_se = 0.0;
  mean_and_se(baseline, report.baseline_mean, base_se);
  mean_and_se(alt, report.alt_mean, alt_se);
  if (!(report.baseline_mean > 0.0)) {
    throw std::invalid_argument("prial: baseline mean loss must be positive");
  }
  report.prial_percent =
      100.0 * (report.baseline_mean - report.alt_mean) / report.baseline_mean;

  // Delta method on the paired ratio alt_mean / baseline_mean:
  // Var(ratio) ~= Var(alt_i - ratio * base_i) / (n * base_mean^2).
  const double ratio = report.alt_mean / report.baseline_mean;
  const std::size_t n = baseline.size();
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double resid = (alt[i] - report.alt_mean) - ratio * (baseline[i] - report.baseline_mean);
    ss += resid * resid;
  }
  const double var_resid = ss / static_cast<double>(n - 1);
  report.std_error_prial =
      100.0 * std::sqrt(var_resid / static_cast<double>(n)) / report.baseline_mean;
  return report;
}

OptimalityScan risk_optimality_scan(const ModelSpec& model, const SigmaSpec& sigma_spec,
                                    int p, int m, const std::vector<double>& a_grid,
                                    LossKind kind, int reps, std::uint64_t seed,
                                    int threads) {
  if (a_grid.empty()) {
    throw std::invalid_argument("risk_optimality_scan: empty grid");
  }
  std::vector<EstimatorSpec> ests;
  ests.reserve(a_grid.size());
  for (double a : a_grid) ests.push_back(EstimatorSpec::usual(a));
  PanelResult panel = mc_loss_panel(model, sigma_spec, p, m, ests, kind, reps, seed, threads);

  OptimalityScan scan;
  scan.a_values = a_grid;
  scan.skipped = panel.skipped;
  scan.mean_risk.resize(a_grid.size());
  scan.std_error.resize(a_grid.size());
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    mean_and_se(panel.losses[i], scan.mean_risk[i], scan.std_error[i]);
  }
  scan.argmin = static_cast<int>(
      std::min_element(scan.mean_risk.begin(), scan.mean_risk.end()) - scan.mean_risk.begin());
  return scan;
}

}  // namespace ellcov
