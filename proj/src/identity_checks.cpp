#include "ellcov/identity_checks.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ellcov/elliptical_model.hpp"

namespace ellcov {

namespace {

constexpr double kTieTolFactor = 1e-9;

void require_separated(const Eigen::VectorXd& L) {
  if (!spectrum_well_separated(L)) {
    throw NearTieError("spectrum has near-tied eigenvalues; resample");
  }
}

}  // namespace

bool spectrum_well_separated(const Eigen::VectorXd& L) {
  if (L.size() < 2) return true;
  const double tol = kTieTolFactor * L(0);
  for (Eigen::Index i = 0; i + 1 < L.size(); ++i) {
    if (L(i) - L(i + 1) <= tol) return false;
  }
  return true;
}

double corollary_rhs_integrand(const Eigen::VectorXd& L, const ShrinkagePsi& phi,
                               int v, int r) {
  require_separated(L);
  const Eigen::VectorXd ph = psi_eval(phi, L, v, r);
  double total = 0.0;
  for (int i = 0; i < r; ++i) {
    double term = (v - r + 1) * ph(i) + 2.0 * L(i) * psi_derivative(phi, L, v, r, i);
    for (int j = 0; j < r; ++j) {
      if (j == i) continue;
      term += (L(i) * ph(i) - L(j) * ph(j)) / (L(i) - L(j));
    }
    total += term;
  }
  return total;
}

IdentityCheckResult stein_haff_check(const SigmaSpec& sigma_spec, int p, int m,
                                     const ShrinkagePsi& phi, int reps,
                                     std::uint64_t seed, int threads) {
  if (reps < 2) {
    throw std::invalid_argument("stein_haff_check: reps must be >= 2");
  }
  if (sigma_spec.p != p) {
    throw std::invalid_argument("stein_haff_check: sigma_spec.p and p disagree");
  }
  const ModelSpec model = ModelSpec::gaussian();
  const Eigen::MatrixXd sigma = sigma_build(sigma_spec);
  const Eigen::MatrixXd sqrt_sigma = sym_sqrt(sigma);
  const Eigen::MatrixXd sigma_inv = pinv_from_eigen(eigen_sym_truncated(sigma));
  const int v = std::max(p, m);
  const int r_expected = std::min(p, m);

  std::vector<double> lhs_all(reps, 0.0);
  std::vector<double> rhs_all(reps, 0.0);
  std::vector<char> kept(reps, 0);

  parallel_for_reps(reps, threads, [&](int rep) {
    Rng rng = Rng::for_replication(seed, static_cast<std::uint64_t>(rep));
    const CanonicalSample sample = sample_canonical(model, m, sqrt_sigma, rng);
    EigenSystem es;
    try {
      es = eigen_sym_truncated(sample.S);
    } catch (const RankZeroError&) {
      return;
    }
    if (es.r != r_expected || !spectrum_well_separated(es.L)) {
      return;
    }
    const Eigen::VectorXd ph = psi_eval(phi, es.L, v, es.r);
    // tr(Sigma^-1 H L Phi H^T) = sum_i l_i phi_i h_i' Sigma^-1 h_i
    const Eigen::MatrixXd w = sigma_inv * es.H;
    double lhs = 0.0;
    for (int i = 0; i < es.r; ++i) {
      lhs += es.L(i) * ph(i) * es.H.col(i).dot(w.col(i));
    }
    lhs_all[rep] = lhs;
    rhs_all[rep] = corollary_rhs_integrand(es.L, phi, v, es.r);
    kept[rep] = 1;
  });

  std::vector<double> lhs;
  std::vector<double> rhs;
  lhs.reserve(reps);
  rhs.reserve(reps);
  IdentityCheckResult result;
  for (int rep = 0; rep < reps; ++rep) {
    if (!kept[rep]) {
      ++result.rejected;
      continue;
    }
    lhs.push_back(lhs_all[rep]);
    rhs.push_back(rhs_all[rep]);
  }
  if (result.rejected * 100 >= reps) {
    throw std::runtime_error("stein_haff_check: more than 1% of draws rejected");
  }
  result.reps = static_cast<int>(lhs.size());
  mean_and_se(lhs, result.lhs_mean, result.lhs_se);
  mean_and_se(rhs, result.rhs_mean, result.rhs_se);
  const double denom = std::sqrt(result.lhs_se * result.lhs_se +
                                 result.rhs_se * result.rhs_se);
  result.z_score = denom > 0.0 ? (result.lhs_mean - result.rhs_mean) / denom : 0.0;
  return result;
}

double g_psi(const Eigen::VectorXd& L, const ShrinkagePsi& psi, int v, int r,
             double lambda, bool symmetrized_cross) {
  require_separated(L);
  const Eigen::VectorXd ps = psi_eval(psi, L, v, r);
  double total = 0.0;
  for (int i = 0; i < r; ++i) {
    const double dpsi = psi_derivative(psi, L, v, r, i);
    double term = 2.0 * (v - r + 1) * ps(i) + (v - r + 1) * ps(i) * ps(i) +
                  4.0 * L(i) * (1.0 + ps(i)) * dpsi - 2.0 * v * lambda;
    const double own = L(i) * (2.0 * ps(i) + ps(i) * ps(i));
    for (int j = 0; j < r; ++j) {
      if (j == i) continue;
      const double sq = symmetrized_cross ? ps(j) * ps(j) : ps(i) * ps(i);
      term += (own - L(j) * (2.0 * ps(j) + sq)) / (L(i) - L(j));
    }
    total += term;
  }
  return total;
}

double haff_improvement_margin(int v, int r, double b) {
  if (!(b > 0.0)) {
    throw std::invalid_argument("haff_improvement_margin: b must be positive");
  }
  if (r < 1 || v < r) {
    throw std::invalid_argument("haff_improvement_margin: need 1 <= r <= v");
  }
  return b * ((v - r + 1) * b - 2.0 * (r - 1));
}

Eigen::VectorXd random_log_uniform_spectrum(int r, double lo, double hi, Rng& rng) {
  if (r < 1 || !(lo > 0.0) || !(hi > lo)) {
    throw std::invalid_argument("random_log_uniform_spectrum: bad arguments");
  }
  const double log_lo = std::log(lo);
  const double log_hi = std::log(hi);
  Eigen::VectorXd spectrum(r);
  for (;;) {
    for (int i = 0; i < r; ++i) {
      spectrum(i) = std::exp(log_lo + (log_hi - log_lo) * rng.uniform());
    }
    std::sort(spectrum.data(), spectrum.data() + r, std::greater<double>());
    if (spectrum_well_separated(spectrum)) return spectrum;
  }
}

}  // namespace ellcov
