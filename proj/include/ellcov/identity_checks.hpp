#pragma once

#include <cstdint>
#include <stdexcept>

#include <Eigen/Dense>

#include "ellcov/estimators.hpp"
#include "ellcov/losses_risk.hpp"
#include "ellcov/matrix_core.hpp"
#include "ellcov/rng.hpp"

namespace ellcov {

/// Thrown when a spectrum has two eigenvalues closer than the tie tolerance;
/// the divided differences below are not evaluated there. Callers resample.
class NearTieError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Relative gap below which two eigenvalues count as tied: 1e-9 * l_1.
bool spectrum_well_separated(const Eigen::VectorXd& L);

/// The closed-form side of the orthogonally invariant Stein-Haff identity
/// for Phi(L) = diag(phi_1..phi_r):
///   sum_i [ (v-r+1) phi_i + 2 l_i dphi_i/dl_i
///           + sum_{j != i} (l_i phi_i - l_j phi_j) / (l_i - l_j) ].
/// With phi == 1 this collapses to r(v-r+1) + r(r-1) = r*v for any spectrum.
double corollary_rhs_integrand(const Eigen::VectorXd& L, const ShrinkagePsi& phi,
                               int v, int r);

struct IdentityCheckResult {
  double lhs_mean = 0.0;
  double lhs_se = 0.0;
  double rhs_mean = 0.0;
  double rhs_se = 0.0;
  double z_score = 0.0;
  int reps = 0;      // kept replications
  int rejected = 0;  // near-tie / degenerate draws skipped
};

/// Monte-Carlo check of the Stein-Haff identity under Gaussian sampling
/// (where the two expectations it relates coincide and K* = 1):
/// lhs averages tr(Sigma^-1 H L Phi(L) H^T) per draw, rhs averages the
/// closed-form integrand over the same draws.
IdentityCheckResult stein_haff_check(const SigmaSpec& sigma_spec, int p, int m,
                                     const ShrinkagePsi& phi, int reps,
                                     std::uint64_t seed, int threads = 1);

/// Per-spectrum upper-bound statistic certifying risk improvement of the
/// orthogonally invariant estimator built from `psi`:
///   sum_i { 2(v-r+1) psi_i + (v-r+1) psi_i^2 + 4 l_i (1 + psi_i) dpsi_i/dl_i
///           + sum_{j != i} [l_i (2 psi_i + psi_i^2) - l_j (2 psi_j + psi_i^2)]
///             / (l_i - l_j)
///           - 2 v lambda }.
/// The cross-term numerator carries psi_i^2 in both places; pass
/// symmetrized_cross = true to use psi_j^2 in the second (sensitivity
/// variant). lambda is the family's trace lower bound.
double g_psi(const Eigen::VectorXd& L, const ShrinkagePsi& psi, int v, int r,
             double lambda, bool symmetrized_cross = false);

/// Spectrum-free upper bound on g for the Haff family:
/// b * ((v - r + 1) * b - 2 (r - 1)). Non-positive exactly on (0, b0].
double haff_improvement_margin(int v, int r, double b);

/// Descending spectrum of length r with log-uniform eigenvalues over
/// [lo, hi], re-drawn until well separated. Generator for property sweeps.
Eigen::VectorXd random_log_uniform_spectrum(int r, double lo, double hi, Rng& rng);

}  // namespace ellcov
