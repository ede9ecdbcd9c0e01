#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace ellcov {

/// Thrown when a sample matrix has no eigenvalue above the rank cutoff.
/// Callers treat it as a resample/skip signal.
class RankZeroError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SigmaKind { Identity, AR1 };

/// Population scale-matrix structure: the identity, or an AR(1) matrix whose
/// (i, j) entry is rho^|i-j|.
struct SigmaSpec {
  SigmaKind kind = SigmaKind::Identity;
  int p = 1;
  double rho = 0.0;

  static SigmaSpec identity(int p) { return SigmaSpec{SigmaKind::Identity, p, 0.0}; }
  static SigmaSpec ar1(int p, double rho) { return SigmaSpec{SigmaKind::AR1, p, rho}; }
};

/// Truncated spectral decomposition S = H diag(L) H^T where H is p-by-r
/// semi-orthogonal and L holds the r retained eigenvalues, strictly positive
/// and sorted in decreasing order.
struct EigenSystem {
  Eigen::MatrixXd H;
  Eigen::VectorXd L;
  int r = 0;
  int p = 0;
};

/// Builds the matrix described by `spec`. Rejects p < 1 and |rho| >= 1.
Eigen::MatrixXd sigma_build(const SigmaSpec& spec);

/// Symmetric square root of a symmetric PSD matrix via its spectral
/// decomposition. Eigenvalues slightly below zero (round-off) are clipped;
/// anything below -1e-8 (relative to the largest eigenvalue) is rejected.
Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& a);

/// Spectral decomposition keeping eigenvalues above rank_tol times the
/// largest one. rank_tol <= 0 selects the default cutoff p * machine-epsilon.
/// Eigenvector signs are normalized (first significant component positive) so
/// repeated decompositions of the same input are identical.
/// Throws RankZeroError when nothing survives the cutoff.
EigenSystem eigen_sym_truncated(const Eigen::MatrixXd& s, double rank_tol = 0.0);

/// Moore-Penrose inverse H diag(1/L) H^T. Coincides with the regular inverse
/// when r = p.
Eigen::MatrixXd pinv_from_eigen(const EigenSystem& es);

/// U^T U, symmetrized entry-by-entry so the result is bit-symmetric.
Eigen::MatrixXd gram(const Eigen::MatrixXd& u);

}  // namespace ellcov
