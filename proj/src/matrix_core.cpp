#include "ellcov/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace ellcov {

namespace {

double max_abs(const Eigen::MatrixXd& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

void require_symmetric(const Eigen::MatrixXd& a, double tol, const char* who) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument(std::string(who) + ": matrix must be square");
  }
  const double scale = std::max(1.0, max_abs(a));
  const double asym = max_abs(a - a.transpose());
  if (asym > tol * scale) {
    throw std::invalid_argument(std::string(who) + ": matrix is not symmetric");
  }
}

// First component of each column whose magnitude clears the noise floor is
// made positive, so decompositions are deterministic up to reproducible data.
void normalize_column_signs(Eigen::MatrixXd& h) {
  for (Eigen::Index j = 0; j < h.cols(); ++j) {
    const double floor = 1e-10 * h.col(j).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      if (std::abs(h(i, j)) > floor) {
        if (h(i, j) < 0.0) h.col(j) = -h.col(j);
        break;
      }
    }
  }
}

}  // namespace

Eigen::MatrixXd sigma_build(const SigmaSpec& spec) {
  if (spec.p < 1) {
    throw std::invalid_argument("sigma_build: dimension p must be >= 1");
  }
  if (spec.kind == SigmaKind::Identity) {
    return Eigen::MatrixXd::Identity(spec.p, spec.p);
  }
  if (!(std::abs(spec.rho) < 1.0)) {
    throw std::invalid_argument("sigma_build: AR1 requires |rho| < 1");
  }
  Eigen::MatrixXd sigma(spec.p, spec.p);
  for (int i = 0; i < spec.p; ++i) {
    for (int j = 0; j < spec.p; ++j) {
      sigma(i, j) = std::pow(spec.rho, std::abs(i - j));
    }
  }
  return sigma;
}

Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& a) {
  require_symmetric(a, 1e-12, "sym_sqrt");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      (a + a.transpose()) / 2.0);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("sym_sqrt: eigendecomposition failed");
  }
  Eigen::VectorXd evals = solver.eigenvalues();
  const double lam_max = evals.size() ? evals.maxCoeff() : 0.0;
  const double neg_tol = 1e-8 * std::max(1.0, lam_max);
  if (evals.minCoeff() < -neg_tol) {
    throw std::invalid_argument("sym_sqrt: matrix is not positive semi-definite");
  }
  evals = evals.cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * evals.asDiagonal() *
         solver.eigenvectors().transpose();
}

EigenSystem eigen_sym_truncated(const Eigen::MatrixXd& s, double rank_tol) {
  require_symmetric(s, 1e-10, "eigen_sym_truncated");
  const int p = static_cast<int>(s.rows());
  if (rank_tol <= 0.0) {
    rank_tol = p * std::numeric_limits<double>::epsilon();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      (s + s.transpose()) / 2.0);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigen_sym_truncated: eigendecomposition failed");
  }
  // Eigen returns ascending order; flip to descending. Equal eigenvalues keep
  // their relative (stable) positions.
  const Eigen::VectorXd evals_asc = solver.eigenvalues();
  const double lam_max = evals_asc.size() ? evals_asc.maxCoeff() : 0.0;
  if (!(lam_max > 0.0)) {
    throw RankZeroError("eigen_sym_truncated: no positive eigenvalue (rank 0)");
  }
  const double cutoff = rank_tol * lam_max;

  std::vector<int> keep;
  for (int i = p - 1; i >= 0; --i) {
    if (evals_asc(i) > cutoff) keep.push_back(i);
  }
  if (keep.empty()) {
    throw RankZeroError("eigen_sym_truncated: rank 0 after truncation");
  }

  EigenSystem es;
  es.p = p;
  es.r = static_cast<int>(keep.size());
  es.L.resize(es.r);
  es.H.resize(p, es.r);
  for (int k = 0; k < es.r; ++k) {
    es.L(k) = evals_asc(keep[k]);
    es.H.col(k) = solver.eigenvectors().col(keep[k]);
  }
  normalize_column_signs(es.H);
  return es;
}

Eigen::MatrixXd pinv_from_eigen(const EigenSystem& es) {
  return es.H * es.L.cwiseInverse().asDiagonal() * es.H.transpose();
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& u) {
  const Eigen::MatrixXd s = u.transpose() * u;
  return (s + s.transpose()) / 2.0;
}

}  // namespace ellcov
