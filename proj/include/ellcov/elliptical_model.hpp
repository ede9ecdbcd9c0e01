#pragma once

#include <optional>

#include <Eigen/Dense>

#include "ellcov/matrix_core.hpp"
#include "ellcov/rng.hpp"

namespace ellcov {

enum class ModelKind { Gaussian, StudentT };

/// Sampling distribution of the noise matrix: Gaussian, or Student-t realized
/// as an inverse-gamma variance mixture of normals. The t case requires
/// df > 2 so that the mixing mean K* = df/(df-2) is finite.
class ModelSpec {
 public:
  static ModelSpec gaussian() { return ModelSpec(ModelKind::Gaussian, 0.0); }
  static ModelSpec student_t(double df);

  ModelKind kind() const { return kind_; }
  double df() const { return df_; }

  /// Normalizing constant of the companion density: 1 for Gaussian,
  /// df/(df-2) for Student-t.
  double k_star() const;

 private:
  ModelSpec(ModelKind kind, double df) : kind_(kind), df_(df) {}

  ModelKind kind_;
  double df_;
};

/// One draw in the canonical coordinates of the regression model: the
/// residual block U (m-by-p), its Gram matrix S = U^T U, and optionally the
/// mean block Z with its parameter theta when the draw came through an
/// explicit design matrix.
struct CanonicalSample {
  Eigen::MatrixXd U;
  Eigen::MatrixXd S;
  std::optional<Eigen::MatrixXd> Z;
  std::optional<Eigen::MatrixXd> theta;
  int p = 0;
  int m = 0;
  int q = 0;
};

/// One variance-mixing draw: exactly 1 for Gaussian, 1/Gamma(df/2, df/2) for
/// Student-t (an inverse-gamma variate with mean df/(df-2)).
double sample_mixing(const ModelSpec& model, Rng& rng);

/// rows-by-p elliptical noise: a single mixing value v for the whole matrix,
/// iid standard normals G, result sqrt(v) * G * sqrt_sigma. The shared v is
/// what couples the rows; per-row mixing would be a different model.
Eigen::MatrixXd sample_noise(const ModelSpec& model, int rows,
                             const Eigen::MatrixXd& sqrt_sigma, Rng& rng);

/// Canonical reduction of Y = X beta + noise. Computes the full orthogonal Q
/// completing the QR factorization of X and splits Q^T Y into the mean block
/// Z (q-by-p) and residual block U (m-by-p, m = n - q), with S = U^T U equal
/// to Y^T (I - P_X) Y. Rejects rank-deficient X.
CanonicalSample canonical_reduce(const Eigen::MatrixXd& y, const Eigen::MatrixXd& x);

/// Direct draw of the residual block: U = sample_noise(model, m, sqrt_sigma),
/// S = gram(U). This is the fast path used by the benchmark experiments; the
/// regression path above exists to exercise the reduction itself.
CanonicalSample sample_canonical(const ModelSpec& model, int m,
                                 const Eigen::MatrixXd& sqrt_sigma, Rng& rng);

}  // namespace ellcov
