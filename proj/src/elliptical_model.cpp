#include "ellcov/elliptical_model.hpp"

#include <cmath>
#include <stdexcept>

namespace ellcov {

ModelSpec ModelSpec::student_t(double df) {
  if (!(df > 2.0)) {
    throw std::invalid_argument("ModelSpec::student_t: requires df > 2");
  }
  return ModelSpec(ModelKind::StudentT, df);
}

double ModelSpec::k_star() const {
  if (kind_ == ModelKind::Gaussian) return 1.0;
  return df_ / (df_ - 2.0);
}

double sample_mixing(const ModelSpec& model, Rng& rng) {
  if (model.kind() == ModelKind::Gaussian) return 1.0;
  const double half_df = model.df() / 2.0;
  return 1.0 / rng.gamma(half_df, half_df);
}

Eigen::MatrixXd sample_noise(const ModelSpec& model, int rows,
                             const Eigen::MatrixXd& sqrt_sigma, Rng& rng) {
  if (rows < 1) {
    throw std::invalid_argument("sample_noise: rows must be >= 1");
  }
  if (sqrt_sigma.rows() != sqrt_sigma.cols()) {
    throw std::invalid_argument("sample_noise: sqrt_sigma must be square");
  }
  const int p = static_cast<int>(sqrt_sigma.cols());
  // Fixed draw order: mixing value first, then normals row by row.
  const double v = sample_mixing(model, rng);
  Eigen::MatrixXd g(rows, p);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < p; ++j) {
      g(i, j) = rng.normal();
    }
  }
  Eigen::MatrixXd noise = g * sqrt_sigma;
  if (v != 1.0) noise *= std::sqrt(v);
  return noise;
}

CanonicalSample canonical_reduce(const Eigen::MatrixXd& y, const Eigen::MatrixXd& x) {
  const int n = static_cast<int>(y.rows());
  const int p = static_cast<int>(y.cols());
  const int q = static_cast<int>(x.cols());
  if (x.rows() != n) {
    throw std::invalid_argument("canonical_reduce: Y and X row counts differ");
  }
  if (q < 1 || q >= n) {
    throw std::invalid_argument("canonical_reduce: need 1 <= q < n");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < q) {
    throw std::invalid_argument("canonical_reduce: X is rank deficient");
  }
  // Full orthogonal Q; its first q columns span col(X), the rest complete it.
  const Eigen::MatrixXd full_q =
      qr.householderQ() * Eigen::MatrixXd::Identity(n, n);

  CanonicalSample sample;
  sample.p = p;
  sample.q = q;
  sample.m = n - q;
  sample.Z = full_q.leftCols(q).transpose() * y;
  sample.U = full_q.rightCols(n - q).transpose() * y;
  sample.S = gram(sample.U);
  return sample;
}

CanonicalSample sample_canonical(const ModelSpec& model, int m,
                                 const Eigen::MatrixXd& sqrt_sigma, Rng& rng) {
  CanonicalSample sample;
  sample.p = static_cast<int>(sqrt_sigma.cols());
  sample.m = m;
  sample.q = 0;
  sample.U = sample_noise(model, m, sqrt_sigma, rng);
  sample.S = gram(sample.U);
  return sample;
}

}  // namespace ellcov
