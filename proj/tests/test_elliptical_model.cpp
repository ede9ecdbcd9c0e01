#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "ellcov/elliptical_model.hpp"
#include "ellcov/matrix_core.hpp"
#include "ellcov/rng.hpp"

using namespace ellcov;

namespace {

void mean_se(const std::vector<double>& xs, double& mean, double& se) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  mean = sum / xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  se = std::sqrt(ss / (xs.size() - 1)) / std::sqrt(static_cast<double>(xs.size()));
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double saa = 0.0;
  double sbb = 0.0;
  double sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
    sab += (a[i] - ma) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Two-sample Kolmogorov-Smirnov p-value (asymptotic).
double ks_p_value(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  double d = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n1 && j < n2) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
  }
  const double lambda =
      d * std::sqrt(static_cast<double>(n1) * n2 / static_cast<double>(n1 + n2));
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    p += 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

TEST_CASE("k_star values") {
  CHECK(ModelSpec::gaussian().k_star() == 1.0);
  CHECK(ModelSpec::student_t(5.0).k_star() == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(std::abs(ModelSpec::student_t(1e6).k_star() - 1.0) < 3e-6);
  CHECK_THROWS_AS((void)ModelSpec::student_t(2.0), std::invalid_argument);
  CHECK_THROWS_AS((void)ModelSpec::student_t(-1.0), std::invalid_argument);
}

TEST_CASE("sample_mixing: Gaussian is exactly one, Student matches inverse-gamma moments") {
  Rng rng(1);
  CHECK(sample_mixing(ModelSpec::gaussian(), rng) == 1.0);

  const ModelSpec t5 = ModelSpec::student_t(5.0);
  const int n = 1000000;
  std::vector<double> v(n);
  std::vector<double> inv_v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = sample_mixing(t5, rng);
    inv_v[i] = 1.0 / v[i];
  }
  double mean = 0.0;
  double se = 0.0;
  mean_se(v, mean, se);
  CHECK(std::abs(mean - 5.0 / 3.0) < 4.0 * se);  // E[IG(2.5, 2.5)] = k/(k-2)
  mean_se(inv_v, mean, se);
  CHECK(std::abs(mean - 1.0) < 4.0 * se);  // E[Gamma(2.5, 2.5)] = 1
}

TEST_CASE("sample_noise: Gaussian covariance recovers identity") {
  Rng rng(2);
  const Eigen::MatrixXd id3 = Eigen::MatrixXd::Identity(3, 3);
  const Eigen::MatrixXd e = sample_noise(ModelSpec::gaussian(), 100000, id3, rng);
  const Eigen::MatrixXd cov = e.transpose() * e / e.rows();
  CHECK((cov - id3).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("sample_noise: Student scalar variance equals k/(k-2)") {
  Rng rng(3);
  const ModelSpec t5 = ModelSpec::student_t(5.0);
  const Eigen::MatrixXd id1 = Eigen::MatrixXd::Identity(1, 1);
  const int n = 100000;
  std::vector<double> sq(n);
  for (int i = 0; i < n; ++i) {
    const double x = sample_noise(t5, 1, id1, rng)(0, 0);
    sq[i] = x * x;
  }
  double mean = 0.0;
  double se = 0.0;
  mean_se(sq, mean, se);
  CHECK(std::abs(mean - 5.0 / 3.0) < 4.0 * se);
}

TEST_CASE("sample_noise: second moment is K* Sigma for the mixture") {
  const ModelSpec t5 = ModelSpec::student_t(5.0);
  const Eigen::MatrixXd sigma = sigma_build(SigmaSpec::ar1(3, 0.9));
  const Eigen::MatrixXd root = sym_sqrt(sigma);
  const int rows = 20;
  const int mats = 30000;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(3, 3);
  std::vector<double> diag0(mats);
  for (int t = 0; t < mats; ++t) {
    Rng rng = Rng::for_replication(99, t);
    const Eigen::MatrixXd e = sample_noise(t5, rows, root, rng);
    const Eigen::MatrixXd g = e.transpose() * e / rows;
    acc += g;
    diag0[t] = g(0, 0);
  }
  acc /= mats;
  const Eigen::MatrixXd want = t5.k_star() * sigma;
  double mean = 0.0;
  double se = 0.0;
  mean_se(diag0, mean, se);
  // Entrywise agreement at ~5 standard errors of the noisiest entry class.
  CHECK((acc - want).cwiseAbs().maxCoeff() < 5.0 * se);
}

TEST_CASE("one mixing draw per matrix couples the rows") {
  const ModelSpec t5 = ModelSpec::student_t(5.0);
  const Eigen::MatrixXd id10 = Eigen::MatrixXd::Identity(10, 10);
  const int mats = 10000;
  std::vector<double> norm_a(mats);
  std::vector<double> norm_b(mats);
  for (int t = 0; t < mats; ++t) {
    Rng rng = Rng::for_replication(7, t);
    const Eigen::MatrixXd e = sample_noise(t5, 10, id10, rng);
    norm_a[t] = e.row(0).squaredNorm();
    norm_b[t] = e.row(1).squaredNorm();
  }
  CHECK(pearson(norm_a, norm_b) > 0.1);
}

TEST_CASE("canonical_reduce: coordinate-deletion design") {
  Rng rng(5);
  const int n = 9;
  const int q = 3;
  const int p = 4;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, q);
  x.topRows(q) = Eigen::MatrixXd::Identity(q, q);
  Eigen::MatrixXd y(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) y(i, j) = rng.normal();
  }
  const CanonicalSample cs = canonical_reduce(y, x);
  CHECK(cs.m == n - q);
  CHECK(cs.q == q);
  const Eigen::MatrixXd s_tail = gram(y.bottomRows(n - q));
  CHECK((cs.S - s_tail).norm() / s_tail.norm() < 1e-10);
}

TEST_CASE("canonical_reduce matches the projector formula") {
  Rng rng(6);
  const int n = 20;
  const int q = 3;
  const int p = 4;
  Eigen::MatrixXd x(n, q);
  Eigen::MatrixXd y(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < q; ++j) x(i, j) = rng.normal();
    for (int j = 0; j < p; ++j) y(i, j) = rng.normal();
  }
  const CanonicalSample cs = canonical_reduce(y, x);
  const Eigen::MatrixXd proj =
      x * (x.transpose() * x).inverse() * x.transpose();
  const Eigen::MatrixXd want =
      y.transpose() * (Eigen::MatrixXd::Identity(n, n) - proj) * y;
  CHECK((cs.S - want).norm() / want.norm() < 1e-8);
  CHECK(cs.Z.has_value());
  CHECK(cs.Z->rows() == q);
  CHECK(cs.U.rows() == n - q);
}

TEST_CASE("canonical_reduce: exact fit leaves zero residual matrix") {
  Rng rng(7);
  const int n = 12;
  const int q = 2;
  const int p = 3;
  Eigen::MatrixXd x(n, q);
  Eigen::MatrixXd beta(q, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < q; ++j) x(i, j) = rng.normal();
  }
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < p; ++j) beta(i, j) = rng.normal();
  }
  const CanonicalSample cs = canonical_reduce(x * beta, x);
  CHECK(cs.S.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("canonical_reduce rejects rank-deficient X") {
  Eigen::MatrixXd x(6, 2);
  x.col(0).setOnes();
  x.col(1) = 2.0 * x.col(0);
  Eigen::MatrixXd y = Eigen::MatrixXd::Random(6, 3);
  CHECK_THROWS_AS((void)canonical_reduce(y, x), std::invalid_argument);
}

TEST_CASE("sample_canonical shapes and rank in both regimes") {
  Rng rng(8);
  const Eigen::MatrixXd id2 = Eigen::MatrixXd::Identity(2, 2);
  const CanonicalSample small = sample_canonical(ModelSpec::gaussian(), 5, id2, rng);
  CHECK(small.p == 2);
  CHECK(small.m == 5);
  CHECK(eigen_sym_truncated(small.S).r == 2);

  const Eigen::MatrixXd id25 = Eigen::MatrixXd::Identity(25, 25);
  const CanonicalSample singular = sample_canonical(ModelSpec::gaussian(), 10, id25, rng);
  CHECK(singular.S.rows() == 25);
  CHECK(eigen_sym_truncated(singular.S).r == 10);
  CHECK_FALSE(singular.Z.has_value());
}

TEST_CASE("sample_canonical mean recovers Sigma") {
  Rng rng(9);
  const Eigen::MatrixXd id3 = Eigen::MatrixXd::Identity(3, 3);
  const CanonicalSample cs = sample_canonical(ModelSpec::gaussian(), 10000, id3, rng);
  CHECK(((cs.S / cs.m) - id3).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("identical seeds produce bit-identical samples") {
  const Eigen::MatrixXd root = sym_sqrt(sigma_build(SigmaSpec::ar1(4, 0.9)));
  const ModelSpec t5 = ModelSpec::student_t(5.0);
  Rng a = Rng::for_replication(1234, 17);
  Rng b = Rng::for_replication(1234, 17);
  const CanonicalSample sa = sample_canonical(t5, 6, root, a);
  const CanonicalSample sb = sample_canonical(t5, 6, root, b);
  CHECK((sa.U - sb.U).cwiseAbs().maxCoeff() == 0.0);
  CHECK((sa.S - sb.S).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("regression path and direct path agree in distribution (smoke)") {
  const int p = 4;
  const int q = 3;
  const int m = 8;
  const int n = m + q;
  const int draws = 2000;
  const Eigen::MatrixXd root = Eigen::MatrixXd::Identity(p, p);
  const ModelSpec model = ModelSpec::gaussian();

  // Fixed orthonormal design from a seeded draw; beta = 0.
  Rng xr(1000);
  Eigen::MatrixXd xraw(n, q);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < q; ++j) xraw(i, j) = xr.normal();
  }
  const Eigen::MatrixXd x =
      Eigen::HouseholderQR<Eigen::MatrixXd>(xraw).householderQ() *
      Eigen::MatrixXd::Identity(n, q);

  std::vector<double> tr_regression(draws);
  std::vector<double> tr_direct(draws);
  for (int t = 0; t < draws; ++t) {
    Rng r1 = Rng::for_replication(21, t);
    const Eigen::MatrixXd noise = sample_noise(model, n, root, r1);
    tr_regression[t] = canonical_reduce(noise, x).S.trace();
    Rng r2 = Rng::for_replication(1000003, t);
    tr_direct[t] = sample_canonical(model, m, root, r2).S.trace();
  }
  const double p_value = ks_p_value(tr_regression, tr_direct);
  WARN_MESSAGE(p_value > 0.01,
               "KS smoke test on tr(S): p=", p_value,
               " (distribution drift between regression and direct paths)");
}
