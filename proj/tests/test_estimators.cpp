#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "ellcov/elliptical_model.hpp"
#include "ellcov/estimators.hpp"
#include "ellcov/identity_checks.hpp"
#include "ellcov/matrix_core.hpp"
#include "ellcov/rng.hpp"

using namespace ellcov;

namespace {

CanonicalSample sample_from(const Eigen::MatrixXd& u) {
  CanonicalSample cs;
  cs.U = u;
  cs.S = gram(u);
  cs.p = static_cast<int>(u.cols());
  cs.m = static_cast<int>(u.rows());
  return cs;
}

Eigen::MatrixXd random_gaussian(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

}  // namespace

TEST_CASE("optimal constants") {
  CHECK(optimal_a(ModelSpec::gaussian(), 25, 10) == doctest::Approx(0.04).epsilon(1e-15));
  CHECK(optimal_a(ModelSpec::student_t(5.0), 50, 20) ==
        doctest::Approx(0.012).epsilon(1e-12));
  CHECK(optimal_a(ModelSpec::gaussian(), 10, 10) == doctest::Approx(0.1).epsilon(1e-15));

  CHECK(quadratic_loss_a(ModelSpec::gaussian(), 20, 10) ==
        doctest::Approx(1.0 / 31.0).epsilon(1e-15));
  CHECK(quadratic_loss_a(ModelSpec::gaussian(), 1, 1) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(quadratic_loss_a(ModelSpec::student_t(5.0), 2, 2) ==
        doctest::Approx(0.12).epsilon(1e-12));
}

TEST_CASE("improvement thresholds b0 and b1") {
  CHECK(b0_bound(25, 10) == doctest::Approx(1.125).epsilon(1e-15));
  CHECK(b0_bound(5, 1) == 0.0);
  CHECK(b0_bound(50, 20) == doctest::Approx(38.0 / 31.0).epsilon(1e-15));

  CHECK(b1_bound(25, 10) == doctest::Approx(2.25).epsilon(1e-15));
  CHECK(b1_bound(5, 1) == 0.0);
  CHECK(b1_bound(20, 10) == doctest::Approx(558.0 / 143.0).epsilon(1e-15));

  // b1 strictly exceeds b0 across the grid.
  for (int v = 2; v <= 100; ++v) {
    for (int r = 2; r <= v; ++r) {
      CHECK(b1_bound(v, r) > b0_bound(v, r));
    }
  }
}

TEST_CASE("psi_eval family formulas") {
  Eigen::VectorXd flat(2);
  flat << 1.0, 1.0;
  const Eigen::VectorXd haff_flat = psi_eval(ShrinkagePsi::haff(1.0, 1.0), flat, 10, 2);
  CHECK(haff_flat(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(haff_flat(1) == doctest::Approx(0.5).epsilon(1e-14));

  Eigen::VectorXd spread(2);
  spread << 4.0, 1.0;
  // Inverse-power weights (0.2, 0.8) times b = 1.25.
  const Eigen::VectorXd haff_spread =
      psi_eval(ShrinkagePsi::haff(1.0, 1.25), spread, 10, 2);
  CHECK(haff_spread(0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(haff_spread(1) == doctest::Approx(1.0).epsilon(1e-14));

  Eigen::VectorXd ten(10);
  for (int i = 0; i < 10; ++i) ten(i) = 10.0 - i;
  const Eigen::VectorXd js = psi_eval(ShrinkagePsi::james_stein(), ten, 25, 10);
  CHECK(js(0) == doctest::Approx(1.0 / 34.0).epsilon(1e-14));
  CHECK(js(9) == doctest::Approx(1.0 / 16.0).epsilon(1e-14));

  CHECK(psi_eval(ShrinkagePsi::zero(), ten, 25, 10).cwiseAbs().maxCoeff() == 0.0);
  CHECK(psi_eval(ShrinkagePsi::identity(), ten, 25, 10).minCoeff() == 1.0);

  Eigen::VectorXd bad(2);
  bad << 1.0, 0.0;
  CHECK_THROWS_AS((void)psi_eval(ShrinkagePsi::haff(1.0, 1.0), bad, 10, 2),
                  std::invalid_argument);
}

TEST_CASE("psi_derivative analytic values and finite-difference oracle") {
  Eigen::VectorXd flat(2);
  flat << 1.0, 1.0;
  CHECK(psi_derivative(ShrinkagePsi::haff(1.0, 1.0), flat, 10, 2, 0) ==
        doctest::Approx(-0.25).epsilon(1e-14));

  Eigen::VectorXd any(4);
  any << 9.0, 4.0, 2.0, 0.5;
  CHECK(psi_derivative(ShrinkagePsi::james_stein(), any, 12, 4, 1) == 0.0);
  CHECK(psi_derivative(ShrinkagePsi::zero(), any, 12, 4, 0) == 0.0);

  Rng rng(55);
  for (int t = 0; t < 40; ++t) {
    const Eigen::VectorXd spectrum = random_log_uniform_spectrum(5, 1e-2, 1e2, rng);
    const double alpha = 0.5 + 4.0 * rng.uniform();
    const double b = 0.2 + 2.0 * rng.uniform();
    for (const ShrinkagePsi psi : {ShrinkagePsi::haff(alpha, b),
                                   ShrinkagePsi::efron_morris_dey(alpha, b)}) {
      for (int i = 0; i < 5; ++i) {
        const double analytic = psi_derivative(psi, spectrum, 12, 5, i);
        const double fd = psi_derivative_fd(psi, spectrum, 12, 5, i);
        const double scale = std::max(std::abs(fd), 1e-12);
        CHECK(std::abs(analytic - fd) / scale < 1e-5);
      }
    }
  }
}

TEST_CASE("haff trace identity and efron-morris-dey trace floor") {
  Rng rng(56);
  for (int t = 0; t < 500; ++t) {
    const int r = 2 + static_cast<int>(rng.next_u64() % 29);
    const Eigen::VectorXd spectrum = random_log_uniform_spectrum(r, 1e-3, 1e3, rng);
    const double alpha = 0.5 + 5.0 * rng.uniform();
    const double b = 0.05 + 3.0 * rng.uniform();
    const int v = r + static_cast<int>(rng.next_u64() % 40);

    const Eigen::VectorXd haff = psi_eval(ShrinkagePsi::haff(alpha, b), spectrum, v, r);
    CHECK(std::abs(haff.sum() - b) < 1e-10);

    const Eigen::VectorXd emd =
        psi_eval(ShrinkagePsi::efron_morris_dey(alpha, b), spectrum, v, r);
    CHECK(emd.sum() >= r / ((1.0 + b) * v) - 1e-12);
    CHECK(emd.minCoeff() >= 1.0 / ((1.0 + b) * v) - 1e-15);
  }
}

TEST_CASE("haff shrinks smaller eigenvalues harder for alpha >= 1") {
  Rng rng(57);
  for (int t = 0; t < 100; ++t) {
    const int r = 3 + static_cast<int>(rng.next_u64() % 10);
    const Eigen::VectorXd spectrum = random_log_uniform_spectrum(r, 1e-2, 1e2, rng);
    const double alpha = 1.0 + 6.0 * rng.uniform();
    const Eigen::VectorXd psi =
        psi_eval(ShrinkagePsi::haff(alpha, 1.0), spectrum, 2 * r, r);
    for (int i = 0; i + 1 < r; ++i) CHECK(psi(i) <= psi(i + 1) + 1e-15);
  }
}

TEST_CASE("estimate: zero family collapses to the baseline on full-rank S") {
  Rng rng(58);
  const CanonicalSample cs = sample_from(random_gaussian(12, 5, rng));
  const EigenSystem es = eigen_sym_truncated(cs.S);
  const double a0 = optimal_a(ModelSpec::gaussian(), cs.p, cs.m);
  const Eigen::MatrixXd zero_est =
      estimate(EstimatorSpec::orth_invariant(ShrinkagePsi::zero()), cs, es, a0);
  CHECK((zero_est - a0 * cs.S).norm() / (a0 * cs.S).norm() < 1e-10);
}

TEST_CASE("estimate: usual kind scales S") {
  CanonicalSample cs;
  cs.S = Eigen::MatrixXd::Identity(25, 25);
  cs.U = Eigen::MatrixXd::Identity(25, 25);
  cs.p = 25;
  cs.m = 25;
  const EigenSystem es = eigen_sym_truncated(cs.S);
  const Eigen::MatrixXd est = estimate(EstimatorSpec::usual(0.04), cs, es, 0.123);
  CHECK((est - 0.04 * Eigen::MatrixXd::Identity(25, 25)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("estimate: shrinkage only expands eigenvalues upward from a0*l_i") {
  const ModelSpec model = ModelSpec::gaussian();
  const Eigen::MatrixXd root = Eigen::MatrixXd::Identity(25, 25);
  const double a0 = optimal_a(model, 25, 10);
  for (int t = 0; t < 5; ++t) {
    Rng rng = Rng::for_replication(90, t);
    const CanonicalSample cs = sample_canonical(model, 10, root, rng);
    const EigenSystem es = eigen_sym_truncated(cs.S);
    const Eigen::MatrixXd est = estimate(
        EstimatorSpec::orth_invariant(ShrinkagePsi::haff(1.0, 1.125)), cs, es, a0);
    const EigenSystem es_out = eigen_sym_truncated(est);
    REQUIRE(es_out.r == es.r);
    for (int i = 0; i < es.r; ++i) {
      // Sorted comparison is valid: pointwise a0*l_i*(1+psi_i) >= a0*l_i.
      CHECK(es_out.L(i) >= a0 * es.L(i) - 1e-12);
    }
    CHECK((est - est.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("estimate is orthogonally equivariant") {
  Rng rng(59);
  for (int t = 0; t < 10; ++t) {
    const CanonicalSample cs = sample_from(random_gaussian(6, 8, rng));  // singular regime
    const EigenSystem es = eigen_sym_truncated(cs.S);
    const double a0 = optimal_a(ModelSpec::gaussian(), cs.p, cs.m);
    const EstimatorSpec spec =
        EstimatorSpec::orth_invariant(ShrinkagePsi::haff(2.0, 0.8));
    const Eigen::MatrixXd base = estimate(spec, cs, es, a0);

    const Eigen::MatrixXd rot =
        Eigen::HouseholderQR<Eigen::MatrixXd>(random_gaussian(cs.p, cs.p, rng))
            .householderQ() *
        Eigen::MatrixXd::Identity(cs.p, cs.p);
    const CanonicalSample rotated = sample_from(cs.U * rot.transpose());
    const EigenSystem es_rot = eigen_sym_truncated(rotated.S);
    const Eigen::MatrixXd est_rot = estimate(spec, rotated, es_rot, a0);
    CHECK((est_rot - rot * base * rot.transpose()).norm() / base.norm() < 1e-8);
  }
}

TEST_CASE("estimate rejects a rank-zero eigensystem") {
  CanonicalSample cs;
  cs.S = Eigen::MatrixXd::Zero(3, 3);
  cs.U = Eigen::MatrixXd::Zero(2, 3);
  cs.p = 3;
  cs.m = 2;
  EigenSystem empty;
  empty.p = 3;
  empty.r = 0;
  CHECK_THROWS_AS(
      (void)estimate(EstimatorSpec::orth_invariant(ShrinkagePsi::zero()), cs, empty, 0.1),
      RankZeroError);
}
