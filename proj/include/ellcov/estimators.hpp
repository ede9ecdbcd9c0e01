#pragma once

#include <Eigen/Dense>

#include "ellcov/elliptical_model.hpp"
#include "ellcov/matrix_core.hpp"

namespace ellcov {

/// Eigenvalue shrinkage family Psi mapping a positive spectrum
/// L = (l_1 > ... > l_r) to diag(psi_1, ..., psi_r).
///
///   Haff(alpha, b):          psi_i = b * l_i^-alpha / tr(L^-alpha)
///   JamesStein:              psi_i = 1 / (v + r - 2i + 1)
///   EfronMorrisDey(alpha, b): psi_i = 1 / ((1 + b * l_i^alpha / tr(L^alpha)) * v)
///   Zero / Identity:         psi_i = 0 / 1 (test and verification scaffolding)
///
/// v = max(p, m) and r is the spectrum length.
struct ShrinkagePsi {
  enum class Family { Haff, JamesStein, EfronMorrisDey, Zero, Identity };

  Family family = Family::Zero;
  double alpha = 1.0;
  double b = 1.0;

  static ShrinkagePsi haff(double alpha, double b);
  static ShrinkagePsi james_stein() { return ShrinkagePsi{Family::JamesStein, 0.0, 0.0}; }
  static ShrinkagePsi efron_morris_dey(double alpha, double b);
  static ShrinkagePsi zero() { return ShrinkagePsi{Family::Zero, 0.0, 0.0}; }
  static ShrinkagePsi identity() { return ShrinkagePsi{Family::Identity, 0.0, 0.0}; }

  /// The fixed constant lambda with tr(Psi) >= lambda used by the risk
  /// certificate: b for Haff, 1/(v+r-1) for James-Stein, r/((b+1)v) for
  /// Efron-Morris-Dey, 0 for Zero, r for Identity.
  double trace_lower_bound(int v, int r) const;
};

/// Values psi_1..psi_r for the given spectrum.
Eigen::VectorXd psi_eval(const ShrinkagePsi& psi, const Eigen::VectorXd& L, int v, int r);

/// Analytic partial derivative of psi_i with respect to l_i (0-based i).
double psi_derivative(const ShrinkagePsi& psi, const Eigen::VectorXd& L, int v, int r, int i);

/// Central finite-difference fallback for the same derivative, step
/// h = max(1e-6, 1e-6 * l_i).
double psi_derivative_fd(const ShrinkagePsi& psi, const Eigen::VectorXd& L, int v, int r, int i);

/// An estimator of the scale matrix: either a * S, or the orthogonally
/// invariant form a0 * H L (I + Psi(L)) H^T.
struct EstimatorSpec {
  enum class Kind { Usual, OrthInvariant };

  Kind kind = Kind::Usual;
  double a = 1.0;
  ShrinkagePsi psi;

  static EstimatorSpec usual(double a);
  static EstimatorSpec orth_invariant(const ShrinkagePsi& psi) {
    return EstimatorSpec{Kind::OrthInvariant, 0.0, psi};
  }
};

/// Risk-optimal constant for a*S under the data-based loss: 1/(K* max(p,m)).
double optimal_a(const ModelSpec& model, int p, int m);

/// Risk-optimal constant for a*S under the quadratic loss: 1/(K*(p+m+1)).
double quadratic_loss_a(const ModelSpec& model, int p, int m);

/// Largest shrink weight b certified to improve the Haff family under the
/// data-based loss: 2(r-1)/(v-r+1).
double b0_bound(int v, int r);

/// Konno's quadratic-loss counterpart: 2(r-1)(v+r+1)/((v-r+1)(v-r+3)).
double b1_bound(int v, int r);

/// Evaluates the estimator on a sample. `es` must be the truncated
/// eigendecomposition of sample.S; `a0` is the scale constant used by the
/// orthogonally invariant form (the Usual kind carries its own a).
Eigen::MatrixXd estimate(const EstimatorSpec& spec, const CanonicalSample& sample,
                         const EigenSystem& es, double a0);

}  // namespace ellcov
