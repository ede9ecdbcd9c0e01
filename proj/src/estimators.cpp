#include "ellcov/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ellcov {

namespace {

void check_spectrum(const Eigen::VectorXd& L, int r) {
  if (static_cast<int>(L.size()) != r || r < 1) {
    throw std::invalid_argument("shrinkage: spectrum length must equal r >= 1");
  }
  for (int i = 0; i < r; ++i) {
    if (!(L(i) > 0.0)) {
      throw std::invalid_argument("shrinkage: eigenvalues must be positive");
    }
  }
}

// Power weights w_i = l_i^expo / sum_j l_j^expo, computed against the
// dominant term so extreme exponents cannot overflow.
Eigen::VectorXd power_weights(const Eigen::VectorXd& L, double expo) {
  const double ref = expo < 0.0 ? L.minCoeff() : L.maxCoeff();
  Eigen::VectorXd w(L.size());
  for (Eigen::Index i = 0; i < L.size(); ++i) {
    w(i) = std::pow(L(i) / ref, expo);
  }
  return w / w.sum();
}

}  // namespace

ShrinkagePsi ShrinkagePsi::haff(double alpha, double b) {
  if (!(alpha > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("ShrinkagePsi::haff: alpha and b must be positive");
  }
  return ShrinkagePsi{Family::Haff, alpha, b};
}

ShrinkagePsi ShrinkagePsi::efron_morris_dey(double alpha, double b) {
  if (!(alpha > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("ShrinkagePsi::efron_morris_dey: alpha and b must be positive");
  }
  return ShrinkagePsi{Family::EfronMorrisDey, alpha, b};
}

double ShrinkagePsi::trace_lower_bound(int v, int r) const {
  switch (family) {
    case Family::Haff:
      return b;
    case Family::JamesStein:
      return 1.0 / (v + r - 1);
    case Family::EfronMorrisDey:
      return r / ((b + 1.0) * v);
    case Family::Zero:
      return 0.0;
    case Family::Identity:
      return static_cast<double>(r);
  }
  throw std::logic_error("trace_lower_bound: unknown family");
}

Eigen::VectorXd psi_eval(const ShrinkagePsi& psi, const Eigen::VectorXd& L, int v, int r) {
  check_spectrum(L, r);
  Eigen::VectorXd out(r);
  switch (psi.family) {
    case ShrinkagePsi::Family::Haff:
      out = psi.b * power_weights(L, -psi.alpha);
      break;
    case ShrinkagePsi::Family::JamesStein:
      for (int i = 0; i < r; ++i) {
        out(i) = 1.0 / (v + r - 2 * (i + 1) + 1);
      }
      break;
    case ShrinkagePsi::Family::EfronMorrisDey: {
      const Eigen::VectorXd w = power_weights(L, psi.alpha);
      for (int i = 0; i < r; ++i) {
        out(i) = 1.0 / ((1.0 + psi.b * w(i)) * v);
      }
      break;
    }
    case ShrinkagePsi::Family::Zero:
      out.setZero();
      break;
    case ShrinkagePsi::Family::Identity:
      out.setOnes();
      break;
  }
  return out;
}

double psi_derivative(const ShrinkagePsi& psi, const Eigen::VectorXd& L, int v, int r, int i) {
  check_spectrum(L, r);
  if (i < 0 || i >= r) {
    throw std::invalid_argument("psi_derivative: index out of range");
  }
  switch (psi.family) {
    case ShrinkagePsi::Family::Haff: {
      // d/dl_i [l_i^-a / tr(L^-a)] = a * (w_i / l_i) * (w_i - 1), w_i the
      // normalized inverse-power weight.
      const Eigen::VectorXd w = power_weights(L, -psi.alpha);
      return psi.b * psi.alpha * (w(i) / L(i)) * (w(i) - 1.0);
    }
    case ShrinkagePsi::Family::JamesStein:
      return 0.0;
    case ShrinkagePsi::Family::EfronMorrisDey: {
      const Eigen::VectorXd w = power_weights(L, psi.alpha);
      const double denom = 1.0 + psi.b * w(i);
      const double dw = psi.alpha * (w(i) / L(i)) * (1.0 - w(i));
      return -psi.b * dw / (v * denom * denom);
    }
    case ShrinkagePsi::Family::Zero:
    case ShrinkagePsi::Family::Identity:
      return 0.0;
  }
  throw std::logic_error("psi_derivative: unknown family");
}

double psi_derivative_fd(const ShrinkagePsi& psi, const Eigen::VectorXd& L, int v, int r, int i) {
  check_spectrum(L, r);
  if (i < 0 || i >= r) {
    throw std::invalid_argument("psi_derivative_fd: index out of range");
  }
  const double h = std::max(1e-6, 1e-6 * L(i));
  Eigen::VectorXd up = L;
  Eigen::VectorXd down = L;
  up(i) += h;
  down(i) -= h;
  const double f_up = psi_eval(psi, up, v, r)(i);
  const double f_down = psi_eval(psi, down, v, r)(i);
  return (f_up - f_down) / (2.0 * h);
}

EstimatorSpec EstimatorSpec::usual(double a) {
  if (!(a > 0.0)) {
    throw std::invalid_argument("EstimatorSpec::usual: a must be positive");
  }
  return EstimatorSpec{Kind::Usual, a, ShrinkagePsi::zero()};
}

double optimal_a(const ModelSpec& model, int p, int m) {
  if (p < 1 || m < 1) {
    throw std::invalid_argument("optimal_a: p and m must be >= 1");
  }
  return 1.0 / (model.k_star() * std::max(p, m));
}

double quadratic_loss_a(const ModelSpec& model, int p, int m) {
  if (p < 1 || m < 1) {
    throw std::invalid_argument("quadratic_loss_a: p and m must be >= 1");
  }
  return 1.0 / (model.k_star() * (p + m + 1));
}

double b0_bound(int v, int r) {
  if (r < 1 || v < r) {
    throw std::invalid_argument("b0_bound: need 1 <= r <= v");
  }
  return 2.0 * (r - 1) / (v - r + 1);
}

double b1_bound(int v, int r) {
  if (r < 1 || v < r) {
    throw std::invalid_argument("b1_bound: need 1 <= r <= v");
  }
  return 2.0 * (r - 1) * (v + r + 1) /
         (static_cast<double>(v - r + 1) * (v - r + 3));
}

Eigen::MatrixXd estimate(const EstimatorSpec& spec, const CanonicalSample& sample,
                         const EigenSystem& es, double a0) {
  if (es.r < 1) {
    throw RankZeroError("estimate: rank-0 sample");
  }
  if (spec.kind == EstimatorSpec::Kind::Usual) {
    return spec.a * sample.S;
  }
  const int v = std::max(sample.p, sample.m);
  const Eigen::VectorXd psi = psi_eval(spec.psi, es.L, v, es.r);
  const Eigen::VectorXd scaled =
      a0 * es.L.cwiseProduct(Eigen::VectorXd::Ones(es.r) + psi);
  const Eigen::MatrixXd out = es.H * scaled.asDiagonal() * es.H.transpose();
  return (out + out.transpose()) / 2.0;
}

}  // namespace ellcov
