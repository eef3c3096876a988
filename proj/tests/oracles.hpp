#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "tlmor/sysmodel.hpp"

namespace oracle {

using tlmor::Complex;
using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;

/// Solves A X + X B + C = 0 through (I kron A + B^T kron I) vec X = -vec C.
template <class Mat>
Mat kron_sylvester(const Mat& A, const Mat& B, const Mat& C) {
  using S = typename Mat::Scalar;
  const Index n = A.rows(), k = B.rows();
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> K = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>::Zero(n * k, n * k);
  for (Index j = 0; j < k; ++j) {
    K.block(j * n, j * n, n, n) += A;
    for (Index i = 0; i < k; ++i) K.block(j * n, i * n, n, n) += B(i, j) * Mat::Identity(n, n);
  }
  Eigen::Matrix<S, Eigen::Dynamic, 1> c = -Eigen::Map<const Eigen::Matrix<S, Eigen::Dynamic, 1>>(C.data(), n * k);
  Eigen::Matrix<S, Eigen::Dynamic, 1> x = K.fullPivLu().solve(c);
  return Eigen::Map<Mat>(x.data(), n, k);
}

/// Taylor series with scaling and squaring; independent of the Pade code under test.
inline MatrixXd taylor_expm(const MatrixXd& M) {
  const double nrm = M.lpNorm<Eigen::Infinity>();
  int s = nrm > 0.5 ? int(std::ceil(std::log2(nrm / 0.5))) : 0;
  const MatrixXd X = M / std::ldexp(1.0, s);
  MatrixXd E = MatrixXd::Identity(M.rows(), M.cols()), term = E;
  for (int k = 1; k <= 30; ++k) {
    term = term * X / double(k);
    E += term;
  }
  for (int i = 0; i < s; ++i) E = E * E;
  return E;
}

/// Classical RK4 for x' = A x from x0 over [0, t].
inline Eigen::VectorXd rk4(const MatrixXd& A, Eigen::VectorXd x, double t, int steps) {
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    const Eigen::VectorXd k1 = A * x;
    const Eigen::VectorXd k2 = A * (x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = A * (x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = A * (x + h * k3);
    x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return x;
}

/// RK4 simulation of x' = A x + B 1, y = C x, x(0) = 0; returns y(t) for all inputs switched on together.
inline MatrixXd rk4_step(const tlmor::StateSpace& sys, double t, int steps) {
  MatrixXd Y(sys.outputs(), sys.inputs());
  for (Index j = 0; j < sys.inputs(); ++j) {
    const Eigen::VectorXd b = sys.B.col(j);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.order());
    const double h = t / steps;
    auto f = [&](const Eigen::VectorXd& z) { return Eigen::VectorXd(sys.A * z + b); };
    for (int i = 0; i < steps; ++i) {
      const Eigen::VectorXd k1 = f(x), k2 = f(x + 0.5 * h * k1), k3 = f(x + 0.5 * h * k2), k4 = f(x + h * k3);
      x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    Y.col(j) = sys.C * x;
  }
  return Y;
}

/// Composite Simpson rule for the integral of e^{A s} B B^T e^{A^T s} over [t1, t2];
/// e^{A h} from the Taylor oracle, steps rounded up to even.
inline MatrixXd simpson_gramian(const MatrixXd& A, const MatrixXd& B, double t1, double t2, int steps) {
  if (steps % 2) ++steps;
  const double h = (t2 - t1) / steps;
  const MatrixXd Eh = taylor_expm(A * h);
  MatrixXd F = taylor_expm(A * t1) * B;
  MatrixXd sum = MatrixXd::Zero(A.rows(), A.rows());
  for (int k = 0; k <= steps; ++k) {
    const double w = (k == 0 || k == steps) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    sum += w * F * F.transpose();
    F = Eh * F;
  }
  return sum * h / 3.0;
}

/// C (sI - A)^{-1} B by a dense complex solve.
inline MatrixXcd transfer(const tlmor::StateSpace& sys, Complex s) {
  const MatrixXcd M = s * MatrixXcd::Identity(sys.order(), sys.order()) - sys.A.cast<Complex>();
  return sys.C.cast<Complex>() * M.fullPivLu().solve(sys.B.cast<Complex>());
}

inline double rel(const MatrixXd& a, const MatrixXd& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-300});
}

inline double relc(const MatrixXcd& a, const MatrixXcd& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-300});
}

/// Random points in the right half plane, closed under conjugation, with directions of width m (right) and p (left).
inline tlmor::InterpolationData random_data(Index r, Index m, Index p, std::uint64_t seed, double lo = 0.5,
                                            double hi = 5.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(lo, hi), im(0.2, 3.0);
  std::normal_distribution<double> g;
  tlmor::InterpolationData d;
  d.right_dirs.resize(m, r);
  d.left_dirs.resize(p, r);
  Index k = 0;
  while (k < r) {
    if (k + 1 < r && (rng() & 1u)) {
      const Complex s(re(rng), im(rng));
      d.points.push_back(s);
      d.points.push_back(std::conj(s));
      for (Index i = 0; i < m; ++i) {
        const Complex c(g(rng), g(rng));
        d.right_dirs(i, k) = c;
        d.right_dirs(i, k + 1) = std::conj(c);
      }
      for (Index i = 0; i < p; ++i) {
        const Complex c(g(rng), g(rng));
        d.left_dirs(i, k) = c;
        d.left_dirs(i, k + 1) = std::conj(c);
      }
      k += 2;
    } else {
      d.points.emplace_back(re(rng), 0.0);
      for (Index i = 0; i < m; ++i) d.right_dirs(i, k) = g(rng);
      for (Index i = 0; i < p; ++i) d.left_dirs(i, k) = g(rng);
      ++k;
    }
  }
  return d;
}

inline tlmor::StateSpace scalar(double a, double b, double c) {
  return {MatrixXd::Constant(1, 1, a), MatrixXd::Constant(1, 1, b), MatrixXd::Constant(1, 1, c)};
}

inline tlmor::StateSpace diag12() {
  MatrixXd A = MatrixXd::Zero(2, 2);
  A(0, 0) = -1;
  A(1, 1) = -2;
  return {A, MatrixXd::Ones(2, 1), MatrixXd::Ones(1, 2)};
}

}  // namespace oracle
