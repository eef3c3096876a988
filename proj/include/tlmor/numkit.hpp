#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "tlmor/errors.hpp"

namespace tlmor {

using Complex = std::complex<double>;
using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Derived>
using PlainOf = Matrix<typename Derived::Scalar>;

namespace detail {

template <typename Scalar>
inline constexpr bool is_complex_v = Eigen::NumTraits<Scalar>::IsComplex;

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& M, const char* what) {
  if (!M.allFinite()) throw NonFiniteError(std::string(what) + " contains NaN or Inf");
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& M, const char* what) {
  if (M.rows() != M.cols())
    throw DimensionError(std::string(what) + " must be square, got " + std::to_string(M.rows()) +
                         "x" + std::to_string(M.cols()));
}

template <typename Derived>
double norm1(const Eigen::MatrixBase<Derived>& M) {
  if (M.size() == 0) return 0.0;
  return M.cwiseAbs().colwise().sum().maxCoeff();
}

// Diagonal Pade coefficients for degrees 3, 5, 7, 9, 13.
inline const std::vector<double>& pade_coefficients(int m) {
  static const std::vector<double> b3{120., 60., 12., 1.};
  static const std::vector<double> b5{30240., 15120., 3360., 420., 30., 1.};
  static const std::vector<double> b7{17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.};
  static const std::vector<double> b9{17643225600., 8821612800., 2075673600., 302702400., 30270240.,
                                      2162160., 110880., 3960., 90., 1.};
  static const std::vector<double> b13{64764752532480000., 32382376266240000., 7771770303897600.,
                                       1187353796428800., 129060195264000., 10559470521600.,
                                       670442572800., 33522128640., 1323241920., 40840800.,
                                       960960., 16380., 182., 1.};
  switch (m) {
    case 3: return b3;
    case 5: return b5;
    case 7: return b7;
    case 9: return b9;
    default: return b13;
  }
}

}  // namespace detail

/// Matrix exponential by scaling and squaring with a diagonal Pade approximant.
/// Real input yields real output.
template <typename Derived>
PlainOf<Derived> expm(const Eigen::MatrixBase<Derived>& M) {
  using Scalar = typename Derived::Scalar;
  using Mat = Matrix<Scalar>;
  detail::require_square(M, "expm argument");
  detail::require_finite(M, "expm argument");
  const Index n = M.rows();
  const Mat I = Mat::Identity(n, n);
  if (n == 0) return Mat(0, 0);

  static constexpr double theta[] = {1.495585217958292e-2, 2.539398330063230e-1,
                                     9.504178996162932e-1, 2.097847961257068e0};
  static constexpr int degrees[] = {3, 5, 7, 9};

  const double nrm = detail::norm1(M);
  Mat A = M;
  int squarings = 0;
  int m = 13;
  for (int k = 0; k < 4; ++k) {
    if (nrm <= theta[k]) {
      m = degrees[k];
      break;
    }
  }
  if (m == 13) {
    constexpr double theta13 = 5.371920351148152;
    if (nrm > theta13) squarings = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    A /= std::ldexp(1.0, squarings);
  }

  const auto& b = detail::pade_coefficients(m);
  const Mat A2 = A * A;
  Mat U, V;
  if (m < 13) {
    Mat Ak = I;  // A^(2j)
    Mat Uacc = Mat::Zero(n, n);
    Mat Vacc = Mat::Zero(n, n);
    for (int j = 0; 2 * j <= m; ++j) {
      if (j > 0) Ak = Ak * A2;
      Vacc += Scalar(b[2 * j]) * Ak;
      if (2 * j + 1 <= m) Uacc += Scalar(b[2 * j + 1]) * Ak;
    }
    U = A * Uacc;
    V = Vacc;
  } else {
    const Mat A4 = A2 * A2;
    const Mat A6 = A4 * A2;
    const Mat inner_u = A6 * (Scalar(b[13]) * A6 + Scalar(b[11]) * A4 + Scalar(b[9]) * A2);
    U = A * (inner_u + Scalar(b[7]) * A6 + Scalar(b[5]) * A4 + Scalar(b[3]) * A2 + Scalar(b[1]) * I);
    V = A6 * (Scalar(b[12]) * A6 + Scalar(b[10]) * A4 + Scalar(b[8]) * A2) + Scalar(b[6]) * A6 +
        Scalar(b[4]) * A4 + Scalar(b[2]) * A2 + Scalar(b[0]) * I;
  }
  Mat R = (V - U).partialPivLu().solve(V + U);
  for (int k = 0; k < squarings; ++k) R = R * R;
  return R;
}

namespace detail {

template <typename Scalar>
struct Schur {
  Matrix<Scalar> T;
  Matrix<Scalar> U;
  std::vector<std::pair<Index, Index>> blocks;  // (start, size) of diagonal blocks
};

template <typename Scalar>
std::vector<std::pair<Index, Index>> diagonal_blocks(const Matrix<Scalar>& T) {
  std::vector<std::pair<Index, Index>> blocks;
  const Index n = T.rows();
  Index i = 0;
  while (i < n) {
    if constexpr (!is_complex_v<Scalar>) {
      if (i + 1 < n && T(i + 1, i) != Scalar(0)) {
        blocks.emplace_back(i, 2);
        i += 2;
        continue;
      }
    }
    blocks.emplace_back(i, 1);
    ++i;
  }
  return blocks;
}

inline Schur<double> schur(const MatrixXd& A) {
  Schur<double> s;
  if (A.rows() == 0) return s;
  Eigen::RealSchur<MatrixXd> rs(A);
  if (rs.info() != Eigen::Success) throw DecompositionError("real Schur reduction did not converge");
  s.T = rs.matrixT();
  s.U = rs.matrixU();
  s.blocks = diagonal_blocks<double>(s.T);
  return s;
}

inline Schur<Complex> schur(const MatrixXcd& A) {
  Schur<Complex> s;
  if (A.rows() == 0) return s;
  Eigen::ComplexSchur<MatrixXcd> cs(A);
  if (cs.info() != Eigen::Success) throw DecompositionError("complex Schur reduction did not converge");
  s.T = cs.matrixT();
  s.U = cs.matrixU();
  s.blocks = diagonal_blocks<Complex>(s.T);
  return s;
}

}  // namespace detail

/// Bartels-Stewart solver for A X + X B + C = 0 that keeps both Schur forms,
/// so repeated right-hand sides cost O(n^2 m + n m^2).
template <typename Scalar>
class SylvesterSolver {
public:
  using Mat = Matrix<Scalar>;

  SylvesterSolver(const Mat& A, const Mat& B) {
    detail::require_square(A, "Sylvester coefficient A");
    detail::require_square(B, "Sylvester coefficient B");
    detail::require_finite(A, "Sylvester coefficient A");
    detail::require_finite(B, "Sylvester coefficient B");
    sa_ = detail::schur(A);
    sb_ = detail::schur(B);
    normA_ = A.norm();
    normB_ = B.norm();
    A_ = A;
    B_ = B;
    singular_floor_ = 1e3 * std::numeric_limits<double>::epsilon() * std::max(normA_ + normB_, 1e-300);
  }

  Index rows() const { return A_.rows(); }
  Index cols() const { return B_.rows(); }

  /// Solve without residual control.
  Mat solve_raw(const Mat& C) const {
    const Index p = rows(), q = cols();
    if (C.rows() != p || C.cols() != q) throw DimensionError("Sylvester constant term has wrong shape");
    if (p == 0 || q == 0) return Mat::Zero(p, q);
    const Mat F = sa_.U.adjoint() * C * sb_.U;
    Mat Y = Mat::Zero(p, q);
    const Mat& T = sa_.T;
    const Mat& R = sb_.T;
    for (const auto& [c0, cs] : sb_.blocks) {
      Mat G = -F.middleCols(c0, cs);
      if (c0 > 0) G.noalias() -= Y.leftCols(c0) * R.block(0, c0, c0, cs);
      for (auto it = sa_.blocks.rbegin(); it != sa_.blocks.rend(); ++it) {
        const auto [r0, rs] = *it;
        const Index tail = p - r0 - rs;
        Mat rhs = G.middleRows(r0, rs);
        if (tail > 0) rhs.noalias() -= T.block(r0, r0 + rs, rs, tail) * Y.block(r0 + rs, c0, tail, cs);
        Y.block(r0, c0, rs, cs) = solve_block(T.block(r0, r0, rs, rs), R.block(c0, c0, cs, cs), rhs);
      }
    }
    return sa_.U * Y * sb_.U.adjoint();
  }

  /// Relative residual ||A X + X B + C|| / ((||A|| + ||B||) ||X|| + ||C||).
  double relative_residual(const Mat& X, const Mat& C) const {
    const double denom = (normA_ + normB_) * X.norm() + C.norm();
    const double res = (A_ * X + X * B_ + C).norm();
    return denom > 0 ? res / denom : res;
  }

  /// Solve with one refinement sweep; throws when the residual stays above tol.
  Mat solve(const Mat& C, double tol = 1e-10) const {
    detail::require_finite(C, "Sylvester constant term");
    Mat X = solve_raw(C);
    if (!X.allFinite()) throw SingularEquationError("Sylvester solution is not finite");
    double rel = relative_residual(X, C);
    if (rel > tol) {
      const Mat res = A_ * X + X * B_ + C;
      X += solve_raw(res);
      rel = relative_residual(X, C);
      if (rel > tol)
        throw SingularEquationError("Sylvester residual " + std::to_string(rel) + " exceeds tolerance");
    }
    return X;
  }

private:
  Mat solve_block(const Mat& Tii, const Mat& Rkk, const Mat& rhs) const {
    const Index p = Tii.rows(), q = Rkk.rows();
    if (p == 1 && q == 1) {
      const Scalar d = Tii(0, 0) + Rkk(0, 0);
      if (std::abs(d) <= singular_floor_)
        throw SingularEquationError("coefficient spectra of A and -B intersect");
      return rhs / d;
    }
    // (I_q kron Tii + Rkk^T kron I_p) vec(Y) = vec(rhs), at most 4x4.
    Mat K = Mat::Zero(p * q, p * q);
    for (Index j = 0; j < q; ++j) {
      K.block(j * p, j * p, p, p) += Tii;
      for (Index l = 0; l < q; ++l) K.block(j * p, l * p, p, p) += Rkk(l, j) * Mat::Identity(p, p);
    }
    Eigen::JacobiSVD<Mat> svd(K);
    if (svd.singularValues()(p * q - 1) <= singular_floor_)
      throw SingularEquationError("coefficient spectra of A and -B intersect");
    Mat v = Eigen::Map<const Mat>(rhs.data(), p * q, 1);
    Mat y = K.fullPivLu().solve(v);
    return Eigen::Map<const Mat>(y.data(), p, q);
  }

  detail::Schur<Scalar> sa_, sb_;
  Mat A_, B_;
  double normA_ = 0, normB_ = 0, singular_floor_ = 0;
};

/// Solve A X + X B + C = 0.
template <typename DA, typename DB, typename DC>
PlainOf<DA> solve_sylv(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DB>& B,
                       const Eigen::MatrixBase<DC>& C, double tol = 1e-10) {
  using Scalar = typename DA::Scalar;
  if (C.rows() != A.rows() || C.cols() != B.rows())
    throw DimensionError("solve_sylv: C must be rows(A) x rows(B)");
  SylvesterSolver<Scalar> solver(A.eval(), B.template cast<Scalar>().eval());
  return solver.solve(C.template cast<Scalar>().eval(), tol);
}

/// Solve A X + X A^H + W = 0. Hermitian W gives a Hermitian X.
template <typename DA, typename DW>
PlainOf<DA> solve_lyap(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DW>& W, double tol = 1e-10) {
  using Scalar = typename DA::Scalar;
  using Mat = Matrix<Scalar>;
  detail::require_square(A, "Lyapunov coefficient");
  if (W.rows() != A.rows() || W.cols() != A.rows())
    throw DimensionError("solve_lyap: W must match A");
  const Mat Wm = W.template cast<Scalar>();
  Mat X = solve_sylv(A, A.adjoint().eval(), Wm, tol);
  if ((Wm - Wm.adjoint()).norm() <= 1e-14 * std::max(Wm.norm(), 1e-300)) X = (0.5 * (X + X.adjoint())).eval();
  return X;
}

/// Factorization of (sigma I - A) reused for many right-hand sides.
class ShiftedSolver {
public:
  template <typename DA>
  ShiftedSolver(const Eigen::MatrixBase<DA>& A, Complex sigma, double rcond_floor = 1e-14) : sigma_(sigma) {
    detail::require_square(A, "shifted_solve matrix");
    const Index n = A.rows();
    MatrixXcd M = sigma * MatrixXcd::Identity(n, n) - A.template cast<Complex>();
    lu_.compute(M);
    const double rc = n == 0 ? 1.0 : lu_.rcond();
    if (!(rc > rcond_floor))
      throw SingularShiftError("shift (" + std::to_string(sigma.real()) + "," + std::to_string(sigma.imag()) +
                               ") is numerically a pole (rcond " + std::to_string(rc) + ")");
  }

  template <typename DR>
  MatrixXcd solve(const Eigen::MatrixBase<DR>& R) const {
    MatrixXcd X = lu_.solve(R.template cast<Complex>());
    if (!X.allFinite()) throw SingularShiftError("shifted solve produced non-finite values");
    return X;
  }

  Complex shift() const { return sigma_; }

private:
  Complex sigma_;
  Eigen::PartialPivLU<MatrixXcd> lu_;
};

/// (sigma I - A)^{-1} R.
template <typename DA, typename DR>
MatrixXcd shifted_solve(const Eigen::MatrixBase<DA>& A, Complex sigma, const Eigen::MatrixBase<DR>& R) {
  if (R.rows() != A.rows()) throw DimensionError("shifted_solve: R has wrong row count");
  return ShiftedSolver(A, sigma).solve(R);
}

template <typename Scalar>
struct QrFactors {
  Matrix<Scalar> Q;  ///< orthonormal columns
  Matrix<Scalar> R;  ///< upper triangular with positive real diagonal, V = Q R
};

/// Thin QR with a rank check on the column-normalized input.
template <typename Derived>
QrFactors<typename Derived::Scalar> qr_factor(const Eigen::MatrixBase<Derived>& V, double rank_tol = 1e-12) {
  using Scalar = typename Derived::Scalar;
  using Mat = Matrix<Scalar>;
  detail::require_finite(V, "orthonormalize input");
  const Index n = V.rows(), k = V.cols();
  if (k > n) throw RankError("more columns than rows", n);
  QrFactors<Scalar> out;
  if (k == 0) {
    out.Q = Mat(n, 0);
    out.R = Mat(0, 0);
    return out;
  }
  const VectorXd norms = V.colwise().norm().transpose();
  Mat Vn = V;
  for (Index j = 0; j < k; ++j) {
    if (norms(j) == 0.0) {
      Eigen::ColPivHouseholderQR<Mat> cp(V);
      throw RankError("basis has a zero column", cp.rank());
    }
    Vn.col(j) /= norms(j);
  }
  Eigen::ColPivHouseholderQR<Mat> cp(Vn);
  cp.setThreshold(rank_tol);
  if (cp.rank() < k) throw RankError("basis is numerically rank deficient", cp.rank());

  Eigen::HouseholderQR<Mat> qr(V);
  out.Q = qr.householderQ() * Mat::Identity(n, k);
  out.R = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
  for (Index j = 0; j < k; ++j) {
    const Scalar d = out.R(j, j);
    const double a = std::abs(d);
    const Scalar phase = a > 0 ? d / a : Scalar(1);
    out.R.row(j) /= phase;
    out.Q.col(j) *= phase;
  }
  return out;
}

/// Orthonormal basis of range(V); throws RankError carrying the detected rank.
template <typename Derived>
PlainOf<Derived> orthonormalize(const Eigen::MatrixBase<Derived>& V, double rank_tol = 1e-12) {
  return qr_factor(V, rank_tol).Q;
}

/// Real part of M after checking the imaginary part is round-off.
inline MatrixXd real_checked(const MatrixXcd& M, double tol = 1e-12, const char* what = "matrix") {
  const double scale = std::max(M.real().norm(), 1.0);
  const double im = M.imag().norm();
  if (im > tol * scale)
    throw NumericalError(std::string(what) + " has a non-negligible imaginary part (" + std::to_string(im) + ")");
  return M.real();
}

}  // namespace tlmor
