#include "tlmor/rkrylov.hpp"

#include <map>
#include <memory>

namespace tlmor {

namespace {

struct ComplexLess {
  bool operator()(const Complex& a, const Complex& b) const {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  }
};

KrylovBasis build_input(const MatrixXd& A, const MatrixXd& X, const std::vector<Complex>& points,
                        const MatrixXcd& dirs, double rank_tol) {
  const Index n = A.rows(), k = X.cols();
  const Index r = static_cast<Index>(points.size());
  if (X.rows() != n) throw DimensionError("build_subspace: X has wrong row count");
  if (dirs.rows() != k || dirs.cols() != r) throw DimensionError("build_subspace: directions must be k x r");
  InterpolationData data{points, MatrixXcd(), MatrixXcd()};
  for (Index i = 0; i < r; ++i)
    if (!(points[i].real() > 0.0)) throw InputError("interpolation points must have positive real part");

  std::map<Complex, std::unique_ptr<ShiftedSolver>, ComplexLess> solvers;
  auto vec = [&](Index i) -> VectorXcd {
    auto& slot = solvers[points[i]];
    if (!slot) slot = std::make_unique<ShiftedSolver>(A, points[i]);
    // (A - sigma I)^{-1} X c
    return -slot->solve((X.cast<Complex>() * dirs.col(i)).eval());
  };

  MatrixXd Vr(n, r), Sr = MatrixXd::Zero(r, r), Lr(k, r);
  std::vector<bool> used(r, false);
  Index col = 0;
  for (Index i = 0; i < r; ++i) {
    if (used[i]) continue;
    const Index j = data.conjugate_partner(i, dirs);
    if (j < 0 || (j != i && used[j]))
      throw ClosureError("interpolation data is not closed under conjugation at entry " + std::to_string(i));
    used[i] = used[j] = true;
    const VectorXcd v = vec(i);
    const Complex s = points[i];
    if (j == i) {
      Vr.col(col) = real_checked(v, 1e-10, "real Krylov vector");
      Sr(col, col) = s.real();
      Lr.col(col) = dirs.col(i).real();
      col += 1;
    } else {
      Vr.col(col) = v.real();
      Vr.col(col + 1) = v.imag();
      Sr(col, col) = s.real();
      Sr(col, col + 1) = s.imag();
      Sr(col + 1, col) = -s.imag();
      Sr(col + 1, col + 1) = s.real();
      Lr.col(col) = dirs.col(i).real();
      Lr.col(col + 1) = dirs.col(i).imag();
      col += 2;
    }
  }
  const auto qr = qr_factor(Vr, rank_tol);
  KrylovBasis kb;
  kb.side = Side::Input;
  kb.basis = qr.Q;
  const MatrixXd Rinv = qr.R.triangularView<Eigen::Upper>().solve(MatrixXd::Identity(r, r));
  kb.S = qr.R * Sr * Rinv;
  kb.L = Lr * Rinv;
  return kb;
}

SubspaceBundle recover_input(const MatrixXd& A, const MatrixXd& X, const MatrixXd& V, double cond_limit) {
  const Index n = A.rows();
  if (V.rows() != n || X.rows() != n) throw DimensionError("recover_sylvester: shapes do not match");
  const MatrixXd E = V.transpose() * V;
  const MatrixXd AV = A * V;
  const MatrixXd At = V.transpose() * AV;
  const MatrixXd Bt = V.transpose() * X;
  Eigen::LDLT<MatrixXd> Ef(E);
  if (Ef.info() != Eigen::Success || !(Ef.rcond() > 1e-14)) throw RankError("basis Gram matrix is singular", 0);
  SubspaceBundle b;
  b.side = Side::Input;
  b.basis = V;
  b.perp = X - V * Ef.solve(Bt);
  const MatrixXd M = AV - V * Ef.solve(At);
  const MatrixXd G = b.perp.transpose() * b.perp;
  Eigen::JacobiSVD<MatrixXd> svd(G);
  const auto& sv = svd.singularValues();
  double cond = sv.size() == 0 ? 1.0 : (sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1)
                                                                : std::numeric_limits<double>::infinity());
  // A factor lying in span(V) leaves only roundoff in perp.
  if (sv.size() > 0 && std::sqrt(sv(sv.size() - 1)) <= 1e-10 * X.norm()) cond = std::numeric_limits<double>::infinity();
  if (!(cond <= cond_limit)) throw ConditioningError("deflated factor is ill conditioned", cond);
  b.L = b.perp.colPivHouseholderQr().solve(M);
  b.S = Ef.solve(At - Bt * b.L);
  b.recovered = true;
  return b;
}

SubspaceBundle transpose_bundle(SubspaceBundle b) {
  b.side = Side::Output;
  b.S.transposeInPlace();
  b.L.transposeInPlace();
  b.perp.transposeInPlace();
  return b;
}

}  // namespace

KrylovBasis build_subspace(const MatrixXd& A, const MatrixXd& X, const std::vector<Complex>& points,
                           const MatrixXcd& dirs, Side side, double rank_tol) {
  detail::require_square(A, "A");
  if (side == Side::Input) return build_input(A, X, points, dirs, rank_tol);
  KrylovBasis kb = build_input(A.transpose(), X, points, dirs, rank_tol);
  kb.side = Side::Output;
  kb.S.transposeInPlace();
  kb.L.transposeInPlace();
  return kb;
}

SubspaceBundle recover_sylvester(const MatrixXd& A, const MatrixXd& X, const MatrixXd& V, Side side,
                                 double cond_limit) {
  detail::require_square(A, "A");
  if (side == Side::Input) return recover_input(A, X, V, cond_limit);
  return transpose_bundle(recover_input(A.transpose(), X, V, cond_limit));
}

SubspaceBundle sylvester_data(const MatrixXd& A, const MatrixXd& X, const KrylovBasis& kb, SylvesterSource source) {
  if (source == SylvesterSource::Recovered) return recover_sylvester(A, X, kb.basis, kb.side);
  SubspaceBundle b;
  b.side = kb.side;
  b.basis = kb.basis;
  b.S = kb.S;
  b.L = kb.L;
  if (kb.side == Side::Input) {
    b.perp = X - kb.basis * (kb.basis.transpose() * X);
  } else {
    b.perp = X.transpose() - (X.transpose() * kb.basis) * kb.basis.transpose();
  }
  if (source == SylvesterSource::Automatic && !(sylvester_residual(A, X, b) <= 1e-8)) {
    try {
      return recover_sylvester(A, X, kb.basis, kb.side);
    } catch (const ConditioningError&) {
    }
  }
  return b;
}

double sylvester_residual(const MatrixXd& A, const MatrixXd& X, const SubspaceBundle& b) {
  const MatrixXd& V = b.basis;
  if (b.side == Side::Input) {
    const MatrixXd R = A * V - V * b.S - X * b.L;
    const double scale = A.norm() * V.norm() + V.norm() * b.S.norm() + X.norm() * b.L.norm();
    return scale > 0 ? R.norm() / scale : R.norm();
  }
  const MatrixXd R = V.transpose() * A - b.S * V.transpose() - b.L * X.transpose();
  const double scale = A.norm() * V.norm() + V.norm() * b.S.norm() + X.norm() * b.L.norm();
  return scale > 0 ? R.norm() / scale : R.norm();
}

}  // namespace tlmor
