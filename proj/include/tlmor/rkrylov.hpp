#pragma once

#include "tlmor/sysmodel.hpp"

namespace tlmor {

/// Input side: V spans (sigma I - A)^{-1} X c.  Output side: W spans (sigma I - A^T)^{-1} X b^T.
enum class Side { Input, Output };

/// Orthonormal basis plus the Sylvester pair carried over from the construction.
/// Input:  A V - V S - X L = 0, L is k x r.
/// Output: W^T A - S W^T - L X^T = 0, L is r x k.
struct KrylovBasis {
  MatrixXd basis;
  MatrixXd S;
  MatrixXd L;
  Side side = Side::Input;
};

KrylovBasis build_subspace(const MatrixXd& A, const MatrixXd& X, const std::vector<Complex>& points,
                           const MatrixXcd& dirs, Side side, double rank_tol = 1e-12);

/// Sylvester data attached to a basis, with the deflated factor
/// (B_perp, n x k, for the input side; C_perp, k x n, for the output side).
struct SubspaceBundle {
  MatrixXd basis;
  MatrixXd S;
  MatrixXd L;
  MatrixXd perp;
  Side side = Side::Input;
  bool recovered = false;  ///< true when (S, L) came from the least-squares recovery
};

/// Recovers (S, L) from a basis alone by projection and least squares.
/// Throws ConditioningError when the deflated factor Gram matrix is too ill conditioned.
SubspaceBundle recover_sylvester(const MatrixXd& A, const MatrixXd& X, const MatrixXd& V, Side side,
                                 double cond_limit = 1e12);

enum class SylvesterSource { Automatic, Recovered, Constructed };

/// Automatic keeps the construction pair and falls back to the recovery when its residual is not small.
SubspaceBundle sylvester_data(const MatrixXd& A, const MatrixXd& X, const KrylovBasis& kb,
                              SylvesterSource source = SylvesterSource::Automatic);

/// Relative residual of the bundle's Sylvester equation.
double sylvester_residual(const MatrixXd& A, const MatrixXd& X, const SubspaceBundle& b);

}  // namespace tlmor
