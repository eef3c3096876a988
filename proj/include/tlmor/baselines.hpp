#pragma once

#include <cstdint>

#include "tlmor/gramnorm.hpp"
#include "tlmor/rkrylov.hpp"

namespace tlmor {

/// Square-root balancing of a Gramian pair truncated to order r.
/// right (n x r) and left (n x r) satisfy left^T right = I and
/// left^T P left = right^T Q right = diag(hankel.head(r)).
struct BalancingData {
  MatrixXd right;
  MatrixXd left;
  VectorXd hankel;  ///< all singular values of Z_Q^T Z_P
};

BalancingData balance(const MatrixXd& P, const MatrixXd& Q, Index r);

/// Projects sys with a balancing built from (P, Q); the shared core of BT, TLBT and A-TLBT.
ReducedModel balanced_truncation(const StateSpace& sys, const MatrixXd& P, const MatrixXd& Q, Index r,
                                 Method tag, const TimeInterval& iv);

ReducedModel bt_reduce(const StateSpace& sys, Index r);
ReducedModel tlbt_reduce(const StateSpace& sys, Index r, const TimeInterval& iv);
/// Time-limited balancing on supplied (typically low-rank) Gramian estimates.
ReducedModel atlbt_reduce(const StateSpace& sys, Index r, const TimeInterval& iv, const MatrixXd& P_approx,
                          const MatrixXd& Q_approx);

/// Oblique projection (W^T V)^{-1} W^T (A, B) V, C V.
StateSpace petrov_galerkin(const StateSpace& sys, const MatrixXd& V, const MatrixXd& W);

/// Mirrored poles of a model with residue directions on both sides: sigma_k = -lambda_k.
/// Unstable poles are reflected so every point has positive real part.
InterpolationData interpolation_from_model(const StateSpace& rom);

/// Real points drawn log-uniformly over the mirrored spectral range plus random real directions.
InterpolationData random_mirror_init(const StateSpace& sys, Index r, std::uint64_t seed);

struct IrkaOptions {
  int maxiter = 100;
  double tol = 1e-6;
  double rank_tol = 1e-12;
};

struct IrkaResult {
  ReducedModel rom;
  bool converged = false;
  int iterations = 0;
  InterpolationData final_data;
  std::vector<double> changes;    ///< relative change of the sorted reduced spectrum per iteration
  std::vector<double> residuals;  ///< relative Sylvester residuals per iteration (time-limited variant)
};

IrkaResult irka_reduce(const StateSpace& sys, Index r, const InterpolationData& init, const IrkaOptions& opts = {});

/// Time-limited iteration; the window enters through the Sylvester equations for the projection bases.
IrkaResult tlirka_reduce(const StateSpace& sys, Index r, const TimeInterval& iv, const InterpolationData& init,
                         const IrkaOptions& opts = {});

}  // namespace tlmor
