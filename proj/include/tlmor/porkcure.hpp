#pragma once

#include "tlmor/rkrylov.hpp"

namespace tlmor {

struct PorkOptions {
  SylvesterSource source = SylvesterSource::Automatic;
  double rank_tol = 1e-12;
  double observability_tol = 1e-10;
  double definiteness_tol = 1e-12;
};

/// Smallest PBH margin min_k sigma_min([S - mu_k I; L]) / (||S|| + ||L||) over the eigenvalues of S.
/// L is k x r (input orientation).
double observability_margin(const MatrixXd& S, const MatrixXd& L);

/// Solves -S^T Q - Q S + W = 0 and checks Q is positive definite.
MatrixXd pseudo_gramian(const MatrixXd& S, const MatrixXd& W, double definiteness_tol = 1e-12);

/// Infinite-horizon pseudo-optimal reduction. Input side uses right directions;
/// output side uses left directions and the dual construction.
ReducedModel pork_reduce(const StateSpace& sys, const InterpolationData& data, Side side = Side::Input,
                         const PorkOptions& opts = {});

/// Accumulated quantities of the cumulative scheme (input orientation).
/// A V_tot - V_tot S_tot - B L_tot = 0 and B_perp = B - V_tot B_bar.
struct CureState {
  int step = 0;
  MatrixXd S_tot;   ///< rho x rho, block upper triangular
  MatrixXd L_tot;   ///< m x rho
  MatrixXd B_bar;   ///< rho x m, stacked -Q_i^{-1} L_i^T
  MatrixXd V_tot;   ///< n x rho
  MatrixXd P_tot;   ///< rho x rho, blkdiag(Q_i^{-1})
  MatrixXd B_perp;  ///< n x m
  std::vector<MatrixXd> Q_blocks;
  Index order() const { return S_tot.rows(); }
};

/// Cumulative pseudo-optimal reducer over a window; the infinite window gives the plain scheme.
class CumulativeReducer {
public:
  CumulativeReducer(StateSpace sys, TimeInterval iv, PorkOptions opts = {});

  /// Adds one batch of interpolation data (right directions) and returns the accumulated model.
  ReducedModel step(const InterpolationData& data);

  const CureState& state() const { return st_; }
  const TimeInterval& interval() const { return iv_; }
  const StateSpace& system() const { return sys_; }

  /// e^{A t1} V e^{-S t1} - e^{A t2} V e^{-S t2}.
  MatrixXd windowed_basis() const;
  /// Inverse of the reduced windowed Gramian of (-S^T, -L^T).
  MatrixXd windowed_factor() const;
  /// Current accumulated realization (-S^T, -L^T, C V_t P_t).
  ReducedModel current() const;

private:
  StateSpace sys_;
  TimeInterval iv_;
  PorkOptions opts_;
  MatrixXd E1_, E2_;  ///< e^{A t1}, e^{A t2}; empty when trivial
  CureState st_;
};

struct CureResult {
  std::vector<ReducedModel> roms;
  CureState state;
};

/// Infinite-horizon cumulative run over a schedule of batches.
CureResult cure_run(const StateSpace& sys, const std::vector<InterpolationData>& schedule,
                    const PorkOptions& opts = {});

/// (A^T, C^T, B^T) view of a reduced model, keeping provenance.
ReducedModel transpose_model(const ReducedModel& rom);

}  // namespace tlmor
