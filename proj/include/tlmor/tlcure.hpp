#pragma once

#include "tlmor/gramnorm.hpp"
#include "tlmor/porkcure.hpp"

namespace tlmor {

struct TlCureOptions {
  PorkOptions pork;
  double tol = 0.0;          ///< stop once the windowed error is at or below tol (0 runs the whole schedule)
  bool track_error = true;   ///< compute the windowed error after every step
};

/// Per-step history of a cumulative time-limited run.
/// errors[k] is the windowed H2 error after step k; trace_defects[k] is
/// tr(C (P_T - V_t P_t V_t^T) C^T) (V-type) or tr(B^T (Q_T - W_t Q_t W_t^T) B) (W-type).
struct TlCureTrace {
  Side side = Side::Input;
  std::vector<ReducedModel> roms;
  std::vector<double> errors;
  std::vector<double> trace_defects;
  CureState state;      ///< accumulated data of the working system (the dual for the W-type run)
  MatrixXd basis_t;     ///< V_tot,t (n x rho) or W_tot,t
  MatrixXd factor_t;    ///< P_tot,t or Q_tot,t
  bool converged = false;
  const ReducedModel& final_model() const { return roms.back(); }
};

/// Input-side run; schedule entries carry right directions.
TlCureTrace tlcure_v_run(const StateSpace& sys, const TimeInterval& iv,
                         const std::vector<InterpolationData>& schedule, const TlCureOptions& opts = {});

/// Output-side run; schedule entries carry left directions.
TlCureTrace tlcure_w_run(const StateSpace& sys, const TimeInterval& iv,
                         const std::vector<InterpolationData>& schedule, const TlCureOptions& opts = {});

/// Low-rank Gramian estimate carried by a run: V_t P_t V_t^T or W_t Q_t W_t^T.
MatrixXd approx_gramian(const TlCureTrace& trace);

}  // namespace tlmor
