#pragma once

#include "tlmor/sysmodel.hpp"

namespace tlmor {

enum class GramianKind { Controllability, Observability };

/// Infinite-horizon Gramian; requires a stable system.
MatrixXd gramian(const StateSpace& sys, GramianKind kind = GramianKind::Controllability);

/// Gramian over [t1, t2]. A full-horizon interval returns gramian().
MatrixXd tl_gramian(const StateSpace& sys, const TimeInterval& iv,
                    GramianKind kind = GramianKind::Controllability);

/// e^{M1 t1} X Y e^{M2 t1} - e^{M1 t2} X Y e^{M2 t2}.
MatrixXd tl_forcing(const MatrixXd& M1, const MatrixXd& M2, const MatrixXd& X, const MatrixXd& Y,
                    const TimeInterval& iv);

/// Solves M1 Z + Z M2 + e^{M1 t1} X Y e^{M2 t1} - e^{M1 t2} X Y e^{M2 t2} = 0.
MatrixXd tl_sylvester(const MatrixXd& M1, const MatrixXd& M2, const MatrixXd& X, const MatrixXd& Y,
                      const TimeInterval& iv);

struct CrossGramians {
  MatrixXd P;  ///< n x r, A P + P Ar^T + (B Br^T over the window) = 0
  MatrixXd Q;  ///< r x n, Ar^T Q + Q A + (Cr^T C over the window) = 0
};

CrossGramians tl_cross_gramians(const StateSpace& sys, const StateSpace& rom, const TimeInterval& iv);

double h2_norm(const StateSpace& sys);
double h2t_norm(const StateSpace& sys, const TimeInterval& iv, GramianKind path = GramianKind::Controllability);

/// The three trace terms of the squared error; squared() is clamped at 0.
struct ErrorTerms {
  double full = 0, cross = 0, reduced = 0;
  double squared_raw() const { return full - 2.0 * cross + reduced; }
  double squared() const { return std::max(0.0, squared_raw()); }
};

ErrorTerms h2t_error_terms(const StateSpace& sys, const StateSpace& rom, const TimeInterval& iv,
                           GramianKind path = GramianKind::Controllability);
/// On a finite window, errors far below the norms are re-evaluated by time-domain quadrature.
double h2t_error(const StateSpace& sys, const StateSpace& rom, const TimeInterval& iv,
                 GramianKind path = GramianKind::Controllability);

/// Composite Simpson rule for the controllability Gramian over a finite window.
MatrixXd gramian_quadrature_oracle(const StateSpace& sys, const TimeInterval& iv, int steps);

}  // namespace tlmor
