#pragma once

#include "tlmor/gramnorm.hpp"
#include "tlmor/porkcure.hpp"

namespace tlmor {

struct TlOptions {
  SylvesterSource source = SylvesterSource::Automatic;
  double rank_tol = 1e-12;
  double definiteness_tol = 1e-12;
};

/// Result of a time-limited pseudo-optimal reduction with its intermediate data.
/// Input side:  S (r x r), L_plus / L_minus (m x r), gram_factor = Q_S, basis = V.
/// Output side: S (r x r), L_plus / L_minus (r x p), gram_factor = P_S, basis = W.
struct TlReduction {
  ReducedModel rom;
  Side side = Side::Input;
  MatrixXd basis;
  MatrixXd S;
  MatrixXd L_plus, L_minus;
  MatrixXd gram_factor;
  bool recovered = false;
  double sylvester_residual = 0;
};

/// Right-tangential time-limited pseudo-optimal reduction.
TlReduction tlpork_reduce(const StateSpace& sys, const InterpolationData& data, const TimeInterval& iv,
                          const TlOptions& opts = {});

/// Left-tangential (output-side) time-limited pseudo-optimal reduction.
TlReduction otlpork_reduce(const StateSpace& sys, const InterpolationData& data, const TimeInterval& iv,
                           const TlOptions& opts = {});

struct PseudoOptimalityReport {
  double gramian_residual = 0;   ///< relative ||Cr Pr - C P~|| (input) or ||Qr Br - Q~ B|| (output)
  double energy_defect = 0;      ///< | ||H||^2 - ||Hr||^2 - ||H - Hr||^2 | / ||H||^2
  VectorXd tangential;           ///< relative per-pole defect at the mirrored reduced poles
  double gramian_recovery = std::numeric_limits<double>::quiet_NaN();  ///< factor inverse vs reduced Gramian
  double tangential_max() const { return tangential.size() ? tangential.maxCoeff() : 0.0; }
};

/// Checks the optimality conditions of `rom` for the side it was built on.
PseudoOptimalityReport verify_pseudo_optimality(const StateSpace& sys, const ReducedModel& rom,
                                                const TimeInterval& iv, Side side);
PseudoOptimalityReport verify_pseudo_optimality(const StateSpace& sys, const TlReduction& red);

/// Interpolation data that mirrors the selected poles: sigma_k = -conj(lambda_k) with the
/// conjugated residue direction, so the reduced model keeps the selected poles.
InterpolationData mirror_modal_interp(const StateSpace& sys, const std::vector<Index>& selection, Side side);

}  // namespace tlmor
