#pragma once

#include "tlmor/sysmodel.hpp"

namespace tlmor::bench {

/// Largest singular value of a complex matrix.
double sigma_max(const MatrixXcd& M);

/// H-infinity estimate of H - Hr: a log-frequency sweep (plus omega = 0) refined by golden-section
/// search around the best grid point. The full model's response on the grid is cached.
class HinfEstimator {
public:
  HinfEstimator(const StateSpace& sys, Index points = 400);

  double error(const StateSpace& rom) const;
  /// Sweep only, on the estimator's grid.
  double sweep(const StateSpace& rom) const;
  const std::vector<double>& grid() const { return omega_; }

private:
  StateSpace sys_;
  TransferEvaluator full_;
  std::vector<double> omega_;
  std::vector<MatrixXcd> cached_;
};

/// Frequency range [lo, hi] spanning the spectra of both models with three decades of margin.
std::pair<double, double> frequency_range(const StateSpace& sys);

}  // namespace tlmor::bench
