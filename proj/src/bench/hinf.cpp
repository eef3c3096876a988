#include "tlmor/bench/hinf.hpp"

#include <algorithm>
#include <cmath>

namespace tlmor::bench {

double sigma_max(const MatrixXcd& M) {
  if (M.size() == 0) return 0.0;
  if (M.rows() == 1 || M.cols() == 1) return M.norm();
  return Eigen::JacobiSVD<MatrixXcd>(M).singularValues()(0);
}

std::pair<double, double> frequency_range(const StateSpace& sys) {
  const VectorXcd ev = sys.A.eigenvalues();
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (Index i = 0; i < ev.size(); ++i) {
    const double a = std::abs(ev(i));
    if (a > 0) lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  if (!std::isfinite(lo)) lo = hi = 1.0;
  return {1e-3 * lo, 1e3 * hi};
}

HinfEstimator::HinfEstimator(const StateSpace& sys, Index points) : sys_(sys), full_(sys) {
  if (points < 2) throw InputError("H-infinity sweep needs at least 2 points");
  const auto [lo, hi] = frequency_range(sys);
  omega_.reserve(std::size_t(points) + 1);
  omega_.push_back(0.0);
  const double a = std::log10(lo), b = std::log10(hi);
  for (Index k = 0; k < points; ++k) omega_.push_back(std::pow(10.0, a + (b - a) * double(k) / double(points - 1)));
  cached_.reserve(omega_.size());
  for (double w : omega_) cached_.push_back(full_(Complex(0.0, w)));
}

double HinfEstimator::sweep(const StateSpace& rom) const {
  TransferEvaluator red(rom);
  double best = 0;
  for (std::size_t k = 0; k < omega_.size(); ++k)
    best = std::max(best, sigma_max(cached_[k] - red(Complex(0.0, omega_[k]))));
  return best;
}

double HinfEstimator::error(const StateSpace& rom) const {
  TransferEvaluator red(rom);
  const std::size_t N = omega_.size();
  std::vector<double> vals(N);
  for (std::size_t k = 0; k < N; ++k) vals[k] = sigma_max(cached_[k] - red(Complex(0.0, omega_[k])));
  double best = *std::max_element(vals.begin(), vals.end());

  // Refine the three largest interior local maxima of the log grid (index 0 is omega = 0).
  std::vector<std::size_t> peaks;
  for (std::size_t k = 1; k < N; ++k) {
    const bool left = k == 1 || vals[k] >= vals[k - 1];
    const bool right = k + 1 == N || vals[k] >= vals[k + 1];
    if (left && right) peaks.push_back(k);
  }
  std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
  if (peaks.size() > 3) peaks.resize(3);

  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  auto f = [&](double lw) {
    const double w = std::pow(10.0, lw);
    return sigma_max(full_(Complex(0.0, w)) - red(Complex(0.0, w)));
  };
  for (std::size_t k : peaks) {
    double a = std::log10(omega_[std::max<std::size_t>(1, k - 1)]);
    double b = std::log10(omega_[std::min(N - 1, k + 1)]);
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 60 && b - a > 1e-10; ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + phi * (b - a);
        f2 = f(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - phi * (b - a);
        f1 = f(x1);
      }
    }
    best = std::max({best, f1, f2});
  }
  return best;
}

}  // namespace tlmor::bench
