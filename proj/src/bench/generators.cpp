#include "tlmor/bench/generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tlmor::bench {

namespace {

struct SpectralRange {
  double lo, hi, imag;
};

SpectralRange spectral_range(const StateSpace& sys) {
  const VectorXcd ev = sys.A.eigenvalues();
  SpectralRange r{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (Index i = 0; i < ev.size(); ++i) {
    r.lo = std::min(r.lo, std::abs(ev(i).real()));
    r.hi = std::max(r.hi, std::abs(ev(i)));
    r.imag = std::max(r.imag, std::abs(ev(i).imag()));
  }
  if (!(r.lo > 0)) r.lo = r.hi > 0 ? 1e-3 * r.hi : 1.0;
  if (!(r.hi > r.lo)) r.hi = 10 * r.lo;
  if (!(r.imag > 0)) r.imag = r.lo;
  return r;
}

void fill_dirs(MatrixXcd& D, Index col, bool complex_pair, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  if (D.rows() == 1) {
    D(0, col) = 1.0;
    if (complex_pair) D(0, col + 1) = 1.0;
    return;
  }
  for (Index j = 0; j < D.rows(); ++j) {
    if (complex_pair) {
      const Complex c(g(rng), g(rng));
      D(j, col) = c;
      D(j, col + 1) = std::conj(c);
    } else {
      D(j, col) = g(rng);
    }
  }
}

}  // namespace

StateSpace generate_heat_rod(Index n) {
  if (n < 3) throw InputError("heat rod needs at least 3 nodes");
  const double s = double(n + 1) * double(n + 1);
  StateSpace sys;
  sys.A = MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    sys.A(i, i) = -2 * s;
    if (i + 1 < n) sys.A(i, i + 1) = sys.A(i + 1, i) = s;
  }
  sys.B = MatrixXd::Zero(n, 1);
  sys.B(0, 0) = s;
  sys.C = MatrixXd::Zero(1, n);
  sys.C(0, (n + 1) / 2 - 1) = 1.0;
  return sys;
}

StateSpace generate_random_stable(Index n, Index m, Index p, std::uint64_t seed) {
  if (n < 1 || m < 1 || p < 1) throw InputError("random system dimensions must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const double scale = 1.0 / std::sqrt(double(n));
  MatrixXd M(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) M(i, j) = scale * g(rng);
  const double norm2 = Eigen::JacobiSVD<MatrixXd>(M).singularValues()(0);
  StateSpace sys;
  sys.A = M - (norm2 + 1.0) * MatrixXd::Identity(n, n);
  sys.B.resize(n, m);
  sys.C.resize(p, n);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < n; ++i) sys.B(i, j) = g(rng);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < p; ++i) sys.C(i, j) = g(rng);
  return sys;
}

InterpolationData random_interpolation(const StateSpace& sys, Index r, std::uint64_t seed, bool pairs) {
  if (r < 1) throw InputError("need at least one interpolation point");
  const SpectralRange sr = spectral_range(sys);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> logre(std::log(sr.lo), std::log(sr.hi));
  std::uniform_real_distribution<double> im(0.1 * sr.imag, sr.imag);
  std::bernoulli_distribution coin(0.5);
  InterpolationData d;
  d.right_dirs.resize(sys.inputs(), r);
  d.left_dirs.resize(sys.outputs(), r);
  Index k = 0;
  while (k < r) {
    const double re = std::exp(logre(rng));
    if (pairs && k + 1 < r && coin(rng)) {
      const double w = im(rng);
      d.points.emplace_back(re, w);
      d.points.emplace_back(re, -w);
      fill_dirs(d.right_dirs, k, true, rng);
      fill_dirs(d.left_dirs, k, true, rng);
      k += 2;
    } else {
      d.points.emplace_back(re, 0.0);
      fill_dirs(d.right_dirs, k, false, rng);
      fill_dirs(d.left_dirs, k, false, rng);
      k += 1;
    }
  }
  return d;
}

std::vector<InterpolationData> random_schedule(const StateSpace& sys, int steps, Index per_step,
                                               std::uint64_t seed) {
  std::vector<InterpolationData> out;
  for (int i = 0; i < steps; ++i)
    out.push_back(random_interpolation(sys, per_step, seed * 1000003ULL + std::uint64_t(i), true));
  return out;
}

std::vector<InterpolationData> logspaced_schedule(const StateSpace& sys, Index count, Index per_step,
                                                  std::uint64_t seed) {
  if (count < 1 || per_step < 1) throw InputError("schedule sizes must be positive");
  const SpectralRange sr = spectral_range(sys);
  std::mt19937_64 rng(seed);
  InterpolationData all;
  all.right_dirs.resize(sys.inputs(), count);
  all.left_dirs.resize(sys.outputs(), count);
  const double a = std::log(sr.lo), b = std::log(sr.hi);
  for (Index k = 0; k < count; ++k) {
    const double t = count == 1 ? 0.0 : double(k) / double(count - 1);
    all.points.emplace_back(std::exp(a + t * (b - a)), 0.0);
    fill_dirs(all.right_dirs, k, false, rng);
    fill_dirs(all.left_dirs, k, false, rng);
  }
  return split_batches(all, per_step);
}

std::vector<InterpolationData> split_batches(const InterpolationData& data, Index per_step) {
  if (per_step < 1) throw InputError("batch size must be positive");
  std::vector<InterpolationData> out;
  const Index r = data.size();
  Index k = 0;
  while (k < r) {
    Index end = std::min(r, k + per_step);
    // Keep a conjugate pair together.
    if (end < r && data.points[std::size_t(end - 1)].imag() != 0.0 &&
        std::abs(data.points[std::size_t(end)] - std::conj(data.points[std::size_t(end - 1)])) <=
            1e-12 * std::abs(data.points[std::size_t(end)]))
      ++end;
    InterpolationData b;
    b.points.assign(data.points.begin() + k, data.points.begin() + end);
    if (data.has_right()) b.right_dirs = data.right_dirs.middleCols(k, end - k);
    if (data.has_left()) b.left_dirs = data.left_dirs.middleCols(k, end - k);
    out.push_back(std::move(b));
    k = end;
  }
  return out;
}

}  // namespace tlmor::bench
