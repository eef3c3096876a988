#include "tlmor/gramnorm.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace tlmor {

namespace {

void require_stable(const StateSpace& sys, const char* what) {
  if (!sys.is_stable())
    throw StabilityError(std::string(what) + ": infinite-horizon Gramian needs a stable system");
}

MatrixXd symmetrize(const MatrixXd& X) { return 0.5 * (X + X.transpose()); }

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(std::size_t(n), 0.0);
  w.assign(std::size_t(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5)), dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[std::size_t(i)] = 0.5 * (1.0 - z);
    w[std::size_t(i)] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
}

constexpr int kNodes = 12;
constexpr double kMaxPanels = 2000;
constexpr double kRefineRatio = 1e-6;

double spectral_radius(const MatrixXd& A) {
  return A.size() == 0 ? 0.0 : A.eigenvalues().cwiseAbs().maxCoeff();
}

// Integrates |h(t) - h_r(t)|_F^2 over the window with composite Gauss-Legendre.
// The difference is formed before squaring, so small errors keep their relative accuracy.
// Returns a negative value when the window is too stiff for the panel budget.
double error_by_quadrature(const StateSpace& sys, const StateSpace& rom, const TimeInterval& iv) {
  const double len = iv.t2 - iv.t1;
  const double rho = std::max(spectral_radius(sys.A), spectral_radius(rom.A));
  if (!(rho * len <= kMaxPanels)) return -1.0;
  const int panels = std::max(8, int(std::ceil(rho * len)));
  const double h = len / panels;
  std::vector<double> x, w;
  gauss_legendre(kNodes, x, w);
  std::vector<MatrixXd> G(kNodes), Gr(kNodes);
  for (int j = 0; j < kNodes; ++j) {
    G[std::size_t(j)] = sys.C * expm_at(sys.A, x[std::size_t(j)] * h);
    Gr[std::size_t(j)] = rom.C * expm_at(rom.A, x[std::size_t(j)] * h);
  }
  const MatrixXd E = expm_at(sys.A, h), Er = expm_at(rom.A, h);
  MatrixXd Y = expm_at(sys.A, iv.t1) * sys.B, Yr = expm_at(rom.A, iv.t1) * rom.B;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    for (int j = 0; j < kNodes; ++j)
      acc += w[std::size_t(j)] * (G[std::size_t(j)] * Y - Gr[std::size_t(j)] * Yr).squaredNorm();
    Y = E * Y;
    Yr = Er * Yr;
  }
  return acc * h;
}

}  // namespace

MatrixXd tl_forcing(const MatrixXd& M1, const MatrixXd& M2, const MatrixXd& X, const MatrixXd& Y,
                    const TimeInterval& iv) {
  iv.validate();
  MatrixXd F;
  if (iv.starts_at_zero()) {
    F = X * Y;
  } else {
    F = expm_at(M1, iv.t1) * X * Y * expm_at(M2, iv.t1);
  }
  if (!iv.is_infinite()) F -= expm_at(M1, iv.t2) * X * Y * expm_at(M2, iv.t2);
  return F;
}

MatrixXd tl_sylvester(const MatrixXd& M1, const MatrixXd& M2, const MatrixXd& X, const MatrixXd& Y,
                      const TimeInterval& iv) {
  return solve_sylv(M1, M2, tl_forcing(M1, M2, X, Y, iv));
}

MatrixXd gramian(const StateSpace& sys, GramianKind kind) {
  return tl_gramian(sys, TimeInterval::infinite(), kind);
}

MatrixXd tl_gramian(const StateSpace& sys, const TimeInterval& iv, GramianKind kind) {
  sys.validate();
  if (iv.is_infinite()) require_stable(sys, "gramian");
  const MatrixXd At = sys.A.transpose();
  if (kind == GramianKind::Controllability)
    return symmetrize(tl_sylvester(sys.A, At, sys.B, sys.B.transpose(), iv));
  return symmetrize(tl_sylvester(At, sys.A, sys.C.transpose(), sys.C, iv));
}

CrossGramians tl_cross_gramians(const StateSpace& sys, const StateSpace& rom, const TimeInterval& iv) {
  sys.validate();
  rom.validate();
  if (rom.inputs() != sys.inputs() || rom.outputs() != sys.outputs())
    throw DimensionError("reduced model has different input/output dimensions");
  if (iv.is_infinite()) {
    require_stable(sys, "cross Gramian");
    require_stable(rom, "cross Gramian");
  }
  CrossGramians cg;
  cg.P = tl_sylvester(sys.A, rom.A.transpose(), sys.B, rom.B.transpose(), iv);
  cg.Q = tl_sylvester(rom.A.transpose(), sys.A, rom.C.transpose(), sys.C, iv);
  return cg;
}

double h2_norm(const StateSpace& sys) { return h2t_norm(sys, TimeInterval::infinite()); }

double h2t_norm(const StateSpace& sys, const TimeInterval& iv, GramianKind path) {
  const MatrixXd G = tl_gramian(sys, iv, path);
  const double sq = path == GramianKind::Controllability ? (sys.C * G * sys.C.transpose()).trace()
                                                         : (sys.B.transpose() * G * sys.B).trace();
  return std::sqrt(std::max(0.0, sq));
}

ErrorTerms h2t_error_terms(const StateSpace& sys, const StateSpace& rom, const TimeInterval& iv, GramianKind path) {
  const CrossGramians cg = tl_cross_gramians(sys, rom, iv);
  ErrorTerms e;
  if (path == GramianKind::Controllability) {
    const MatrixXd P = tl_gramian(sys, iv, path);
    const MatrixXd Pr = tl_gramian(rom, iv, path);
    e.full = (sys.C * P * sys.C.transpose()).trace();
    e.cross = (sys.C * cg.P * rom.C.transpose()).trace();
    e.reduced = (rom.C * Pr * rom.C.transpose()).trace();
  } else {
    const MatrixXd Q = tl_gramian(sys, iv, path);
    const MatrixXd Qr = tl_gramian(rom, iv, path);
    e.full = (sys.B.transpose() * Q * sys.B).trace();
    e.cross = (rom.B.transpose() * cg.Q * sys.B).trace();
    e.reduced = (rom.B.transpose() * Qr * rom.B).trace();
  }
  return e;
}

double h2t_error(const StateSpace& sys, const StateSpace& rom, const TimeInterval& iv, GramianKind path) {
  const ErrorTerms e = h2t_error_terms(sys, rom, iv, path);
  // The trace form cancels to roundoff once the error is tiny next to the norms.
  if (!iv.is_infinite() && e.squared_raw() <= kRefineRatio * (std::abs(e.full) + std::abs(e.reduced))) {
    const double q = error_by_quadrature(sys, rom, iv);
    if (q >= 0.0) return std::sqrt(q);
  }
  return std::sqrt(e.squared());
}

MatrixXd gramian_quadrature_oracle(const StateSpace& sys, const TimeInterval& iv, int steps) {
  sys.validate();
  iv.validate();
  if (iv.is_infinite()) throw InputError("quadrature needs a finite window");
  if (steps < 2) throw InputError("quadrature needs at least 2 steps");
  if (steps % 2) ++steps;
  const double h = (iv.t2 - iv.t1) / steps;
  const MatrixXd Eh = expm((sys.A * h).eval());
  MatrixXd X = expm_at(sys.A, iv.t1) * sys.B;
  MatrixXd acc = MatrixXd::Zero(sys.order(), sys.order());
  for (int k = 0; k <= steps; ++k) {
    const double w = (k == 0 || k == steps) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    acc.noalias() += w * X * X.transpose();
    X = Eh * X;
  }
  return symmetrize(acc * (h / 3.0));
}

}  // namespace tlmor
