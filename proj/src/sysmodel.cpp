#include "tlmor/sysmodel.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

namespace tlmor {

StateSpace::StateSpace(MatrixXd A_, MatrixXd B_, MatrixXd C_)
    : A(std::move(A_)), B(std::move(B_)), C(std::move(C_)) {
  validate();
}

void StateSpace::validate() const {
  detail::require_square(A, "A");
  if (B.rows() != A.rows())
    throw DimensionError("B has " + std::to_string(B.rows()) + " rows, expected " + std::to_string(A.rows()));
  if (C.cols() != A.rows())
    throw DimensionError("C has " + std::to_string(C.cols()) + " columns, expected " + std::to_string(A.rows()));
  detail::require_finite(A, "A");
  detail::require_finite(B, "B");
  detail::require_finite(C, "C");
}

double StateSpace::spectral_abscissa() const {
  if (order() == 0) return -std::numeric_limits<double>::infinity();
  return A.eigenvalues().real().maxCoeff();
}

bool StateSpace::is_stable(double margin) const { return spectral_abscissa() < -margin; }

namespace {
constexpr std::pair<Method, std::string_view> kMethodNames[] = {
    {Method::PORK, "PORK"},     {Method::TLPORK, "TLPORK"}, {Method::OTLPORK, "OTLPORK"},
    {Method::BT, "BT"},         {Method::TLBT, "TLBT"},     {Method::ATLBT, "ATLBT"},
    {Method::IRKA, "IRKA"},     {Method::TLIRKA, "TLIRKA"}, {Method::CURE, "CURE"},
    {Method::TLCURE, "TLCURE"}};
}

std::string_view to_string(Method m) {
  for (const auto& [k, v] : kMethodNames)
    if (k == m) return v;
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  up.erase(std::remove(up.begin(), up.end(), '-'), up.end());
  for (const auto& [k, v] : kMethodNames)
    if (v == up) return k;
  return std::nullopt;
}

std::vector<Method> all_methods() {
  std::vector<Method> out;
  for (const auto& [k, v] : kMethodNames) out.push_back(k);
  return out;
}

void TimeInterval::validate() const {
  if (!std::isfinite(t1) || t1 < 0.0) throw InputError("interval start must be finite and >= 0");
  if (std::isnan(t2) || !(t2 > t1)) throw InputError("interval end must exceed its start");
}

Index InterpolationData::conjugate_partner(Index i, const MatrixXcd& dirs, double tol) const {
  const Complex s = points[i];
  const bool have_dirs = dirs.cols() > 0;
  const double sscale = std::max(std::abs(s), 1.0);
  const bool real_point = std::abs(s.imag()) <= tol * sscale;
  const bool real_dir = !have_dirs || dirs.col(i).imag().norm() <= tol * std::max(dirs.col(i).norm(), 1e-300);
  if (real_point && real_dir) return i;
  for (Index j = 0; j < size(); ++j) {
    if (j == i) continue;
    if (std::abs(points[j] - std::conj(s)) > tol * sscale) continue;
    if (have_dirs && (dirs.col(j) - dirs.col(i).conjugate()).norm() > tol * std::max(dirs.col(i).norm(), 1e-300))
      continue;
    return j;
  }
  return -1;
}

void InterpolationData::validate(std::optional<Index> m, std::optional<Index> p) const {
  const Index r = size();
  if (r == 0) throw InputError("interpolation data is empty");
  for (Index i = 0; i < r; ++i) {
    const Complex s = points[i];
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) throw NonFiniteError("interpolation point is not finite");
    if (!(s.real() > 0.0)) throw InputError("interpolation points must have positive real part");
  }
  auto check_dirs = [&](const MatrixXcd& D, std::optional<Index> dim, const char* name) {
    if (D.cols() == 0) return;
    if (D.cols() != r) throw DimensionError(std::string(name) + " directions: expected " + std::to_string(r) + " columns");
    if (dim && D.rows() != *dim)
      throw DimensionError(std::string(name) + " directions: expected " + std::to_string(*dim) + " rows");
    detail::require_finite(D, name);
    for (Index i = 0; i < r; ++i)
      if (D.col(i).norm() == 0.0) throw InputError(std::string(name) + " direction " + std::to_string(i) + " is zero");
  };
  check_dirs(right_dirs, m, "right");
  check_dirs(left_dirs, p, "left");
  auto check_closure = [&](const MatrixXcd& D) {
    std::vector<bool> used(r, false);
    for (Index i = 0; i < r; ++i) {
      if (used[i]) continue;
      const Index j = conjugate_partner(i, D);
      if (j < 0 || (j != i && used[j]))
        throw ClosureError("interpolation data is not closed under conjugation at entry " + std::to_string(i));
      used[i] = true;
      used[j] = true;
    }
  };
  check_closure(right_dirs);
  check_closure(left_dirs);
}

MatrixXcd right_directions(const InterpolationData& data, Index m) {
  if (data.has_right()) return data.right_dirs;
  if (m == 1) return MatrixXcd::Ones(1, data.size());
  throw InputError("right tangential directions are required for a multi-input system");
}

MatrixXcd left_directions(const InterpolationData& data, Index p) {
  if (data.has_left()) return data.left_dirs;
  if (p == 1) return MatrixXcd::Ones(1, data.size());
  throw InputError("left tangential directions are required for a multi-output system");
}

ReducedModel::ReducedModel(StateSpace sys, Method m, TimeInterval iv)
    : StateSpace(std::move(sys)), method(m), interval(iv) {
  stable = order() == 0 || is_stable();
}

MatrixXcd eval_tf(const StateSpace& sys, Complex s) {
  if (sys.order() == 0) return MatrixXcd::Zero(sys.outputs(), sys.inputs());
  return sys.C.cast<Complex>() * shifted_solve(sys.A, s, sys.B);
}

TransferEvaluator::TransferEvaluator(const StateSpace& sys) {
  sys.validate();
  if (sys.order() == 0) {
    H_ = MatrixXd(0, 0);
    Bt_ = MatrixXd(0, sys.inputs());
    Ct_ = MatrixXd(sys.outputs(), 0);
    return;
  }
  Eigen::HessenbergDecomposition<MatrixXd> hd(sys.A);
  H_ = hd.matrixH();
  const MatrixXd Q = hd.matrixQ();
  Bt_ = Q.transpose() * sys.B;
  Ct_ = sys.C * Q;
}

MatrixXcd TransferEvaluator::operator()(Complex s) const {
  const Index n = H_.rows();
  if (n == 0) return MatrixXcd::Zero(Ct_.rows(), Bt_.cols());
  MatrixXcd M = -H_.cast<Complex>();
  M.diagonal().array() += s;
  MatrixXcd X = Bt_.cast<Complex>();
  // Gaussian elimination with adjacent-row pivoting on the Hessenberg matrix.
  for (Index k = 0; k + 1 < n; ++k) {
    if (std::abs(M(k + 1, k)) > std::abs(M(k, k))) {
      M.block(k, k, 1, n - k).swap(M.block(k + 1, k, 1, n - k));
      X.row(k).swap(X.row(k + 1));
    }
    if (M(k, k) == Complex(0)) throw SingularShiftError("evaluation point is a pole");
    const Complex l = M(k + 1, k) / M(k, k);
    if (l != Complex(0)) {
      M.block(k + 1, k, 1, n - k) -= l * M.block(k, k, 1, n - k);
      X.row(k + 1) -= l * X.row(k);
    }
  }
  if (M(n - 1, n - 1) == Complex(0)) throw SingularShiftError("evaluation point is a pole");
  M.triangularView<Eigen::Upper>().solveInPlace(X);
  return Ct_.cast<Complex>() * X;
}

PoleResidue pole_residue(const StateSpace& sys, double gap_tol) {
  sys.validate();
  const Index n = sys.order();
  PoleResidue pr;
  if (n == 0) return pr;
  Eigen::EigenSolver<MatrixXd> es(sys.A, true);
  if (es.info() != Eigen::Success) throw DecompositionError("eigendecomposition did not converge");
  const VectorXcd lam = es.eigenvalues();
  const MatrixXcd X0 = es.eigenvectors();

  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double scale = std::max({std::abs(lam(i)), std::abs(lam(j)), 1e-300});
      if (std::abs(lam(i) - lam(j)) < gap_tol * scale)
        throw DecompositionError("repeated eigenvalues: spectrum is treated as defective");
    }

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (lam(a).real() != lam(b).real()) return lam(a).real() > lam(b).real();
    if (std::abs(lam(a).imag()) != std::abs(lam(b).imag())) return std::abs(lam(a).imag()) < std::abs(lam(b).imag());
    return lam(a).imag() > lam(b).imag();
  });

  pr.poles.resize(n);
  pr.eigenvectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    pr.poles(k) = lam(order[k]);
    pr.eigenvectors.col(k) = X0.col(order[k]).normalized();
  }
  // Real eigenvalues get real vectors; conjugate pairs get conjugate vectors.
  for (Index k = 0; k < n; ++k) {
    if (pr.poles(k).imag() == 0.0) {
      Index imax;
      pr.eigenvectors.col(k).cwiseAbs().maxCoeff(&imax);
      const Complex ph = pr.eigenvectors(imax, k) / std::abs(pr.eigenvectors(imax, k));
      pr.eigenvectors.col(k) = (pr.eigenvectors.col(k) / ph).real().cast<Complex>().normalized();
    } else if (pr.poles(k).imag() > 0.0 && k + 1 < n) {
      pr.poles(k + 1) = std::conj(pr.poles(k));
      pr.eigenvectors.col(k + 1) = pr.eigenvectors.col(k).conjugate();
    }
  }
  Eigen::PartialPivLU<MatrixXcd> lu(pr.eigenvectors);
  if (!(lu.rcond() > 1e-14)) throw DecompositionError("eigenvector matrix is numerically singular");
  const MatrixXcd XinvB = lu.solve(sys.B.cast<Complex>());
  pr.right = XinvB.transpose();
  pr.left = sys.C.cast<Complex>() * pr.eigenvectors;
  return pr;
}

std::vector<MatrixXd> step_response(const StateSpace& sys, const std::vector<double>& grid) {
  sys.validate();
  const Index n = sys.order(), m = sys.inputs(), p = sys.outputs();
  std::vector<MatrixXd> out;
  out.reserve(grid.size());
  if (n == 0) {
    out.assign(grid.size(), MatrixXd::Zero(p, m));
    return out;
  }
  Eigen::PartialPivLU<MatrixXd> lu(sys.A);
  const bool nonsingular = lu.rcond() > 1e-12;
  MatrixXd aug;
  if (!nonsingular) {
    aug = MatrixXd::Zero(n + m, n + m);
    aug.topLeftCorner(n, n) = sys.A;
    aug.topRightCorner(n, m) = sys.B;
  }
  for (double t : grid) {
    if (!std::isfinite(t) || t < 0) throw InputError("step response grid must be finite and non-negative");
    if (t == 0.0) {
      out.push_back(MatrixXd::Zero(p, m));
    } else if (nonsingular) {
      const MatrixXd E = expm((sys.A * t).eval());
      out.push_back(sys.C * lu.solve((E * sys.B - sys.B).eval()));
    } else {
      const MatrixXd E = expm((aug * t).eval());
      out.push_back(sys.C * E.topRightCorner(n, m));
    }
  }
  return out;
}

MatrixXd expm_at(const MatrixXd& A, double t) {
  const Index n = A.rows();
  if (t == 0.0) return MatrixXd::Identity(n, n);
  if (std::isinf(t)) return MatrixXd::Zero(n, n);
  return expm((A * t).eval());
}

MatrixXcd eval_G(const StateSpace& sys, Complex s, const TimeInterval& iv) {
  iv.validate();
  const Index n = sys.order();
  if (n == 0) return MatrixXcd::Zero(sys.outputs(), sys.inputs());
  ShiftedSolver solver(sys.A, s);
  const MatrixXcd Cc = sys.C.cast<Complex>();
  MatrixXcd G;
  if (iv.starts_at_zero()) {
    G = Cc * solver.solve(sys.B);
  } else {
    G = std::exp(-s * iv.t1) * (Cc * solver.solve((expm_at(sys.A, iv.t1) * sys.B).eval()));
  }
  if (!iv.is_infinite())
    G -= std::exp(-s * iv.t2) * (Cc * solver.solve((expm_at(sys.A, iv.t2) * sys.B).eval()));
  return G;
}

MatrixXcd eval_G(const StateSpace& sys, Complex s, double t) {
  if (t == 0.0) return MatrixXcd::Zero(sys.outputs(), sys.inputs());
  return eval_G(sys, s, TimeInterval::upto(t));
}

MatrixXd augment_inputs(const StateSpace& sys, const TimeInterval& iv) {
  iv.validate();
  if (iv.is_infinite()) throw InputError("augmented inputs need a finite window");
  const Index n = sys.order(), m = sys.inputs();
  MatrixXd BT(n, 2 * m);
  BT.leftCols(m) = iv.starts_at_zero() ? sys.B : (expm_at(sys.A, iv.t1) * sys.B).eval();
  BT.rightCols(m) = -expm_at(sys.A, iv.t2) * sys.B;
  return BT;
}

MatrixXd augment_outputs(const StateSpace& sys, const TimeInterval& iv) {
  return augment_inputs(dual(sys), iv).transpose();
}

StateSpace dual(const StateSpace& sys) {
  StateSpace d;
  d.A = sys.A.transpose();
  d.B = sys.C.transpose();
  d.C = sys.B.transpose();
  return d;
}

StateSpace similarity(const StateSpace& sys, const MatrixXd& T) {
  if (T.rows() != sys.order() || T.cols() != sys.order()) throw DimensionError("similarity transform has wrong size");
  Eigen::PartialPivLU<MatrixXd> lu(T);
  if (!(lu.rcond() > 1e-14)) throw NumericalError("similarity transform is singular");
  return StateSpace(lu.solve(sys.A * T), lu.solve(sys.B), sys.C * T);
}

}  // namespace tlmor
