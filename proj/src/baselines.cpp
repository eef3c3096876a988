#include "tlmor/baselines.hpp"

#include <algorithm>
#include <random>

namespace tlmor {

namespace {

MatrixXd sqrt_factor(const MatrixXd& G) {
  const MatrixXd Gs = 0.5 * (G + G.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(Gs);
  if (es.info() != Eigen::Success) throw DecompositionError("Gramian eigendecomposition failed");
  VectorXd lam = es.eigenvalues();
  const double floor = 1e-12 * std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
  for (Index i = 0; i < lam.size(); ++i) lam(i) = lam(i) > floor ? std::sqrt(lam(i)) : 0.0;
  return es.eigenvectors() * lam.asDiagonal();
}

VectorXcd sorted_spectrum(const MatrixXd& A) {
  VectorXcd ev = A.eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return ev;
}

VectorXcd sorted_points(const std::vector<Complex>& pts) {
  VectorXcd v(static_cast<Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) v(static_cast<Index>(i)) = pts[i];
  std::sort(v.data(), v.data() + v.size(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return v;
}

double rel_change(const VectorXcd& a, const VectorXcd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

StateSpace interpolatory_projection(const StateSpace& sys, const InterpolationData& d, double rank_tol) {
  const MatrixXcd rd = right_directions(d, sys.inputs());
  const MatrixXcd ld = left_directions(d, sys.outputs());
  const MatrixXd V = build_subspace(sys.A, sys.B, d.points, rd, Side::Input, rank_tol).basis;
  const MatrixXd W = build_subspace(sys.A, sys.C.transpose(), d.points, ld, Side::Output, rank_tol).basis;
  return petrov_galerkin(sys, V, W);
}

void check_order(const StateSpace& sys, Index r) {
  if (r < 1 || r > sys.order())
    throw InputError("reduced order " + std::to_string(r) + " must lie in [1, " + std::to_string(sys.order()) + "]");
}

}  // namespace

BalancingData balance(const MatrixXd& P, const MatrixXd& Q, Index r) {
  if (P.rows() != P.cols() || Q.rows() != Q.cols() || P.rows() != Q.rows())
    throw DimensionError("balance: Gramians must be square and of equal size");
  const Index n = P.rows();
  if (r < 1 || r > n) throw InputError("balance: order out of range");
  const MatrixXd Zp = sqrt_factor(P);
  const MatrixXd Zq = sqrt_factor(Q);
  Eigen::BDCSVD<MatrixXd> svd(Zq.transpose() * Zp, Eigen::ComputeThinU | Eigen::ComputeThinV);
  BalancingData bd;
  bd.hankel = svd.singularValues();
  const double floor = n * std::numeric_limits<double>::epsilon() * std::max(bd.hankel(0), 1e-300);
  Index rank = 0;
  while (rank < bd.hankel.size() && bd.hankel(rank) > floor) ++rank;
  if (rank < r) throw RankError("Gramian product has too few nonzero singular values for the requested order", rank);
  const VectorXd isq = bd.hankel.head(r).cwiseSqrt().cwiseInverse();
  bd.right = Zp * svd.matrixV().leftCols(r) * isq.asDiagonal();
  bd.left = Zq * svd.matrixU().leftCols(r) * isq.asDiagonal();
  return bd;
}

ReducedModel balanced_truncation(const StateSpace& sys, const MatrixXd& P, const MatrixXd& Q, Index r, Method tag,
                                 const TimeInterval& iv) {
  sys.validate();
  check_order(sys, r);
  const BalancingData bd = balance(P, Q, r);
  StateSpace rs;
  rs.A = bd.left.transpose() * sys.A * bd.right;
  rs.B = bd.left.transpose() * sys.B;
  rs.C = sys.C * bd.right;
  return ReducedModel(std::move(rs), tag, iv);
}

ReducedModel bt_reduce(const StateSpace& sys, Index r) {
  return balanced_truncation(sys, gramian(sys, GramianKind::Controllability), gramian(sys, GramianKind::Observability),
                             r, Method::BT, TimeInterval::infinite());
}

ReducedModel tlbt_reduce(const StateSpace& sys, Index r, const TimeInterval& iv) {
  return balanced_truncation(sys, tl_gramian(sys, iv, GramianKind::Controllability),
                             tl_gramian(sys, iv, GramianKind::Observability), r, Method::TLBT, iv);
}

ReducedModel atlbt_reduce(const StateSpace& sys, Index r, const TimeInterval& iv, const MatrixXd& P_approx,
                          const MatrixXd& Q_approx) {
  if (P_approx.rows() != sys.order() || Q_approx.rows() != sys.order())
    throw DimensionError("approximate Gramians do not match the system order");
  return balanced_truncation(sys, P_approx, Q_approx, r, Method::ATLBT, iv);
}

StateSpace petrov_galerkin(const StateSpace& sys, const MatrixXd& V, const MatrixXd& W) {
  if (V.rows() != sys.order() || W.rows() != sys.order() || V.cols() != W.cols())
    throw DimensionError("projection bases have inconsistent shapes");
  Eigen::PartialPivLU<MatrixXd> E(W.transpose() * V);
  if (!(E.rcond() > 1e-14)) throw DecompositionError("W^T V is numerically singular");
  StateSpace r;
  r.A = E.solve(W.transpose() * sys.A * V);
  r.B = E.solve(W.transpose() * sys.B);
  r.C = sys.C * V;
  return r;
}

InterpolationData interpolation_from_model(const StateSpace& rom) {
  const PoleResidue pr = pole_residue(rom);
  InterpolationData d;
  for (Index k = 0; k < pr.poles.size(); ++k) {
    const Complex lam = pr.poles(k);
    if (lam.real() == 0.0) throw PolePlacementError("reduced pole on the imaginary axis");
    d.points.push_back(lam.real() < 0 ? -lam : lam);
  }
  d.right_dirs = pr.right;
  d.left_dirs = pr.left;
  return d;
}

InterpolationData random_mirror_init(const StateSpace& sys, Index r, std::uint64_t seed) {
  sys.validate();
  const VectorXcd ev = sys.A.eigenvalues();
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (Index i = 0; i < ev.size(); ++i) {
    lo = std::min(lo, std::abs(ev(i).real()));
    hi = std::max(hi, std::abs(ev(i)));
  }
  if (!(lo > 0)) lo = hi > 0 ? 1e-3 * hi : 1.0;
  if (!(hi > lo)) hi = 10 * lo;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  std::normal_distribution<double> g;
  InterpolationData d;
  d.right_dirs.resize(sys.inputs(), r);
  d.left_dirs.resize(sys.outputs(), r);
  for (Index i = 0; i < r; ++i) {
    d.points.emplace_back(std::exp(u(rng)), 0.0);
    for (Index j = 0; j < sys.inputs(); ++j) d.right_dirs(j, i) = g(rng);
    for (Index j = 0; j < sys.outputs(); ++j) d.left_dirs(j, i) = g(rng);
  }
  return d;
}

IrkaResult irka_reduce(const StateSpace& sys, Index r, const InterpolationData& init, const IrkaOptions& opts) {
  sys.validate();
  check_order(sys, r);
  if (init.size() != r) throw InputError("initial data must have r points");
  init.validate(sys.inputs(), sys.outputs());
  IrkaResult res;
  InterpolationData data = init;
  bool have_model = false;
  for (int it = 1; it <= opts.maxiter; ++it) {
    try {
      StateSpace rom = interpolatory_projection(sys, data, opts.rank_tol);
      InterpolationData next = interpolation_from_model(rom);
      const double change = rel_change(sorted_points(next.points), sorted_points(data.points));
      res.rom = ReducedModel(std::move(rom), Method::IRKA, TimeInterval::infinite());
      have_model = true;
      res.iterations = it;
      res.changes.push_back(change);
      res.final_data = next;
      data = std::move(next);
      if (change < opts.tol) {
        res.converged = true;
        break;
      }
    } catch (const NumericalError&) {
      if (!have_model) throw;
      break;
    }
  }
  return res;
}

IrkaResult tlirka_reduce(const StateSpace& sys, Index r, const TimeInterval& iv, const InterpolationData& init,
                         const IrkaOptions& opts) {
  sys.validate();
  iv.validate();
  check_order(sys, r);
  if (init.size() != r) throw InputError("initial data must have r points");
  init.validate(sys.inputs(), sys.outputs());
  IrkaResult res;
  StateSpace rom = interpolatory_projection(sys, init, opts.rank_tol);
  VectorXcd spec = sorted_spectrum(rom.A);
  const MatrixXd At = sys.A.transpose();
  const MatrixXd Ct = sys.C.transpose();
  for (int it = 1; it <= opts.maxiter; ++it) {
    pole_residue(rom);  // throws on a defective iterate
    const MatrixXd F = tl_forcing(sys.A, rom.A.transpose(), sys.B, rom.B.transpose(), iv);
    const MatrixXd G = tl_forcing(At, rom.A, Ct, rom.C, iv);
    SylvesterSolver<double> sv(sys.A, rom.A.transpose());
    SylvesterSolver<double> sw(At, rom.A);
    const MatrixXd V = sv.solve(F);
    const MatrixXd W = sw.solve(G);
    res.residuals.push_back(std::max(sv.relative_residual(V, F), sw.relative_residual(W, G)));
    rom = petrov_galerkin(sys, orthonormalize(V, opts.rank_tol), orthonormalize(W, opts.rank_tol));
    const VectorXcd next = sorted_spectrum(rom.A);
    const double change = rel_change(next, spec);
    spec = next;
    res.iterations = it;
    res.changes.push_back(change);
    if (change < opts.tol) {
      res.converged = true;
      break;
    }
  }
  res.rom = ReducedModel(std::move(rom), Method::TLIRKA, iv);
  res.final_data = interpolation_from_model(res.rom);
  return res;
}

}  // namespace tlmor
