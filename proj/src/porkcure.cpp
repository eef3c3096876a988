#include "tlmor/porkcure.hpp"


namespace tlmor {

double observability_margin(const MatrixXd& S, const MatrixXd& L) {
  const Index r = S.rows(), k = L.rows();
  if (r == 0) return 1.0;
  const double scale = std::max(S.norm() + L.norm(), 1e-300);
  const VectorXcd mu = S.eigenvalues();
  double margin = std::numeric_limits<double>::infinity();
  MatrixXcd M(r + k, r);
  for (Index i = 0; i < r; ++i) {
    M.topRows(r) = S.cast<Complex>();
    M.topRows(r).diagonal().array() -= mu(i);
    M.bottomRows(k) = L.cast<Complex>();
    Eigen::JacobiSVD<MatrixXcd> svd(M);
    margin = std::min(margin, svd.singularValues()(r - 1) / scale);
  }
  return margin;
}

MatrixXd pseudo_gramian(const MatrixXd& S, const MatrixXd& W, double definiteness_tol) {
  MatrixXd Q = solve_lyap((-S.transpose()).eval(), W);
  Q = 0.5 * (Q + Q.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(Q, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  if (!(lmin > definiteness_tol * lmax))
    throw PseudoOptimalityError("reduced Gramian factor is not positive definite", lmin);
  return Q;
}

namespace {

// Below this reciprocal condition the inverse no longer yields a pseudo-optimal output map.
constexpr double kWindowRcond = 1e-12;

ReducedModel pork_input(const StateSpace& sys, const InterpolationData& data, const PorkOptions& opts) {
  sys.validate();
  data.validate(sys.inputs(), std::nullopt);
  const MatrixXcd dirs = right_directions(data, sys.inputs());
  const KrylovBasis kb = build_subspace(sys.A, sys.B, data.points, dirs, Side::Input, opts.rank_tol);
  const SubspaceBundle b = sylvester_data(sys.A, sys.B, kb, opts.source);
  const double margin = observability_margin(b.S, b.L);
  if (!(margin > opts.observability_tol))
    throw PseudoOptimalityError("Sylvester pair (S, L) is not observable", margin);
  const MatrixXd Q = pseudo_gramian(b.S, b.L.transpose() * b.L, opts.definiteness_tol);
  const auto Qf = Q.ldlt();
  StateSpace r;
  r.A = -Qf.solve(b.S.transpose() * Q);
  r.B = -Qf.solve(b.L.transpose());
  r.C = sys.C * b.basis;
  ReducedModel rom(std::move(r), Method::PORK, TimeInterval::infinite());
  rom.S = b.S;
  rom.L_right = b.L;
  return rom;
}

}  // namespace

ReducedModel transpose_model(const ReducedModel& rom) {
  ReducedModel t = rom;
  t.A = rom.A.transpose();
  t.B = rom.C.transpose();
  t.C = rom.B.transpose();
  t.S = rom.S.transpose();
  t.L_left = rom.L_right.transpose();
  t.L_right = rom.L_left.transpose();
  return t;
}

ReducedModel pork_reduce(const StateSpace& sys, const InterpolationData& data, Side side, const PorkOptions& opts) {
  if (side == Side::Input) return pork_input(sys, data, opts);
  sys.validate();
  data.validate(std::nullopt, sys.outputs());
  InterpolationData d{data.points, left_directions(data, sys.outputs()), MatrixXcd()};
  return transpose_model(pork_input(dual(sys), d, opts));
}

CumulativeReducer::CumulativeReducer(StateSpace sys, TimeInterval iv, PorkOptions opts)
    : sys_(std::move(sys)), iv_(iv), opts_(opts) {
  sys_.validate();
  iv_.validate();
  if (!iv_.starts_at_zero()) E1_ = expm_at(sys_.A, iv_.t1);
  if (!iv_.is_infinite()) E2_ = expm_at(sys_.A, iv_.t2);
  const Index n = sys_.order(), m = sys_.inputs();
  st_.S_tot = MatrixXd(0, 0);
  st_.L_tot = MatrixXd(m, 0);
  st_.B_bar = MatrixXd(0, m);
  st_.V_tot = MatrixXd(n, 0);
  st_.P_tot = MatrixXd(0, 0);
  st_.B_perp = sys_.B;
}

ReducedModel CumulativeReducer::step(const InterpolationData& data) {
  const int k = st_.step + 1;
  const Index m = sys_.inputs();
  SubspaceBundle b;
  MatrixXd Q;
  try {
    data.validate(m, std::nullopt);
    const MatrixXcd dirs = right_directions(data, m);
    const KrylovBasis kb = build_subspace(sys_.A, st_.B_perp, data.points, dirs, Side::Input, opts_.rank_tol);
    b = sylvester_data(sys_.A, st_.B_perp, kb, opts_.source);
    const double margin = observability_margin(b.S, b.L);
    if (!(margin > opts_.observability_tol))
      throw PseudoOptimalityError("step pair (S, L) is not observable", margin);
    Q = pseudo_gramian(b.S, b.L.transpose() * b.L, opts_.definiteness_tol);
  } catch (const NumericalError& e) {
    throw AccumulationError(e.what(), k);
  }
  const Index rho = st_.order(), r = b.S.rows();
  const auto Qf = Q.ldlt();
  const MatrixXd xi = -Qf.solve(b.L.transpose());  // r x m

  MatrixXd S_new = MatrixXd::Zero(rho + r, rho + r);
  S_new.topLeftCorner(rho, rho) = st_.S_tot;
  S_new.topRightCorner(rho, r) = -st_.B_bar * b.L;
  S_new.bottomRightCorner(r, r) = b.S;
  MatrixXd L_new(m, rho + r);
  L_new << st_.L_tot, b.L;
  MatrixXd B_new(rho + r, m);
  B_new << st_.B_bar, xi;
  MatrixXd V_new(sys_.order(), rho + r);
  V_new << st_.V_tot, b.basis;
  MatrixXd P_new = MatrixXd::Zero(rho + r, rho + r);
  P_new.topLeftCorner(rho, rho) = st_.P_tot;
  P_new.bottomRightCorner(r, r) = Qf.solve(MatrixXd::Identity(r, r));
  P_new.bottomRightCorner(r, r) = 0.5 * (P_new.bottomRightCorner(r, r) + P_new.bottomRightCorner(r, r).transpose()).eval();

  st_.S_tot = std::move(S_new);
  st_.L_tot = std::move(L_new);
  st_.B_bar = std::move(B_new);
  st_.V_tot = std::move(V_new);
  st_.P_tot = std::move(P_new);
  st_.B_perp -= b.basis * xi;
  st_.Q_blocks.push_back(Q);
  st_.step = k;
  try {
    return current();
  } catch (const NumericalError& e) {
    throw AccumulationError(e.what(), k);
  }
}

MatrixXd CumulativeReducer::windowed_basis() const {
  const MatrixXd& V = st_.V_tot;
  const MatrixXd& S = st_.S_tot;
  MatrixXd Vt = iv_.starts_at_zero() ? V : (E1_ * V * expm_at((-S).eval(), iv_.t1)).eval();
  if (!iv_.is_infinite()) Vt -= E2_ * V * expm_at((-S).eval(), iv_.t2);
  return Vt;
}

MatrixXd CumulativeReducer::windowed_factor() const {
  const Index rho = st_.order();
  if (rho == 0) return MatrixXd(0, 0);
  if (iv_.is_infinite() && iv_.starts_at_zero()) return st_.P_tot;
  MatrixXd Xinf = MatrixXd::Zero(rho, rho);
  Index off = 0;
  for (const auto& Qi : st_.Q_blocks) {
    Xinf.block(off, off, Qi.rows(), Qi.rows()) = Qi;
    off += Qi.rows();
  }
  const MatrixXd mS = -st_.S_tot;
  const MatrixXd E1 = expm_at(mS, iv_.t1);
  MatrixXd X = E1.transpose() * Xinf * E1;
  if (!iv_.is_infinite()) {
    const MatrixXd E2 = expm_at(mS, iv_.t2);
    X -= E2.transpose() * Xinf * E2;
  }
  X = 0.5 * (X + X.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(X, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) throw PseudoOptimalityError("windowed reduced Gramian is not positive definite", lo);
  if (!(lo > kWindowRcond * hi)) throw ConditioningError("windowed reduced Gramian is numerically singular", hi / lo);
  MatrixXd P = X.ldlt().solve(MatrixXd::Identity(rho, rho));
  return 0.5 * (P + P.transpose());
}

ReducedModel CumulativeReducer::current() const {
  StateSpace r;
  r.A = -st_.S_tot.transpose();
  r.B = -st_.L_tot.transpose();
  r.C = sys_.C * windowed_basis() * windowed_factor();
  const bool full = iv_.is_infinite() && iv_.starts_at_zero();
  ReducedModel rom(std::move(r), full ? Method::CURE : Method::TLCURE, iv_);
  rom.S = st_.S_tot;
  rom.L_right = st_.L_tot;
  return rom;
}

CureResult cure_run(const StateSpace& sys, const std::vector<InterpolationData>& schedule, const PorkOptions& opts) {
  CumulativeReducer red(sys, TimeInterval::infinite(), opts);
  CureResult res;
  for (const auto& batch : schedule) res.roms.push_back(red.step(batch));
  res.state = red.state();
  return res;
}

}  // namespace tlmor
