#include "tlmor/tlpork.hpp"

namespace tlmor {

namespace {

Complex window_weight(Complex sigma, double t) {
  if (t == 0.0) return 1.0;
  if (std::isinf(t)) return 0.0;
  return std::exp(-sigma * t);
}

// [e^{A t1} B, -e^{A t2} B]; the second block vanishes on an infinite window.
MatrixXd window_inputs(const StateSpace& sys, const TimeInterval& iv) {
  if (!iv.is_infinite()) return augment_inputs(sys, iv);
  MatrixXd BT = MatrixXd::Zero(sys.order(), 2 * sys.inputs());
  BT.leftCols(sys.inputs()) = expm_at(sys.A, iv.t1) * sys.B;
  return BT;
}

TlReduction tlpork_input(const StateSpace& sys, const InterpolationData& data, const TimeInterval& iv,
                         const TlOptions& opts, Method tag) {
  sys.validate();
  iv.validate();
  data.validate(sys.inputs(), std::nullopt);
  const Index m = sys.inputs(), r = data.size();
  const MatrixXcd chat = right_directions(data, m);

  const MatrixXd BT = window_inputs(sys, iv);
  MatrixXcd c(2 * m, r);
  for (Index i = 0; i < r; ++i) {
    c.col(i).head(m) = window_weight(data.points[i], iv.t1) * chat.col(i);
    c.col(i).tail(m) = window_weight(data.points[i], iv.t2) * chat.col(i);
  }
  const KrylovBasis kb = build_subspace(sys.A, BT, data.points, c, Side::Input, opts.rank_tol);
  const SubspaceBundle b = sylvester_data(sys.A, BT, kb, opts.source);

  TlReduction red;
  red.side = Side::Input;
  red.basis = b.basis;
  red.S = b.S;
  red.L_plus = b.L.topRows(m);
  red.L_minus = b.L.bottomRows(m);
  red.recovered = b.recovered;
  red.sylvester_residual = sylvester_residual(sys.A, BT, b);

  const MatrixXd W = red.L_plus.transpose() * red.L_plus - red.L_minus.transpose() * red.L_minus;
  red.gram_factor = pseudo_gramian(red.S, W, opts.definiteness_tol);
  const auto Qf = red.gram_factor.ldlt();

  // L_plus e^{S t1} is the undelayed direction block; it equals L_plus when t1 = 0.
  const MatrixXd Lhat = iv.starts_at_zero() ? red.L_plus : (red.L_plus * expm_at(red.S, iv.t1)).eval();
  StateSpace rs;
  rs.A = -Qf.solve(red.S.transpose() * red.gram_factor);
  rs.B = -Qf.solve(Lhat.transpose());
  rs.C = sys.C * red.basis;
  red.rom = ReducedModel(std::move(rs), tag, iv);
  red.rom.S = red.S;
  red.rom.L_right = red.L_plus;
  return red;
}

double rel_diff(const MatrixXd& a, const MatrixXd& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-300});
}

PseudoOptimalityReport verify_input(const StateSpace& sys, const ReducedModel& rom, const TimeInterval& iv,
                                    const MatrixXd* factor) {
  PseudoOptimalityReport rep;
  const CrossGramians cg = tl_cross_gramians(sys, rom, iv);
  const MatrixXd P = tl_gramian(sys, iv);
  const MatrixXd Pr = tl_gramian(rom, iv);
  rep.gramian_residual = rel_diff(rom.C * Pr, sys.C * cg.P);

  const double full = (sys.C * P * sys.C.transpose()).trace();
  const double cross = (sys.C * cg.P * rom.C.transpose()).trace();
  const double reduced = (rom.C * Pr * rom.C.transpose()).trace();
  rep.energy_defect = 2.0 * std::abs(cross - reduced) / std::max(full, 1e-300);

  const PoleResidue pr = pole_residue(rom);
  rep.tangential.resize(pr.poles.size());
  for (Index k = 0; k < pr.poles.size(); ++k) {
    const Complex s = -pr.poles(k);
    const MatrixXcd G = eval_G(sys, s, iv);
    const MatrixXcd Gr = eval_G(rom, s, iv);
    const VectorXcd rk = pr.right.col(k);
    const double scale = std::max(G.norm() * rk.norm(), 1e-300);
    rep.tangential(k) = ((G - Gr) * rk).norm() / scale;
  }
  if (factor) {
    const MatrixXd inv = factor->ldlt().solve(MatrixXd::Identity(factor->rows(), factor->cols()));
    rep.gramian_recovery = rel_diff(Pr, inv);
  }
  return rep;
}

}  // namespace

TlReduction tlpork_reduce(const StateSpace& sys, const InterpolationData& data, const TimeInterval& iv,
                          const TlOptions& opts) {
  return tlpork_input(sys, data, iv, opts, Method::TLPORK);
}

TlReduction otlpork_reduce(const StateSpace& sys, const InterpolationData& data, const TimeInterval& iv,
                           const TlOptions& opts) {
  sys.validate();
  data.validate(std::nullopt, sys.outputs());
  InterpolationData d{data.points, left_directions(data, sys.outputs()), MatrixXcd()};
  TlReduction red = tlpork_input(dual(sys), d, iv, opts, Method::OTLPORK);
  red.side = Side::Output;
  red.rom = transpose_model(red.rom);
  red.S.transposeInPlace();
  red.L_plus.transposeInPlace();
  red.L_minus.transposeInPlace();
  return red;
}

PseudoOptimalityReport verify_pseudo_optimality(const StateSpace& sys, const ReducedModel& rom,
                                                const TimeInterval& iv, Side side) {
  if (side == Side::Input) return verify_input(sys, rom, iv, nullptr);
  return verify_input(dual(sys), transpose_model(rom), iv, nullptr);
}

PseudoOptimalityReport verify_pseudo_optimality(const StateSpace& sys, const TlReduction& red) {
  if (red.side == Side::Input) return verify_input(sys, red.rom, red.rom.interval, &red.gram_factor);
  return verify_input(dual(sys), transpose_model(red.rom), red.rom.interval, &red.gram_factor);
}

InterpolationData mirror_modal_interp(const StateSpace& sys, const std::vector<Index>& selection, Side side) {
  const PoleResidue pr = pole_residue(sys);
  const Index n = pr.poles.size();
  if (selection.empty()) throw InputError("mirror selection is empty");
  std::vector<bool> chosen(n, false);
  for (Index k : selection) {
    if (k < 0 || k >= n) throw InputError("mirror selection index " + std::to_string(k) + " is out of range");
    if (chosen[k]) throw InputError("mirror selection repeats index " + std::to_string(k));
    chosen[k] = true;
  }
  for (Index k : selection) {
    const Complex lam = pr.poles(k);
    if (!(lam.real() < 0)) throw StabilityError("mirrored pole must be stable");
    if (lam.imag() == 0.0) continue;
    bool ok = false;
    for (Index j = 0; j < n; ++j)
      if (j != k && chosen[j] && pr.poles(j) == std::conj(lam)) ok = true;
    if (!ok) throw ClosureError("mirror selection is not closed under conjugation");
  }
  InterpolationData d;
  const MatrixXcd& res = side == Side::Input ? pr.right : pr.left;
  MatrixXcd dirs(res.rows(), static_cast<Index>(selection.size()));
  for (std::size_t i = 0; i < selection.size(); ++i) {
    d.points.push_back(-std::conj(pr.poles(selection[i])));
    dirs.col(static_cast<Index>(i)) = res.col(selection[i]).conjugate();
  }
  if (side == Side::Input) d.right_dirs = dirs;
  else d.left_dirs = dirs;
  return d;
}

}  // namespace tlmor
