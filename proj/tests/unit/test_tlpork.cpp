#include <doctest.h>

#include "../oracles.hpp"
#include "tlmor/baselines.hpp"
#include "tlmor/bench/generators.hpp"
#include "tlmor/gramnorm.hpp"
#include "tlmor/porkcure.hpp"
#include "tlmor/tlpork.hpp"

using namespace tlmor;

namespace {

double tf_gap(const StateSpace& a, const StateSpace& b, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(0.0, 3.0), im(-10.0, 10.0);
  double worst = 0;
  for (int k = 0; k < count; ++k) {
    const Complex s(re(rng), im(rng));
    worst = std::max(worst, oracle::relc(eval_tf(a, s), eval_tf(b, s)));
  }
  return worst;
}

double mirror_gap(const MatrixXd& A, const std::vector<Complex>& pts) {
  const Eigen::VectorXcd ev = A.eigenvalues();
  double gap = 0;
  for (Complex s : pts) {
    double best = 1e300;
    for (Index i = 0; i < ev.size(); ++i) best = std::min(best, std::abs(ev(i) + std::conj(s)));
    gap = std::max(gap, best / std::abs(s));
  }
  return gap;
}

double energy_defect_direct(const StateSpace& sys, const StateSpace& rom, const TimeInterval& iv) {
  const double h = std::pow(h2t_norm(sys, iv), 2), hr = std::pow(h2t_norm(rom, iv), 2);
  return std::abs(h - hr - h2t_error_terms(sys, rom, iv).squared_raw()) / h;
}

/// Largest sine of the principal angles between two column spans.
double subspace_gap(const MatrixXd& X, const MatrixXd& Y) {
  const MatrixXd Qx = orthonormalize(X), Qy = orthonormalize(Y);
  return (Qy - Qx * (Qx.transpose() * Qy)).norm();
}

}  // namespace

TEST_SUITE("tlpork") {
  TEST_CASE("scalar TLPORK") {
    const StateSpace s = oracle::scalar(-1, 1, 1);
    InterpolationData d;
    d.points = {Complex(1)};
    const TlReduction red = tlpork_reduce(s, d, TimeInterval::upto(1.0));
    const ReducedModel& r = red.rom;
    CHECK(r.A(0, 0) == doctest::Approx(-1.0));
    CHECK(r.C(0, 0) * r.B(0, 0) == doctest::Approx(1.0));
    // Realization-free form of Q_S = 0.4323324 with C_r = -0.4323324.
    CHECK(red.gram_factor(0, 0) / (r.C(0, 0) * r.C(0, 0)) == doctest::Approx(2.3130352).epsilon(1e-7));
    CHECK(red.rom.method == Method::TLPORK);
    CHECK(tf_gap(r, s, 10, 1) < 1e-12);
  }

  TEST_CASE("two-state energy identity") {
    InterpolationData d;
    d.points = {Complex(1)};
    const TlReduction red = tlpork_reduce(oracle::diag12(), d, TimeInterval::upto(1.0));
    CHECK(energy_defect_direct(oracle::diag12(), red.rom, TimeInterval::upto(1.0)) < 1e-10);
  }

  TEST_CASE("theorem properties on random systems") {
    for (unsigned seed = 1; seed <= 10; ++seed) {
      const Index m = seed % 2 ? 1 : 2;
      const StateSpace sys = bench::generate_random_stable(30, m, m, seed);
      const InterpolationData d = oracle::random_data(4, m, m, seed + 7);
      for (TimeInterval iv : {TimeInterval::upto(1.0), TimeInterval{0.5, 1.5}}) {
        const TlReduction in = tlpork_reduce(sys, d, iv);
        const TlReduction out = otlpork_reduce(sys, d, iv);
        for (const TlReduction* red : {&in, &out}) {
          const ReducedModel& r = red->rom;
          CHECK(mirror_gap(r.A, d.points) < 1e-8);
          CHECK(r.is_stable());
          const PseudoOptimalityReport rep = verify_pseudo_optimality(sys, *red);
          CHECK(rep.energy_defect < 1e-8);
          CHECK(rep.gramian_residual < 1e-8);
          CHECK(rep.gramian_recovery < 1e-8);
          CHECK(rep.tangential_max() < 1e-7);
          CHECK(energy_defect_direct(sys, r, iv) < 1e-8);
        }
        // Structure of the augmented input matrix: [e^{A t1} B, -e^{A t2} B] = -Q^{-1} [L+^T, -L-^T].
        const ReducedModel& r = in.rom;
        MatrixXd lhs(r.order(), 2 * m), xi(r.order(), 2 * m);
        lhs << expm_at(r.A, iv.t1) * r.B, -expm_at(r.A, iv.t2) * r.B;
        const auto Q = in.gram_factor.ldlt();
        xi << -Q.solve(in.L_plus.transpose()), Q.solve(in.L_minus.transpose());
        CHECK(oracle::rel(lhs, xi) < 1e-10);
        // Output side: [C e^{A t1}; -C e^{A t2}] = -[B+^T; -B-^T] P^{-1}.
        const ReducedModel& o = out.rom;
        MatrixXd top(2 * m, o.order()), eta(2 * m, o.order());
        top << o.C * expm_at(o.A, iv.t1), -o.C * expm_at(o.A, iv.t2);
        const auto P = out.gram_factor.ldlt();
        eta << -MatrixXd(P.solve(out.L_plus)).transpose(), MatrixXd(P.solve(out.L_minus)).transpose();
        CHECK(oracle::rel(top, eta) < 1e-10);
      }
    }
  }

  TEST_CASE("single-input equivalence of the two sides") {
    const StateSpace sys = bench::generate_random_stable(20, 1, 1, 3);
    const InterpolationData d = oracle::random_data(4, 1, 1, 4);
    const TimeInterval iv = TimeInterval::upto(1.0);
    CHECK(tf_gap(tlpork_reduce(sys, d, iv).rom, otlpork_reduce(sys, d, iv).rom, 10, 2) < 1e-10);
  }

  TEST_CASE("long windows approach PORK") {
    for (Index m : {1, 2}) {
      const StateSpace sys = bench::generate_random_stable(20, m, m, 5);
      const InterpolationData d = oracle::random_data(4, m, m, 6);
      const double t2 = 50.0 / std::abs(sys.spectral_abscissa());
      CHECK(tf_gap(tlpork_reduce(sys, d, TimeInterval::upto(t2)).rom, pork_reduce(sys, d), 20, 3) < 1e-6);
      CHECK(tf_gap(otlpork_reduce(sys, d, TimeInterval::upto(t2)).rom, pork_reduce(sys, d, Side::Output), 20, 4) <
            1e-6);
      CHECK(tf_gap(tlpork_reduce(sys, d, TimeInterval::infinite()).rom, pork_reduce(sys, d), 20, 5) < 1e-8);
    }
  }

  TEST_CASE("basis relation to the infinite-horizon basis") {
    const StateSpace sys = bench::generate_random_stable(15, 2, 2, 8);
    const InterpolationData d = oracle::random_data(4, 2, 2, 9);
    const TimeInterval iv = TimeInterval::upto(0.8);
    const TlReduction red = tlpork_reduce(sys, d, iv);
    // V_r solves A V - V S - B L+ = 0 with the same (S, L+).
    const MatrixXd Vr = solve_sylv(sys.A, MatrixXd(-red.S), MatrixXd(-sys.B * red.L_plus));
    const MatrixXd Vt = Vr - expm_at(sys.A, iv.t2) * Vr * expm_at(MatrixXd(-red.S), iv.t2);
    CHECK(subspace_gap(red.basis, Vt) < 1e-8);
  }

  TEST_CASE("realization independence of the defects") {
    const StateSpace sys = bench::generate_random_stable(12, 1, 1, 10);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    MatrixXd T(12, 12);
    for (Index i = 0; i < T.size(); ++i) T.data()[i] = g(rng);
    T += 5 * MatrixXd::Identity(12, 12);
    const StateSpace st = similarity(sys, T);
    const InterpolationData d = oracle::random_data(3, 1, 1, 11);
    const TimeInterval iv = TimeInterval::upto(1.0);
    const TlReduction a = tlpork_reduce(sys, d, iv), b = tlpork_reduce(st, d, iv);
    CHECK(tf_gap(a.rom, b.rom, 10, 6) < 1e-8);
    const auto ra = verify_pseudo_optimality(sys, a), rb = verify_pseudo_optimality(st, b);
    CHECK(ra.energy_defect < 1e-8);
    CHECK(rb.energy_defect < 1e-8);
    CHECK(rb.gramian_residual < 1e-8);
  }

  TEST_CASE("verification of the full model and negative control") {
    const StateSpace sys = bench::generate_random_stable(10, 1, 1, 1);
    const TimeInterval iv = TimeInterval::upto(1.0);
    const ReducedModel self(sys, Method::BT, iv);
    const PseudoOptimalityReport rs = verify_pseudo_optimality(sys, self, iv, Side::Input);
    CHECK(rs.energy_defect < 1e-10);
    CHECK(rs.gramian_residual < 1e-10);
    CHECK(rs.tangential_max() < 1e-10);

    // TLBT with one state on a two-pole model fails the conditions by a wide margin.
    const ReducedModel tlbt = tlbt_reduce(oracle::diag12(), 1, iv);
    const PseudoOptimalityReport rc = verify_pseudo_optimality(oracle::diag12(), tlbt, iv, Side::Input);
    CHECK(rc.tangential_max() > 1e-4);
    CHECK(rc.gramian_residual > 1e-4);
  }

  TEST_CASE("mirror modal interpolation") {
    const StateSpace s = oracle::diag12();
    const InterpolationData d = mirror_modal_interp(s, {0, 1}, Side::Input);
    CHECK(d.size() == 2);
    const TlReduction red = tlpork_reduce(s, d, TimeInterval::upto(1.0));
    CHECK(mirror_gap(red.rom.A, {Complex(1), Complex(2)}) < 1e-10);
    CHECK(tf_gap(red.rom, s, 10, 7) < 1e-8);

    const StateSpace sys = bench::generate_random_stable(8, 2, 2, 3);
    const PoleResidue pr = pole_residue(sys);
    Index cpx = -1;
    for (Index k = 0; k < pr.poles.size(); ++k)
      if (pr.poles(k).imag() > 0) cpx = k;
    REQUIRE(cpx >= 0);
    CHECK_THROWS_AS(mirror_modal_interp(sys, {cpx}, Side::Input), ClosureError);

    // Both sides keep the selected poles.
    std::vector<Index> sel;
    for (Index k = 0; k < pr.poles.size() && sel.size() < 2; ++k)
      if (pr.poles(k).imag() == 0.0) sel.push_back(k);
    REQUIRE(sel.size() == 2);
    std::vector<Complex> mirrored;
    for (Index k : sel) mirrored.push_back(-std::conj(pr.poles(k)));
    const TimeInterval iv = TimeInterval::upto(1.0);
    const ReducedModel ri = tlpork_reduce(sys, mirror_modal_interp(sys, sel, Side::Input), iv).rom;
    const ReducedModel ro = otlpork_reduce(sys, mirror_modal_interp(sys, sel, Side::Output), iv).rom;
    CHECK(mirror_gap(ri.A, mirrored) < 1e-9);
    CHECK(mirror_gap(ro.A, mirrored) < 1e-9);
  }
}
