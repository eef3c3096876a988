#include <doctest.h>

#include "../oracles.hpp"
#include "tlmor/bench/generators.hpp"
#include "tlmor/sysmodel.hpp"

using namespace tlmor;

TEST_SUITE("sysmodel") {
  TEST_CASE("state-space validation") {
    CHECK_THROWS_AS(StateSpace(MatrixXd::Zero(2, 2), MatrixXd::Zero(3, 1), MatrixXd::Zero(1, 2)).validate(),
                    DimensionError);
    StateSpace s = oracle::scalar(-1, 1, 1);
    s.B(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(s.validate(), NonFiniteError);
    CHECK(oracle::scalar(-1, 1, 1).is_stable());
    CHECK_FALSE(oracle::scalar(-1e-13, 1, 1).is_stable());
  }

  TEST_CASE("method names") {
    CHECK(parse_method("o-tlpork") == Method::OTLPORK);
    CHECK(parse_method("A-TLBT") == Method::ATLBT);
    CHECK(parse_method("tlcure") == Method::TLCURE);
    CHECK_FALSE(parse_method("balanced").has_value());
    for (Method m : all_methods()) CHECK(parse_method(to_string(m)) == m);
  }

  TEST_CASE("interpolation data validation") {
    InterpolationData d;
    d.points = {Complex(1, 1)};
    d.right_dirs = MatrixXcd::Ones(1, 1);
    CHECK_THROWS_AS(d.validate(1), ClosureError);
    d.points = {Complex(1, 1), Complex(1, -1)};
    d.right_dirs = MatrixXcd::Ones(1, 2);
    CHECK_NOTHROW(d.validate(1));
    d.right_dirs(0, 1) = Complex(0, 1);
    CHECK_THROWS_AS(d.validate(1), ClosureError);
    d.points = {Complex(-1, 0)};
    d.right_dirs = MatrixXcd::Ones(1, 1);
    CHECK_THROWS_AS(d.validate(1), InputError);
    d.points = {Complex(1, 0)};
    d.right_dirs = MatrixXcd::Zero(1, 1);
    CHECK_THROWS_AS(d.validate(1), InputError);
    d.right_dirs = MatrixXcd::Ones(2, 1);
    CHECK_THROWS_AS(d.validate(1), DimensionError);
  }

  TEST_CASE("interval validation") {
    CHECK_THROWS_AS((TimeInterval{1.0, 1.0}.validate()), InputError);
    CHECK_THROWS_AS((TimeInterval{-1.0, 1.0}.validate()), InputError);
    CHECK(TimeInterval::infinite().is_infinite());
  }

  TEST_CASE("transfer function examples") {
    const StateSpace s = oracle::scalar(-1, 1, 1);
    CHECK(eval_tf(s, 0.0)(0, 0).real() == doctest::Approx(1.0));
    CHECK(eval_tf(s, 1.0)(0, 0).real() == doctest::Approx(0.5));
    CHECK(eval_tf(oracle::diag12(), 0.0)(0, 0).real() == doctest::Approx(1.5));
    CHECK_THROWS_AS(eval_tf(s, -1.0), SingularShiftError);
  }

  TEST_CASE("Hessenberg evaluator agrees with the dense solve") {
    const StateSpace sys = bench::generate_random_stable(25, 2, 3, 4);
    const TransferEvaluator ev(sys);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int k = 0; k < 20; ++k) {
      const Complex s(u(rng), u(rng));
      CHECK(oracle::relc(ev(s), oracle::transfer(sys, s)) < 1e-10);
      CHECK(oracle::relc(eval_tf(sys, s), oracle::transfer(sys, s)) < 1e-10);
    }
  }

  TEST_CASE("pole-residue form") {
    const PoleResidue p1 = pole_residue(oracle::scalar(-1, 2, 3));
    CHECK(std::abs(p1.poles(0) - Complex(-1)) < 1e-15);
    CHECK(std::abs(p1.left(0, 0) * p1.right(0, 0) - Complex(6)) < 1e-14);

    const PoleResidue p2 = pole_residue(oracle::diag12());
    for (Index k = 0; k < 2; ++k) CHECK(std::abs(p2.left(0, k) * p2.right(0, k) - Complex(1)) < 1e-14);

    const StateSpace sys = bench::generate_random_stable(6, 2, 2, 13);
    const PoleResidue pr = pole_residue(sys);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int k = 0; k < 10; ++k) {
      const Complex s(u(rng), u(rng));
      MatrixXcd H = MatrixXcd::Zero(2, 2);
      for (Index j = 0; j < pr.poles.size(); ++j) H += pr.left.col(j) * pr.right.col(j).transpose() / (s - pr.poles(j));
      CHECK(oracle::relc(H, eval_tf(sys, s)) < 1e-8);
    }
  }

  TEST_CASE("pole-residue rejects repeated poles") {
    const StateSpace s(-MatrixXd::Identity(2, 2), MatrixXd::Ones(2, 1), MatrixXd::Ones(1, 2));
    CHECK_THROWS_AS(pole_residue(s), DecompositionError);
  }

  TEST_CASE("step response") {
    const StateSpace s = oracle::scalar(-1, 1, 1);
    const auto y = step_response(s, {0.0, 1.0, 50.0});
    CHECK(y[0](0, 0) == 0.0);
    CHECK(y[1](0, 0) == doctest::Approx(0.6321206).epsilon(1e-7));
    CHECK(std::abs(y[2](0, 0) - 1.0) < 1e-10);

    for (unsigned seed = 1; seed <= 3; ++seed) {
      const StateSpace sys = bench::generate_random_stable(12, 2, 2, seed);
      const auto ys = step_response(sys, {0.7});
      CHECK((ys[0] - oracle::rk4_step(sys, 0.7, 2000)).norm() < 1e-6);
    }
    // Singular A takes the augmented-exponential path: a pure integrator gives y = t.
    const StateSpace integ = oracle::scalar(0, 1, 1);
    CHECK(step_response(integ, {2.5})[0](0, 0) == doctest::Approx(2.5));
  }

  TEST_CASE("time-limited transfer G") {
    const StateSpace s = oracle::scalar(-1, 1, 1);
    CHECK(std::abs(eval_G(s, Complex(0.3, 1.0), 0.0)(0, 0)) < 1e-15);
    CHECK(eval_G(s, 1.0, 1.0)(0, 0).real() == doctest::Approx(0.4323324).epsilon(1e-7));
    CHECK(std::abs(eval_G(s, Complex(0.5, 2.0), 50.0)(0, 0) - eval_tf(s, Complex(0.5, 2.0))(0, 0)) < 1e-10);
    // Window [t1, t2] is the difference of the two [0, t] transfers.
    const StateSpace sys = bench::generate_random_stable(8, 1, 2, 6);
    const Complex z(0.4, 0.9);
    const MatrixXcd G12 = eval_G(sys, z, TimeInterval{0.5, 1.5});
    CHECK(oracle::relc(G12, eval_G(sys, z, 1.5) - eval_G(sys, z, 0.5)) < 1e-12);
  }

  TEST_CASE("time-limited augmentations") {
    const StateSpace s = oracle::scalar(-1, 1, 1);
    const MatrixXd B1 = augment_inputs(s, TimeInterval::upto(1.0));
    CHECK(B1(0, 0) == 1.0);
    CHECK(B1(0, 1) == doctest::Approx(-0.3678794).epsilon(1e-7));
    const MatrixXd B0 = augment_inputs(s, TimeInterval::upto(1e-14));
    CHECK(B0(0, 1) == doctest::Approx(-1.0));
    const MatrixXd B12 = augment_inputs(s, TimeInterval{1.0, 2.0});
    CHECK(B12(0, 0) == doctest::Approx(0.3678794).epsilon(1e-7));
    CHECK(B12(0, 1) == doctest::Approx(-0.1353353).epsilon(1e-7));
    CHECK_THROWS_AS(augment_inputs(s, TimeInterval::infinite()), InputError);
    const MatrixXd C12 = augment_outputs(s, TimeInterval{1.0, 2.0});
    CHECK(C12.rows() == 2);
    CHECK(C12(1, 0) == doctest::Approx(-0.1353353).epsilon(1e-7));
  }

  TEST_CASE("realization independence of the transfer function") {
    const StateSpace sys = bench::generate_random_stable(7, 2, 1, 21);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    MatrixXd T(7, 7);
    for (Index i = 0; i < 49; ++i) T.data()[i] = g(rng);
    T += 4 * MatrixXd::Identity(7, 7);
    const StateSpace st = similarity(sys, T);
    for (int k = 0; k < 20; ++k) {
      const Complex s(0.1 * k, 1.0 - 0.07 * k);
      CHECK(oracle::relc(eval_tf(st, s), eval_tf(sys, s)) < 1e-10);
    }
  }
}
