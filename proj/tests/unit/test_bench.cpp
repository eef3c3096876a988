#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "../oracles.hpp"
#include "tlmor/baselines.hpp"
#include "tlmor/bench/experiment.hpp"
#include "tlmor/bench/generators.hpp"
#include "tlmor/bench/hinf.hpp"
#include "tlmor/bench/io.hpp"

using namespace tlmor;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tlmor_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TLMOR_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("bench") {
  TEST_CASE("Matrix Market round trip") {
    const fs::path dir = scratch("mm");
    const StateSpace sys = bench::generate_random_stable(5, 2, 3, 1);
    bench::save_model(dir.string(), sys);
    const StateSpace back = bench::load_model(bench::ModelPaths::in_directory(dir.string()));
    CHECK(back.A == sys.A);
    CHECK(back.B == sys.B);
    CHECK(back.C == sys.C);
  }

  TEST_CASE("Matrix Market coordinate and symmetric input") {
    const fs::path dir = scratch("coord");
    write_text(dir / "A.mtx",
               "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 2\n1 1 -2\n2 1 1\n");
    write_text(dir / "B.mtx", "%%MatrixMarket matrix array real general\n2 1\n1\n0\n");
    write_text(dir / "C.mtx", "%%MatrixMarket matrix array real general\n1 2\n0\n1\n");
    const StateSpace s = bench::load_model(bench::ModelPaths::in_directory(dir.string()));
    CHECK(s.order() == 2);
    CHECK(s.inputs() == 1);
    CHECK(s.outputs() == 1);
    CHECK(s.A(0, 1) == 1.0);
    CHECK(s.A(1, 1) == 0.0);
    CHECK(s.C(0, 1) == 1.0);
  }

  TEST_CASE("Matrix Market errors") {
    const fs::path dir = scratch("bad");
    write_text(dir / "bad.mtx", "%%MatrixMarket tensor array real general\n1 1\n1\n");
    try {
      bench::read_matrix_market((dir / "bad.mtx").string());
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("bad.mtx") != std::string::npos);
    }
    write_text(dir / "short.mtx", "%%MatrixMarket matrix array real general\n2 1\n1\n");
    CHECK_THROWS_AS(bench::read_matrix_market((dir / "short.mtx").string()), ParseError);
    write_text(dir / "num.mtx", "%%MatrixMarket matrix array real general\n1 1\nabc\n");
    CHECK_THROWS_AS(bench::read_matrix_market((dir / "num.mtx").string()), ParseError);

    bench::write_matrix_market((dir / "A.mtx").string(), -MatrixXd::Identity(2, 2));
    bench::write_matrix_market((dir / "B.mtx").string(), MatrixXd::Ones(3, 1));
    bench::write_matrix_market((dir / "C.mtx").string(), MatrixXd::Ones(1, 2));
    CHECK_THROWS_AS(bench::load_model(bench::ModelPaths::in_directory(dir.string())), DimensionError);
    CHECK_THROWS_AS(bench::read_matrix_market((dir / "missing.mtx").string()), InputError);
  }

  TEST_CASE("heat rod generator") {
    const StateSpace h = bench::generate_heat_rod(3);
    const MatrixXd ref = 16 * (MatrixXd(3, 3) << -2, 1, 0, 1, -2, 1, 0, 1, -2).finished();
    CHECK(h.A == ref);
    CHECK(h.B(0, 0) == 16.0);
    CHECK(h.C(0, 1) == 1.0);
    const StateSpace big = bench::generate_heat_rod(200);
    CHECK(big.is_stable());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(big.A);
    CHECK(es.eigenvalues().maxCoeff() < 0);
    CHECK(std::isfinite(h2_norm(big)));
  }

  TEST_CASE("random generator") {
    const StateSpace a = bench::generate_random_stable(30, 2, 2, 7), b = bench::generate_random_stable(30, 2, 2, 7);
    CHECK(a.A == b.A);
    CHECK(a.B == b.B);
    CHECK(a.C == b.C);
    CHECK(a.spectral_abscissa() < 0);
    CHECK(bench::generate_random_stable(30, 2, 2, 8).A != a.A);
    const auto sched = bench::random_schedule(a, 3, 2, 4);
    CHECK(sched.size() == 3);
    for (const auto& d : sched) CHECK_NOTHROW(d.validate(2, 2));
    const auto log = bench::logspaced_schedule(a, 6, 2, 1);
    CHECK(log.size() == 3);
    const auto batches = bench::split_batches(oracle::random_data(7, 1, 1, 12), 2);
    Index total = 0;
    for (const auto& d : batches) {
      CHECK_NOTHROW(d.validate(1, 1));
      total += d.size();
    }
    CHECK(total == 7);
  }

  TEST_CASE("config parsing") {
    const bench::ExperimentConfig cfg = bench::parse_config_json(
        R"({"generator": {"kind": "random", "n": 12, "m": 2, "p": 1}, "order": 3, "t1": 0.5, "t2": 2,
            "methods": ["BT", "TLPORK"], "seed": 4})");
    CHECK(cfg.generator.kind == "random");
    CHECK(cfg.generator.n == 12);
    CHECK(cfg.order == 3);
    CHECK(cfg.interval.t1 == 0.5);
    CHECK(cfg.methods.size() == 2);
    CHECK(bench::parse_config_json(R"({"t2": "inf"})").interval.is_infinite());
    CHECK_THROWS_AS(bench::parse_config_json(R"({"methods": ["BT", "NOPE"]})"), ConfigError);
    CHECK_THROWS_AS(bench::parse_config_json(R"({"order": 0})"), ConfigError);
    CHECK_THROWS_AS(bench::parse_config_json(R"({"t1": 2, "t2": 1})"), ConfigError);
    CHECK_THROWS_AS(bench::parse_config_json(R"({"colour": 1})"), ConfigError);
    CHECK_THROWS_AS(bench::parse_config_json("{not json"), ConfigError);
  }

  TEST_CASE("H-infinity estimate against a dense sweep") {
    for (unsigned seed = 1; seed <= 3; ++seed) {
      const StateSpace sys = bench::generate_random_stable(40, 1, 1, seed);
      const StateSpace rom = bt_reduce(sys, 3);
      const double est = bench::HinfEstimator(sys).error(rom);
      const auto [lo, hi] = bench::frequency_range(sys);
      const TransferEvaluator ef(sys), er(rom);
      double dense = bench::sigma_max(ef(Complex(0)) - er(Complex(0)));
      for (int k = 0; k < 10000; ++k) {
        const double w = lo * std::pow(hi / lo, k / 9999.0);
        dense = std::max(dense, bench::sigma_max(ef(Complex(0, w)) - er(Complex(0, w))));
      }
      CHECK(std::abs(est - dense) <= 0.01 * dense);
    }
  }

  TEST_CASE("scalar TLPORK report row") {
    bench::ExperimentConfig cfg;
    cfg.order = 1;
    cfg.methods = {Method::TLPORK};
    const bench::Report rep = bench::run_comparison(oracle::scalar(-1, 1, 1), cfg);
    REQUIRE(rep.rows.size() == 1);
    CHECK_FALSE(rep.rows[0].failed);
    CHECK(rep.rows[0].h2t_error < 1e-10);
    const std::string csv = bench::to_csv(rep, false);
    CHECK(csv.rfind("method,r,t1,t2,h2t_error,hinf_error,stable,defect_energy,defect_gramian,runtime_ms\n", 0) == 0);
    CHECK(csv.find("TLPORK,1,0,1,") != std::string::npos);
  }

  TEST_CASE("per-method failures do not stop the run") {
    bench::ExperimentConfig cfg;
    cfg.order = 4;
    cfg.methods = {Method::BT, Method::TLPORK};
    cfg.interval = TimeInterval::upto(1.0);
    cfg.points = "random";
    // Unstable system: BT needs infinite Gramians, TLPORK works on the window.
    const VectorXd poles = (VectorXd(6) << 0.1, -1, -2, -3, -4, -5).finished();
    const StateSpace sys(poles.asDiagonal(), MatrixXd::Ones(6, 1), MatrixXd::Ones(1, 6));
    const bench::Report rep = bench::run_comparison(sys, cfg);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].failed);
    CHECK(rep.any_failed());
    CHECK(bench::to_csv(rep, false).find("BT,4,0,1,NA,NA,NA,NA,NA,NA") != std::string::npos);
  }

  TEST_CASE("format and thread helpers") {
    CHECK(bench::format_number(0.1) == "0.1");
    CHECK(bench::format_number(std::numeric_limits<double>::quiet_NaN()) == "NA");
    CHECK(bench::format_number(1.0 / 3) == "0.333333333");
    CHECK(bench::worker_count(3) == 3);
    CHECK(bench::worker_count(0) >= 1);
  }

  TEST_CASE("CLI exit codes") {
    const fs::path dir = scratch("cli");
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("generate --generator random --n 8 --seed 2 --out " + (dir / "m").string()) == 0);
    CHECK(fs::exists(dir / "m" / "A.mtx"));
    CHECK(run_cli("compare --model " + (dir / "m").string() + " --order 2 --methods BT,TLPORK --out " +
                  (dir / "r.csv").string()) == 0);
    CHECK(fs::exists(dir / "r.csv"));
    CHECK(run_cli("compare --model " + (dir / "m").string() + " --methods BT,NOPE") == 1);
    CHECK(run_cli("compare --generator random --n 8 --order 0") == 1);
    CHECK(run_cli("frobnicate") == 1);
    write_text(dir / "unstable.mtx", "%%MatrixMarket matrix array real general\n1 1\n1\n");
    write_text(dir / "one.mtx", "%%MatrixMarket matrix array real general\n1 1\n1\n");
    CHECK(run_cli("reduce --A " + (dir / "unstable.mtx").string() + " --B " + (dir / "one.mtx").string() + " --C " +
                  (dir / "one.mtx").string() + " --order 1 --method BT") == 2);
  }
}
