#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tlmor/bench/experiment.hpp"
#include "tlmor/bench/generators.hpp"
#include "tlmor/bench/io.hpp"

namespace {

using namespace tlmor;
using namespace tlmor::bench;

struct Flags {
  std::string config, model, A, B, C, generator, t1, t2, methods, points, out, step_out;
  Index n = 0, m = 0, p = 0, order = 0, hinf_points = 0, approx_rank = 0;
  std::uint64_t seed = 0;
  double tol = 0;
  int threads = 0;
  bool timing = false;
};

struct Options {
  CLI::Option *order, *seed, *tol, *threads, *n, *m, *p, *hinf, *rank;
};

double parse_time_flag(const std::string& s, const char* name) {
  if (s == "inf" || s == "Inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string("--") + name + " must be a number or 'inf'");
  }
}

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> out;
  std::stringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    const auto m = parse_method(item);
    if (!m) throw ConfigError("unknown method '" + item + "'");
    out.push_back(*m);
  }
  if (out.empty()) throw ConfigError("--methods is empty");
  return out;
}

void add_model_flags(CLI::App* sub, Flags& f, Options& o, bool with_methods) {
  sub->add_option("--config", f.config, "JSON experiment config");
  sub->add_option("--model", f.model, "directory holding A.mtx, B.mtx, C.mtx");
  sub->add_option("--A", f.A, "Matrix Market file for A");
  sub->add_option("--B", f.B, "Matrix Market file for B");
  sub->add_option("--C", f.C, "Matrix Market file for C");
  sub->add_option("--generator", f.generator, "heat_rod or random");
  o.n = sub->add_option("--n", f.n, "generator order");
  o.m = sub->add_option("--m", f.m, "generator inputs");
  o.p = sub->add_option("--p", f.p, "generator outputs");
  o.order = sub->add_option("--order,-r", f.order, "reduced order");
  sub->add_option("--t1", f.t1, "window start");
  sub->add_option("--t2", f.t2, "window end (number or inf)");
  if (with_methods) sub->add_option("--methods", f.methods, "comma separated method list");
  sub->add_option("--points", f.points, "irka, mirror or random");
  o.seed = sub->add_option("--seed", f.seed, "random seed");
  o.tol = sub->add_option("--tol", f.tol, "IRKA/TLIRKA tolerance");
  o.threads = sub->add_option("--threads", f.threads, "worker threads");
  o.hinf = sub->add_option("--hinf-points", f.hinf_points, "frequency sweep size");
  o.rank = sub->add_option("--approx-rank", f.approx_rank, "A-TLBT Gramian rank");
  sub->add_option("--out", f.out, "output path");
}

ExperimentConfig make_config(const Flags& f, const Options& o) {
  ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : load_config_file(f.config);
  const bool files = !f.A.empty() || !f.B.empty() || !f.C.empty();
  if (files && (f.A.empty() || f.B.empty() || f.C.empty())) throw ConfigError("--A, --B and --C go together");
  if (files && !f.model.empty()) throw ConfigError("give either --model or --A/--B/--C");
  if (!f.model.empty()) cfg.model = ModelPaths::in_directory(f.model);
  if (files) cfg.model = ModelPaths{f.A, f.B, f.C};
  if (!f.generator.empty()) {
    if (cfg.model && (files || !f.model.empty())) throw ConfigError("give either a model or a generator");
    cfg.model.reset();
    cfg.generator.kind = f.generator;
  }
  if (*o.n) cfg.generator.n = f.n;
  if (*o.m) cfg.generator.m = f.m;
  if (*o.p) cfg.generator.p = f.p;
  if (*o.order) cfg.order = f.order;
  if (!f.t1.empty()) cfg.interval.t1 = parse_time_flag(f.t1, "t1");
  if (!f.t2.empty()) cfg.interval.t2 = parse_time_flag(f.t2, "t2");
  if (!f.methods.empty()) cfg.methods = parse_methods(f.methods);
  if (!f.points.empty()) cfg.points = f.points;
  if (*o.seed) cfg.seed = f.seed;
  if (*o.tol) cfg.tol = f.tol;
  if (*o.threads) cfg.threads = f.threads;
  if (*o.hinf) cfg.hinf_points = f.hinf_points;
  if (*o.rank) cfg.approx_rank = f.approx_rank;
  if (!f.out.empty()) cfg.out = f.out;
  if (!f.step_out.empty()) cfg.step_out = f.step_out;
  if (f.timing) cfg.timing = true;
  cfg.validate();
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("failed writing " + path);
}

void report_failures(const Report& rep) {
  for (const auto& row : rep.rows) {
    if (row.failed) std::cerr << "warning: " << to_string(row.method) << " failed: " << row.message << '\n';
    else if (!row.message.empty()) std::cerr << "note: " << to_string(row.method) << ": " << row.message << '\n';
  }
}

int cmd_generate(const Flags& f, const Options& o) {
  if (f.out.empty()) throw ConfigError("generate needs --out <dir>");
  ExperimentConfig cfg;
  cfg.generator.kind = f.generator.empty() ? "heat_rod" : f.generator;
  if (*o.n) cfg.generator.n = f.n;
  if (*o.m) cfg.generator.m = f.m;
  if (*o.p) cfg.generator.p = f.p;
  if (*o.seed) cfg.seed = f.seed;
  cfg.validate();
  const StateSpace sys = build_model(cfg);
  save_model(f.out, sys);
  std::cout << "wrote " << cfg.generator.kind << " model (n=" << sys.order() << ", m=" << sys.inputs()
            << ", p=" << sys.outputs() << ") to " << f.out << '\n';
  return 0;
}

int cmd_compare(const Flags& f, const Options& o) {
  const ExperimentConfig cfg = make_config(f, o);
  const Report rep = run_comparison(cfg);
  report_failures(rep);
  write_text(cfg.out, to_csv(rep, cfg.timing));
  if (!cfg.step_out.empty()) write_text(cfg.step_out, step_error_csv(rep, cfg.interval, cfg.step_samples));
  return 0;
}

int cmd_reduce(const Flags& f, const Options& o, const std::string& method) {
  ExperimentConfig cfg = make_config(f, o);
  const auto m = parse_method(method);
  if (!m) throw ConfigError("unknown method '" + method + "'");
  cfg.methods = {*m};
  const StateSpace sys = build_model(cfg);
  const PointSets pts = choose_points(sys, cfg);
  const ReducedModel rom = run_method(sys, *m, cfg, pts);
  if (!cfg.out.empty()) save_model(cfg.out, rom);
  std::cout << to_string(*m) << " r=" << rom.order() << " stable=" << (rom.is_stable() ? "true" : "false")
            << " h2t_error=" << format_number(h2t_error(sys, rom, cfg.interval)) << '\n';
  return 0;
}

int cmd_simulate(const Flags& f, const Options& o) {
  const ExperimentConfig cfg = make_config(f, o);
  const Report rep = run_comparison(cfg);
  report_failures(rep);
  write_text(cfg.out, step_error_csv(rep, cfg.interval, cfg.step_samples));
  return 0;
}

int cmd_verify(const Flags& f, const Options& o) {
  ExperimentConfig cfg = make_config(f, o);
  if (f.methods.empty() && f.config.empty()) cfg.methods = {Method::TLPORK, Method::OTLPORK};
  const StateSpace sys = build_model(cfg);
  const PointSets pts = choose_points(sys, cfg);
  std::ostringstream os;
  os << "method,energy_defect,gramian_residual,tangential_max,gramian_recovery\n";
  for (Method m : cfg.methods) {
    const bool tl = m == Method::TLPORK || m == Method::OTLPORK || m == Method::TLCURE;
    const bool h2 = m == Method::PORK || m == Method::CURE;
    if (!tl && !h2) throw ConfigError(std::string(to_string(m)) + " has no pseudo-optimality conditions to verify");
    const ReducedModel rom = run_method(sys, m, cfg, pts);
    const Side side = m == Method::OTLPORK ? Side::Output : Side::Input;
    const PseudoOptimalityReport r = verify_pseudo_optimality(sys, rom, tl ? cfg.interval : TimeInterval::infinite(), side);
    os << to_string(m) << ',' << format_number(r.energy_defect) << ',' << format_number(r.gramian_residual) << ','
       << format_number(r.tangential_max()) << ',' << format_number(r.gramian_recovery) << '\n';
  }
  write_text(cfg.out, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-limited pseudo-optimal model order reduction"};
  app.require_subcommand(1);
  Flags f;
  Options o{};
  std::string method = "TLPORK";

  auto* gen = app.add_subcommand("generate", "write a generated model as Matrix Market files");
  gen->add_option("--generator", f.generator, "heat_rod or random");
  o.n = gen->add_option("--n", f.n, "order");
  o.m = gen->add_option("--m", f.m, "inputs");
  o.p = gen->add_option("--p", f.p, "outputs");
  o.seed = gen->add_option("--seed", f.seed, "random seed");
  gen->add_option("--out", f.out, "output directory");
  Options go = o;

  auto* red = app.add_subcommand("reduce", "reduce a model with one method");
  Options ro{};
  add_model_flags(red, f, ro, false);
  red->add_option("--method", method, "method name");

  auto* cmp = app.add_subcommand("compare", "run several methods and write the CSV report");
  Options co{};
  add_model_flags(cmp, f, co, true);
  cmp->add_option("--step-out", f.step_out, "step-response error CSV");
  cmp->add_flag("--timing", f.timing, "record runtime_ms");

  auto* sim = app.add_subcommand("simulate", "step-response errors of the reduced models");
  Options so{};
  add_model_flags(sim, f, so, true);

  auto* ver = app.add_subcommand("verify", "check pseudo-optimality conditions");
  Options vo{};
  add_model_flags(ver, f, vo, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*gen) return cmd_generate(f, go);
    if (*red) return cmd_reduce(f, ro, method);
    if (*cmp) return cmd_compare(f, co);
    if (*sim) return cmd_simulate(f, so);
    if (*ver) return cmd_verify(f, vo);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
