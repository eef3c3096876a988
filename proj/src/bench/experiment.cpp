#include "tlmor/bench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tlmor/bench/generators.hpp"
#include "tlmor/bench/hinf.hpp"

namespace tlmor::bench {

namespace {

using nlohmann::json;

double parse_time(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  }
  throw ConfigError("config key '" + key + "' must be a number or \"inf\"");
}

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

/// The r poles with the largest H2 contribution |l_k| |r_k| / |Re lambda_k|, closed under conjugation.
std::vector<Index> dominant_modes(const PoleResidue& pr, Index r) {
  const Index n = pr.poles.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) order[std::size_t(k)] = k;
  auto weight = [&](Index k) {
    return pr.left.col(k).norm() * pr.right.col(k).norm() / std::max(std::abs(pr.poles(k).real()), 1e-300);
  };
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return weight(a) > weight(b); });
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  std::vector<Index> sel;
  for (Index k : order) {
    if (Index(sel.size()) == r) break;
    if (taken[std::size_t(k)] || !(pr.poles(k).real() < 0)) continue;
    if (pr.poles(k).imag() == 0.0) {
      sel.push_back(k);
      taken[std::size_t(k)] = true;
      continue;
    }
    if (Index(sel.size()) + 2 > r) continue;
    Index partner = -1;
    for (Index j = 0; j < n; ++j)
      if (j != k && !taken[std::size_t(j)] && pr.poles(j) == std::conj(pr.poles(k))) partner = j;
    if (partner < 0) continue;
    sel.push_back(k);
    sel.push_back(partner);
    taken[std::size_t(k)] = taken[std::size_t(partner)] = true;
  }
  if (Index(sel.size()) != r) throw PolePlacementError("could not select " + std::to_string(r) + " stable modes");
  return sel;
}

InterpolationData mirror_points(const StateSpace& sys, Index r) {
  const std::vector<Index> sel = dominant_modes(pole_residue(sys), r);
  InterpolationData d = mirror_modal_interp(sys, sel, Side::Input);
  d.left_dirs = mirror_modal_interp(sys, sel, Side::Output).left_dirs;
  return d;
}

const IrkaResult& require(const std::optional<IrkaResult>& r, const char* what) {
  if (!r) throw PolePlacementError(std::string(what) + " points are unavailable");
  return *r;
}

bool needs(const std::vector<Method>& ms, std::initializer_list<Method> any) {
  for (Method m : ms)
    for (Method a : any)
      if (m == a) return true;
  return false;
}

std::vector<InterpolationData> schedule_for(const InterpolationData& d) { return split_batches(d, 2); }

template <class F>
void parallel_for(std::size_t count, int workers, F&& body) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const std::size_t nt = std::min<std::size_t>(std::size_t(workers), count);
  for (std::size_t t = 0; t < nt; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (order < 1) throw ConfigError("order must be at least 1");
  try {
    interval.validate();
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  if (methods.empty()) throw ConfigError("no methods requested");
  if (points != "irka" && points != "mirror" && points != "random")
    throw ConfigError("points must be one of irka, mirror, random (got '" + points + "')");
  if (!(tol > 0)) throw ConfigError("tol must be positive");
  if (hinf_points < 2) throw ConfigError("hinf_points must be at least 2");
  if (approx_rank < 1) throw ConfigError("approx_rank must be at least 1");
  if (step_samples < 2) throw ConfigError("step_samples must be at least 2");
  if (threads < 0) throw ConfigError("threads must be nonnegative");
  if (!model) {
    if (generator.kind != "heat_rod" && generator.kind != "random")
      throw ConfigError("unknown generator '" + generator.kind + "'");
    if (generator.kind == "heat_rod" && generator.n < 3) throw ConfigError("heat rod needs n >= 3");
    if (generator.n < 1 || generator.m < 1 || generator.p < 1) throw ConfigError("generator sizes must be positive");
  }
}

ExperimentConfig parse_config_json(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(origin + ": top level must be an object");
  ExperimentConfig cfg;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "model") {
      if (v.is_string()) {
        cfg.model = ModelPaths::in_directory(v.get<std::string>());
      } else if (v.is_object()) {
        ModelPaths p;
        for (auto m = v.begin(); m != v.end(); ++m) {
          if (m.key() == "A") p.A = get_as<std::string>(m.value(), "model.A");
          else if (m.key() == "B") p.B = get_as<std::string>(m.value(), "model.B");
          else if (m.key() == "C") p.C = get_as<std::string>(m.value(), "model.C");
          else throw ConfigError(origin + ": unknown key 'model." + m.key() + "'");
        }
        if (p.A.empty() || p.B.empty() || p.C.empty()) throw ConfigError(origin + ": model needs A, B and C");
        cfg.model = p;
      } else {
        throw ConfigError(origin + ": model must be a directory or an {A, B, C} object");
      }
    } else if (k == "generator") {
      if (v.is_string()) {
        cfg.generator.kind = v.get<std::string>();
      } else if (v.is_object()) {
        for (auto g = v.begin(); g != v.end(); ++g) {
          if (g.key() == "kind") cfg.generator.kind = get_as<std::string>(g.value(), "generator.kind");
          else if (g.key() == "n") cfg.generator.n = get_as<Index>(g.value(), "generator.n");
          else if (g.key() == "m") cfg.generator.m = get_as<Index>(g.value(), "generator.m");
          else if (g.key() == "p") cfg.generator.p = get_as<Index>(g.value(), "generator.p");
          else throw ConfigError(origin + ": unknown key 'generator." + g.key() + "'");
        }
      } else {
        throw ConfigError(origin + ": generator must be a name or an object");
      }
    } else if (k == "order" || k == "r") {
      cfg.order = get_as<Index>(v, k);
    } else if (k == "t1") {
      cfg.interval.t1 = parse_time(v, k);
    } else if (k == "t2") {
      cfg.interval.t2 = parse_time(v, k);
    } else if (k == "methods") {
      if (!v.is_array()) throw ConfigError(origin + ": methods must be a list");
      cfg.methods.clear();
      for (const auto& m : v) {
        const std::string name = get_as<std::string>(m, "methods");
        const auto parsed = parse_method(name);
        if (!parsed) throw ConfigError(origin + ": unknown method '" + name + "'");
        cfg.methods.push_back(*parsed);
      }
    } else if (k == "points") {
      cfg.points = get_as<std::string>(v, k);
    } else if (k == "seed") {
      cfg.seed = get_as<std::uint64_t>(v, k);
    } else if (k == "out") {
      cfg.out = get_as<std::string>(v, k);
    } else if (k == "step_out") {
      cfg.step_out = get_as<std::string>(v, k);
    } else if (k == "tol") {
      cfg.tol = get_as<double>(v, k);
    } else if (k == "hinf_points") {
      cfg.hinf_points = get_as<Index>(v, k);
    } else if (k == "approx_rank") {
      cfg.approx_rank = get_as<Index>(v, k);
    } else if (k == "step_samples") {
      cfg.step_samples = get_as<Index>(v, k);
    } else if (k == "timing") {
      cfg.timing = get_as<bool>(v, k);
    } else if (k == "threads") {
      cfg.threads = get_as<int>(v, k);
    } else {
      throw ConfigError(origin + ": unknown key '" + k + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str(), path);
}

StateSpace build_model(const ExperimentConfig& cfg) {
  if (cfg.model) return load_model(*cfg.model);
  if (cfg.generator.kind == "heat_rod") return generate_heat_rod(cfg.generator.n);
  if (cfg.generator.kind == "random")
    return generate_random_stable(cfg.generator.n, cfg.generator.m, cfg.generator.p, cfg.seed);
  throw ConfigError("unknown generator '" + cfg.generator.kind + "'");
}

bool Report::any_failed() const {
  return std::any_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.failed; });
}

PointSets choose_points(const StateSpace& sys, const ExperimentConfig& cfg) {
  PointSets pts;
  const Index r = cfg.order;
  if (cfg.points == "mirror") {
    pts.infinite = pts.windowed = mirror_points(sys, r);
    return pts;
  }
  if (cfg.points == "random") {
    pts.infinite = pts.windowed = random_interpolation(sys, r, cfg.seed);
    return pts;
  }
  IrkaOptions io;
  io.tol = cfg.tol;
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  pts.irka = irka_reduce(sys, r, random_mirror_init(sys, r, cfg.seed), io);
  pts.irka_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  pts.infinite = pts.irka->final_data;
  if (needs(cfg.methods, {Method::TLIRKA, Method::TLPORK, Method::OTLPORK, Method::TLCURE})) {
    // A failed TLIRKA leaves the windowed data empty; methods that need it then fail individually.
    try {
      t0 = clock::now();
      pts.tlirka = tlirka_reduce(sys, r, cfg.interval, pts.infinite, io);
      pts.tlirka_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
      pts.windowed = pts.tlirka->final_data;
    } catch (const NumericalError&) {
    }
  }
  return pts;
}

ReducedModel run_method(const StateSpace& sys, Method method, const ExperimentConfig& cfg, const PointSets& pts) {
  const Index r = cfg.order;
  const TimeInterval& iv = cfg.interval;
  auto windowed = [&]() -> const InterpolationData& {
    if (pts.windowed.size() == 0) throw PolePlacementError("time-limited interpolation data is unavailable");
    return pts.windowed;
  };
  switch (method) {
    case Method::BT:
      return bt_reduce(sys, r);
    case Method::TLBT:
      return tlbt_reduce(sys, r, iv);
    case Method::IRKA:
      if (pts.irka) return pts.irka->rom;
      return irka_reduce(sys, r, random_mirror_init(sys, r, cfg.seed), IrkaOptions{100, cfg.tol, 1e-12}).rom;
    case Method::TLIRKA:
      if (cfg.points == "irka") return require(pts.tlirka, "TLIRKA").rom;
      return tlirka_reduce(sys, r, iv, pts.infinite, IrkaOptions{100, cfg.tol, 1e-12}).rom;
    case Method::PORK:
      return pork_reduce(sys, pts.infinite, Side::Input);
    case Method::CURE:
      return cure_run(sys, schedule_for(pts.infinite)).roms.back();
    case Method::TLPORK:
      return tlpork_reduce(sys, windowed(), iv).rom;
    case Method::OTLPORK:
      return otlpork_reduce(sys, windowed(), iv).rom;
    case Method::TLCURE: {
      TlCureOptions o;
      o.track_error = false;
      return tlcure_v_run(sys, iv, schedule_for(windowed()), o).final_model();
    }
    case Method::ATLBT: {
      TlCureOptions o;
      o.track_error = false;
      const auto sched = logspaced_schedule(sys, cfg.approx_rank, 2, cfg.seed);
      const MatrixXd P = approx_gramian(tlcure_v_run(sys, iv, sched, o));
      const MatrixXd Q = approx_gramian(tlcure_w_run(sys, iv, sched, o));
      return atlbt_reduce(sys, r, iv, P, Q);
    }
  }
  throw ConfigError("unhandled method");
}

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TLMOR_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return int(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? int(hw) : 1;
}

Report run_comparison(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_comparison(build_model(cfg), cfg);
}

Report run_comparison(const StateSpace& sys, const ExperimentConfig& cfg) {
  cfg.validate();
  sys.validate();
  Report rep;
  rep.sys = sys;
  const std::size_t nm = cfg.methods.size();
  rep.rows.resize(nm);
  rep.roms.resize(nm);

  PointSets pts;
  std::string point_failure;
  if (needs(cfg.methods, {Method::IRKA, Method::TLIRKA, Method::PORK, Method::CURE, Method::TLPORK, Method::OTLPORK,
                          Method::TLCURE})) {
    try {
      pts = choose_points(sys, cfg);
    } catch (const Error& e) {
      point_failure = e.what();
    }
  }
  const HinfEstimator hinf(sys, cfg.hinf_points);

  parallel_for(nm, worker_count(cfg.threads), [&](std::size_t i) {
    ReportRow& row = rep.rows[i];
    row.method = cfg.methods[i];
    row.r = cfg.order;
    row.interval = cfg.interval;
    const bool interp = row.method != Method::BT && row.method != Method::TLBT && row.method != Method::ATLBT;
    if (interp && !point_failure.empty()) {
      row.failed = true;
      row.message = "interpolation data: " + point_failure;
      return;
    }
    try {
      const auto t0 = std::chrono::steady_clock::now();
      ReducedModel rom = run_method(sys, row.method, cfg, pts);
      row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      // Precomputed fixed points are charged to the iteration that produced them.
      if (row.method == Method::IRKA && pts.irka) row.runtime_ms += pts.irka_ms;
      if (row.method == Method::TLIRKA && pts.tlirka) row.runtime_ms += pts.tlirka_ms;
      row.stable = rom.is_stable();
      try {
        row.h2t_error = h2t_error(sys, rom, cfg.interval);
      } catch (const Error& e) {
        row.message = std::string("h2t error: ") + e.what();
      }
      row.hinf_error = hinf.error(rom);
      const bool tl = row.method == Method::TLPORK || row.method == Method::OTLPORK || row.method == Method::TLCURE;
      const bool h2 = row.method == Method::PORK || row.method == Method::CURE;
      if (tl || (h2 && sys.is_stable())) {
        const Side side = row.method == Method::OTLPORK ? Side::Output : Side::Input;
        const TimeInterval viv = tl ? cfg.interval : TimeInterval::infinite();
        try {
          const PseudoOptimalityReport pr = verify_pseudo_optimality(sys, rom, viv, side);
          row.defect_energy = pr.energy_defect;
          row.defect_gramian = pr.gramian_residual;
        } catch (const Error& e) {
          row.message = std::string("verification: ") + e.what();
        }
      }
      rep.roms[i] = std::move(rom);
    } catch (const Error& e) {
      row.failed = true;
      row.message = e.what();
    }
  });
  return rep;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string to_csv(const Report& report, bool timing) {
  std::ostringstream os;
  os << "method,r,t1,t2,h2t_error,hinf_error,stable,defect_energy,defect_gramian,runtime_ms\n";
  for (const ReportRow& row : report.rows) {
    os << to_string(row.method) << ',' << row.r << ',' << format_number(row.interval.t1) << ','
       << format_number(row.interval.t2) << ',';
    if (row.failed) {
      os << "NA,NA,NA,NA,NA,NA\n";
      continue;
    }
    os << format_number(row.h2t_error) << ',' << format_number(row.hinf_error) << ','
       << (row.stable ? "true" : "false") << ',' << format_number(row.defect_energy) << ','
       << format_number(row.defect_gramian) << ',' << (timing ? format_number(row.runtime_ms) : "NA") << '\n';
  }
  return os.str();
}

std::string step_error_csv(const Report& report, const TimeInterval& iv, Index samples) {
  double horizon = iv.t2;
  if (!std::isfinite(horizon)) {
    const double a = std::abs(report.sys.spectral_abscissa());
    horizon = a > 0 ? 10.0 / a : 10.0;
  }
  std::vector<double> grid(static_cast<std::size_t>(samples));
  for (Index k = 0; k < samples; ++k) grid[std::size_t(k)] = horizon * double(k) / double(samples - 1);
  const auto y = step_response(report.sys, grid);
  std::vector<std::vector<MatrixXd>> yr(report.rows.size());
  for (std::size_t i = 0; i < report.rows.size(); ++i)
    if (report.roms[i]) yr[i] = step_response(*report.roms[i], grid);
  std::ostringstream os;
  os << "t,y";
  for (const auto& row : report.rows) os << ',' << to_string(row.method);
  os << '\n';
  for (std::size_t k = 0; k < grid.size(); ++k) {
    os << format_number(grid[k]) << ',' << format_number(y[k](0, 0));
    for (std::size_t i = 0; i < report.rows.size(); ++i)
      os << ',' << (yr[i].empty() ? std::string("NA") : format_number((y[k] - yr[i][k]).norm()));
    os << '\n';
  }
  return os.str();
}

}  // namespace tlmor::bench
