#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tlmor/bench/io.hpp"
#include "tlmor/tlmor.hpp"

namespace tlmor::bench {

struct GeneratorSpec {
  std::string kind = "heat_rod";  ///< heat_rod | random
  Index n = 200, m = 1, p = 1;
};

/// One comparison run. Points: "irka" (IRKA/TLIRKA fixed points), "mirror" (dominant modes)
/// or "random".
struct ExperimentConfig {
  std::optional<ModelPaths> model;
  GeneratorSpec generator;
  Index order = 5;
  TimeInterval interval{0.0, 1.0};
  std::vector<Method> methods = all_methods();
  std::string points = "irka";
  std::uint64_t seed = 1;
  std::string out;
  std::string step_out;
  double tol = 1e-6;
  Index hinf_points = 400;
  Index approx_rank = 20;
  Index step_samples = 200;
  bool timing = false;
  int threads = 0;  ///< 0 = TLMOR_THREADS or hardware concurrency

  void validate() const;
};

/// Parses the JSON form; unknown keys are rejected.
ExperimentConfig parse_config_json(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config_file(const std::string& path);

StateSpace build_model(const ExperimentConfig& cfg);

struct ReportRow {
  Method method = Method::BT;
  Index r = 0;
  TimeInterval interval;
  double h2t_error = std::numeric_limits<double>::quiet_NaN();
  double hinf_error = std::numeric_limits<double>::quiet_NaN();
  bool stable = false;
  double defect_energy = std::numeric_limits<double>::quiet_NaN();
  double defect_gramian = std::numeric_limits<double>::quiet_NaN();
  double runtime_ms = 0.0;
  bool failed = false;
  std::string message;
};

struct Report {
  StateSpace sys;
  std::vector<ReportRow> rows;
  std::vector<std::optional<ReducedModel>> roms;
  bool any_failed() const;
};

/// Interpolation data shared by the methods of one run.
struct PointSets {
  InterpolationData infinite;  ///< used by PORK and CURE
  InterpolationData windowed;  ///< used by TLPORK, O-TLPORK and TLCURE
  std::optional<IrkaResult> irka, tlirka;
  double irka_ms = 0, tlirka_ms = 0;
};

PointSets choose_points(const StateSpace& sys, const ExperimentConfig& cfg);

/// Runs one method; numerical failures propagate.
ReducedModel run_method(const StateSpace& sys, Method method, const ExperimentConfig& cfg, const PointSets& pts);

Report run_comparison(const ExperimentConfig& cfg);
Report run_comparison(const StateSpace& sys, const ExperimentConfig& cfg);

/// method,r,t1,t2,h2t_error,hinf_error,stable,defect_energy,defect_gramian,runtime_ms
std::string to_csv(const Report& report, bool timing);

/// Step-response samples over the window: t, y, then |y - y_r| per method.
std::string step_error_csv(const Report& report, const TimeInterval& iv, Index samples);

std::string format_number(double v);

/// Number of worker threads: explicit value, else TLMOR_THREADS, else hardware concurrency.
int worker_count(int requested);

}  // namespace tlmor::bench
