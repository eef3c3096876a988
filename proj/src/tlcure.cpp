#include "tlmor/tlcure.hpp"

namespace tlmor {

namespace {

TlCureTrace run(const StateSpace& work, const TimeInterval& iv, const std::vector<InterpolationData>& schedule,
                const TlCureOptions& opts, Side side) {
  if (schedule.empty()) throw InputError("cumulative schedule is empty");
  CumulativeReducer red(work, iv, opts.pork);
  TlCureTrace tr;
  tr.side = side;
  const MatrixXd P = opts.track_error ? tl_gramian(work, iv) : MatrixXd();
  const double full = opts.track_error ? (work.C * P * work.C.transpose()).trace() : 0.0;
  for (const auto& batch : schedule) {
    InterpolationData d = batch;
    if (side == Side::Output) d = InterpolationData{batch.points, left_directions(batch, work.inputs()), MatrixXcd()};
    ReducedModel rom = red.step(d);
    if (opts.track_error) {
      tr.errors.push_back(h2t_error(work, rom, iv));
      const MatrixXd Vt = red.windowed_basis();
      const MatrixXd CV = work.C * Vt;
      tr.trace_defects.push_back(full - (CV * red.windowed_factor() * CV.transpose()).trace());
    }
    tr.roms.push_back(side == Side::Input ? std::move(rom) : transpose_model(rom));
    if (opts.track_error && opts.tol > 0 && tr.errors.back() <= opts.tol) {
      tr.converged = true;
      break;
    }
  }
  tr.state = red.state();
  tr.basis_t = red.windowed_basis();
  tr.factor_t = red.windowed_factor();
  return tr;
}

}  // namespace

TlCureTrace tlcure_v_run(const StateSpace& sys, const TimeInterval& iv, const std::vector<InterpolationData>& schedule,
                         const TlCureOptions& opts) {
  sys.validate();
  return run(sys, iv, schedule, opts, Side::Input);
}

TlCureTrace tlcure_w_run(const StateSpace& sys, const TimeInterval& iv, const std::vector<InterpolationData>& schedule,
                         const TlCureOptions& opts) {
  sys.validate();
  return run(dual(sys), iv, schedule, opts, Side::Output);
}

MatrixXd approx_gramian(const TlCureTrace& trace) {
  const MatrixXd G = trace.basis_t * trace.factor_t * trace.basis_t.transpose();
  return 0.5 * (G + G.transpose());
}

}  // namespace tlmor
