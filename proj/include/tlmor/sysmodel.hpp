#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tlmor/numkit.hpp"

namespace tlmor {

/// Continuous-time LTI system x' = A x + B u, y = C x.
struct StateSpace {
  MatrixXd A, B, C;

  StateSpace() = default;
  StateSpace(MatrixXd A_, MatrixXd B_, MatrixXd C_);

  Index order() const { return A.rows(); }
  Index inputs() const { return B.cols(); }
  Index outputs() const { return C.rows(); }

  /// Throws DimensionError / NonFiniteError.
  void validate() const;
  /// Largest real part of the spectrum is below -margin.
  bool is_stable(double margin = 1e-12) const;
  double spectral_abscissa() const;
};

enum class Method { PORK, TLPORK, OTLPORK, BT, TLBT, ATLBT, IRKA, TLIRKA, CURE, TLCURE };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view name);
std::vector<Method> all_methods();

/// Window [t1, t2]; t2 = +inf is the infinite horizon.
struct TimeInterval {
  double t1 = 0.0;
  double t2 = std::numeric_limits<double>::infinity();

  static TimeInterval infinite() { return {}; }
  static TimeInterval upto(double t) { return {0.0, t}; }
  bool is_infinite() const { return std::isinf(t2); }
  bool starts_at_zero() const { return t1 == 0.0; }
  void validate() const;
};

/// Tangential interpolation data. Directions are stored as columns:
/// right_dirs is m x r, left_dirs is p x r (column i holds the row direction b_i transposed).
struct InterpolationData {
  std::vector<Complex> points;
  MatrixXcd right_dirs;
  MatrixXcd left_dirs;

  Index size() const { return static_cast<Index>(points.size()); }
  bool has_right() const { return right_dirs.cols() > 0; }
  bool has_left() const { return left_dirs.cols() > 0; }

  /// Checks Re(sigma) > 0, sizes and closure under conjugation.
  void validate(std::optional<Index> m = std::nullopt, std::optional<Index> p = std::nullopt) const;
  /// Index of the conjugate partner of entry i (i itself for real data), or -1.
  Index conjugate_partner(Index i, const MatrixXcd& dirs, double tol = 1e-10) const;
};

/// Right directions of the data; a SISO-width default of ones when none are given.
MatrixXcd right_directions(const InterpolationData& data, Index m);
/// Left directions of the data; a default of ones when p == 1 and none are given.
MatrixXcd left_directions(const InterpolationData& data, Index p);

/// Reduced model with provenance.
struct ReducedModel : StateSpace {
  Method method = Method::BT;
  TimeInterval interval;
  MatrixXd S;        ///< Sylvester data of the construction, empty for projection baselines
  MatrixXd L_right;  ///< m x r (input side)
  MatrixXd L_left;   ///< r x p (output side)
  bool stable = false;

  ReducedModel() = default;
  ReducedModel(StateSpace sys, Method m, TimeInterval iv);
};

/// Modal form H(s) = sum_k l_k r_k^T / (s - lambda_k); conjugate poles carry conjugate residues.
struct PoleResidue {
  VectorXcd poles;
  MatrixXcd left;   ///< p x n, column k is l_k
  MatrixXcd right;  ///< m x n, column k is r_k
  MatrixXcd eigenvectors;
};

MatrixXcd eval_tf(const StateSpace& sys, Complex s);

/// Hessenberg-reduced evaluator for H(s) at many points, O(n^2) per point.
class TransferEvaluator {
public:
  explicit TransferEvaluator(const StateSpace& sys);
  MatrixXcd operator()(Complex s) const;
  Index outputs() const { return Ct_.rows(); }
  Index inputs() const { return Bt_.cols(); }

private:
  MatrixXd H_;
  MatrixXd Bt_, Ct_;
};

PoleResidue pole_residue(const StateSpace& sys, double gap_tol = 1e-8);

/// y(t_k) for a unit step on every input at once, returned as p x m per sample.
std::vector<MatrixXd> step_response(const StateSpace& sys, const std::vector<double>& grid);

/// Time-limited transfer G(s) over [t1, t2].
MatrixXcd eval_G(const StateSpace& sys, Complex s, const TimeInterval& iv);
MatrixXcd eval_G(const StateSpace& sys, Complex s, double t);

/// e^{A t}, with t = 0 giving I exactly and t = inf giving 0.
MatrixXd expm_at(const MatrixXd& A, double t);

/// [e^{A t1} B, -e^{A t2} B]; the window must be finite.
MatrixXd augment_inputs(const StateSpace& sys, const TimeInterval& iv);
/// [C e^{A t1}; -C e^{A t2}].
MatrixXd augment_outputs(const StateSpace& sys, const TimeInterval& iv);

/// (A^T, C^T, B^T).
StateSpace dual(const StateSpace& sys);
/// (T^{-1} A T, T^{-1} B, C T).
StateSpace similarity(const StateSpace& sys, const MatrixXd& T);

}  // namespace tlmor
