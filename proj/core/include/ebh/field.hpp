#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ebh {

enum class FieldKind { none, constant, square, sine, sampled };

/// Time profile of the tilt force F(t) entering H(t) = H0 + F(t) * X, where X
/// is the summed boson coordinate.
///
/// Pulse kinds are centred at t_center and last one period T:
///   square: +f0 on (t_center - T/2, t_center], -f0 on (t_center, t_center + T/2]
///   sine:   -(f0 pi / 2) sin(2 pi (t - t_center) / T) for |t - t_center| <= T/2
/// Both integrate to zero over the full pulse and to +f0 T/2 over the first
/// half. `sampled` interpolates linearly between (time, force) pairs and is
/// zero outside the sampled range.
struct FieldProtocol {
  FieldKind kind = FieldKind::none;
  double f0 = 0.0;
  double period = 0.0;    ///< pulse duration T (square/sine)
  double t_center = 0.0;  ///< pulse midpoint
  std::vector<std::pair<double, double>> samples;  ///< for kind == sampled

  static FieldProtocol none_field();
  static FieldProtocol constant(double f0);
  static FieldProtocol square_pulse(double f0, double period, double t_center = 0.0);
  static FieldProtocol sine_pulse(double f0, double period, double t_center = 0.0);
  static FieldProtocol from_samples(std::vector<std::pair<double, double>> samples);

  double force_at(double t) const;
  /// Exact integral of F over [t0, t1]: closed form for the analytic kinds,
  /// trapezoid on the sample polyline for `sampled`.
  double impulse(double t0, double t1) const;
  double max_abs_force() const;
  bool is_zero() const;
  void validate() const;  ///< throws std::invalid_argument on malformed shapes
};

/// Free-function spelling of FieldProtocol::impulse.
double impulse(const FieldProtocol& field, double t0, double t1);

std::string to_string(FieldKind kind);
FieldKind field_kind_from_string(const std::string& name);

}  // namespace ebh
