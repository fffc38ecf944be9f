#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ebh/band.hpp"
#include "ebh/field.hpp"
#include "ebh/model.hpp"
#include "ebh/packet.hpp"
#include "ebh/propagate.hpp"

namespace ebh {

/// Site-resolved particle density <n_j>, j = 1..N (sums to 2).
Eigen::VectorXd density_profile(const Eigen::VectorXcd& psi,
                                const PairBasis& basis);

/// Mean inter-boson separation <r>.
double mean_distance(const Eigen::VectorXcd& psi, const PairBasis& basis);

/// Summed coordinate <X> = <2j + r> (twice the pair centre of mass).
double center_of_mass(const Eigen::VectorXcd& psi, const PairBasis& basis);

double energy_expectation(const SparseOperator& h, const Eigen::VectorXcd& psi);

/// Pair momentum drifts at dk/dt = pair_drift_factor * F(t): the tilt couples
/// to the summed coordinate, so the packet accumulates phase twice as fast as
/// a single particle would.
inline constexpr double pair_drift_factor = -2.0;

/// Semiclassical centre trajectory on a band: k_c' = pair_drift_factor * F,
/// x_c' = 2 dE/dk. Integration stops if the momentum reaches a band edge.
struct SemiclassicalPath {
  std::vector<double> times;
  std::vector<double> k_c;   ///< wrapped to (-pi, pi]
  std::vector<double> x_c;
  bool hit_edge = false;
  double t_edge = 0.0;
};

SemiclassicalPath semiclassical_path(const BandStructure& bs, BandId band,
                                     double k0, double x0,
                                     const FieldProtocol& field,
                                     const std::vector<double>& times);

/// Time a drifting momentum first reaches a band termination point at
/// |k| = k_edge, starting from k0 with signed constant rate dk/dt.
/// Empty if the band is complete (no k_edge) or the rate is zero.
std::optional<double> predict_lifetime(std::optional<double> k_edge, double k0,
                                       double drift_rate);

struct SuddenDeathResult {
  bool detected = false;
  double t_death = 0.0;     ///< first time the criteria hold
  double leakage_at = 0.0;
  double slope_at = 0.0;    ///< d<r>/dt over the detection window
};

/// A packet dies when its band support ends: bound weight collapses
/// (leakage above threshold) while <r> grows steadily (unbinding).
SuddenDeathResult detect_sudden_death(const std::vector<double>& times,
                                      const std::vector<double>& r_mean,
                                      const std::vector<double>& leakage,
                                      int window = 20,
                                      double slope_threshold = 0.05,
                                      double leakage_threshold = 0.25);

/// Dominant oscillation period of x(t): the first autocorrelation maximum
/// that recovers at least half of the zero-lag value, required to come after
/// the autocorrelation has first dipped below that level.  The recovery rule
/// keeps harmonics at multiples of the period out of reach; the dip rule
/// ignores faint fast interference riding on a slow cycle.  Empty if no such
/// peak exists, e.g. for monotone or aperiodic records.
std::optional<double> estimate_period(const std::vector<double>& times,
                                      const std::vector<double>& x);

/// Magnitude of the overlap with a reference state evolved freely to a fixed
/// target time: f(t) = |<psi_ref(t_target) | psi(t)>|.
struct FidelityResult {
  std::vector<double> times;
  std::vector<double> f;
  double f_max = 0.0;
  double t_at_max = 0.0;
};

/// Per-sample observable record assembled during a run.
struct ObservableSeries {
  std::vector<double> times;
  std::vector<double> x_c;
  std::vector<double> r_mean;
  std::vector<double> leakage;
  std::vector<double> norm;
  std::vector<double> w_lower;
  std::vector<double> w_upper;
  std::vector<double> k_c;       ///< circular mean on the dominant band
  std::vector<double> energy;
  std::vector<double> fidelity;  ///< empty unless a reference is tracked
  Eigen::MatrixXd density;       ///< rows = samples, cols = sites
};

/// StepObserver that accumulates an ObservableSeries (and optionally the
/// fidelity against a supplied reference trajectory, matched by sample time).
class TrajectoryRecorder : public StepObserver {
 public:
  TrajectoryRecorder(const ModelParams& params, const PairBasis& basis,
                     const BandStructure* band,  ///< may be null: skip k-space
                     const SparseOperator* h0,   ///< may be null: skip energy
                     int expected_samples);

  /// Track fidelity against a fixed target state.
  void set_fidelity_target(Eigen::VectorXcd target);

  void on_sample(double t, const Eigen::VectorXcd& psi) override;

  const ObservableSeries& series() const { return series_; }
  /// Hands the series over, trimming the density matrix to the rows filled.
  ObservableSeries take_series();

 private:
  const ModelParams& params_;
  const PairBasis& basis_;
  const BandStructure* band_;
  const SparseOperator* h0_;
  std::optional<Eigen::VectorXcd> fidelity_target_;
  ObservableSeries series_;
  int row_ = 0;
};

}  // namespace ebh
