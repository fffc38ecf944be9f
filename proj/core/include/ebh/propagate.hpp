#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ebh/field.hpp"
#include "ebh/model.hpp"
#include "ebh/packet.hpp"

namespace ebh {

enum class EvolveMethod {
  automatic,  ///< dense for small problems, polynomial stepping otherwise
  dense,      ///< full diagonalisation, exact propagator
  stepping    ///< Chebyshev polynomial expansion of exp(-i H dt)
};

/// Callback invoked at every requested sample time with the current state.
class StepObserver {
 public:
  virtual ~StepObserver() = default;
  virtual void on_sample(double t, const Eigen::VectorXcd& psi) = 0;
};

struct EvolveOptions {
  EvolveMethod method = EvolveMethod::automatic;
  /// Cap on full state snapshots kept in the trajectory (evenly strided).
  int max_stored_states = 200;
  double norm_tol = 1e-6;     ///< abort if |norm - 1| exceeds this
  bool certify = true;        ///< driven runs: verify dt by step halving
  /// Allowed state defect between dt and dt/2 on the first sample interval.
  /// The midpoint-field rule converges at second order, so the full-run error
  /// stays within a small multiple of this bound.
  double certify_tol = 1e-4;
  StepObserver* observer = nullptr;
};

/// Time series of states with bounded storage.
struct Trajectory {
  std::vector<double> times;           ///< all sample times
  std::vector<double> norms;           ///< norm at each sample time
  std::vector<int> stored_indices;     ///< indices into times with snapshots
  std::vector<Eigen::VectorXcd> states;

  /// Snapshot at the given sample time; throws if not stored.
  const Eigen::VectorXcd& state_at_time(double t, double tol = 1e-9) const;
  const Eigen::VectorXcd& final_state() const;
};

/// Evolve under a fixed Hamiltonian, sampling at the given times
/// (ascending, first entry is the initial time for psi0).
Trajectory evolve_static(const SparseOperator& h, const Eigen::VectorXcd& psi0,
                         const std::vector<double>& times,
                         const EvolveOptions& opts = {});

/// Evolve under H0 + F(t) X with the given field protocol. Substeps of at
/// most dt_max use the midpoint field value; a step-halving certificate is
/// computed on the first sample interval unless disabled.
/// Periodic boundaries with a nonzero field are rejected.
Trajectory evolve_driven(const ModelParams& p, const PairBasis& basis,
                         const FieldProtocol& field,
                         const Eigen::VectorXcd& psi0,
                         const std::vector<double>& times, double dt_max,
                         const EvolveOptions& opts = {});

/// Single Chebyshev-propagated step (exposed for testing/benchmarks).
Eigen::VectorXcd chebyshev_step(const SparseOperator& h,
                                const Eigen::VectorXcd& psi, double dt,
                                double tol = 1e-13);

/// Uniformly spaced sample times t0, t0+dt, ..., covering [t0, t1]
/// (last point clamped to t1).
std::vector<double> sample_times(double t0, double t1, double dt);

}  // namespace ebh
