#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ebh/band.hpp"
#include "ebh/model.hpp"

namespace ebh {

/// Gaussian bound-pair wavepacket on a band:
///   |Psi> = sum_k w(k) |phi_band(k)>,  w(k) ~ exp[-(k - k0)^2 / (2 alpha^2)
///                                               - i n_a (k - k0)],
/// sampled on the lattice momentum grid and restricted to |k - k0| <= 4 alpha.
struct PacketSpec {
  double k0 = -0.8 * 3.14159265358979323846;
  double alpha = 0.15;
  int n_a = 80;                  ///< launch centre, in summed-coordinate units
  BandId band = BandId::lower;
  /// Weight allowed to fall on momenta where the band is missing; exceeding
  /// this is an error, below it the offending components are dropped.
  double tail_tolerance = 1e-4;
};

struct StateVector {
  Eigen::VectorXcd amplitudes;

  int dimension() const { return static_cast<int>(amplitudes.size()); }
  double norm() const { return amplitudes.norm(); }
  void normalize() { amplitudes.normalize(); }
};

/// Assemble the packet in the real-space pair basis. The band grid must
/// coincide with the basis lattice grid (band computed with n_k == n_sites).
/// Bound-state columns are gauge-fixed before mixing (leading relative
/// amplitude made real positive).
StateVector build_packet(const PacketSpec& spec, const BandStructure& band,
                         const PairBasis& basis);

/// Momentum-resolved decomposition of a state onto the two bound bands.
struct MomentumDistribution {
  std::vector<double> k;
  std::vector<double> p_lower;   ///< |<phi_lower(k)|psi>|^2
  std::vector<double> p_upper;
  double weight_lower = 0.0;
  double weight_upper = 0.0;
  double leakage = 0.0;          ///< 1 - weight_lower - weight_upper
  double circular_mean_lower = 0.0;  ///< arg sum p_lower(k) e^{ik}
  double circular_mean_upper = 0.0;
};

MomentumDistribution momentum_distribution(const StateVector& state,
                                           const BandStructure& band,
                                           const PairBasis& basis);

}  // namespace ebh
