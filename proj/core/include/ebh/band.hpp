#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ebh/bethe.hpp"
#include "ebh/model.hpp"

namespace ebh {

enum class BandId { lower, upper };

const char* to_string(BandId b);
BandId band_id_from_string(const std::string& name);

/// One bound state at fixed pair momentum k.
struct BandPoint {
  double energy = 0.0;      ///< absolute energy (kappa units)
  BetheRoot root;           ///< reduced-unit root data
  Eigen::VectorXd psi_rel;  ///< normalised relative wavefunction, r = 0..r_max
};

/// Bound states below/above the scattering continuum at one momentum.
struct BandColumn {
  double k = 0.0;
  double j_k = 0.0;                   ///< 2 kappa cos(k/2)
  std::vector<BandPoint> bound;       ///< sorted by energy ascending
};

struct BandInfo {
  bool complete = true;               ///< band exists for every |k| <= pi
  std::optional<double> k_edge;       ///< |k| where the band terminates
};

/// Bound-pair band structure over a uniform k grid on (-pi, pi].
class BandStructure {
 public:
  BandStructure(ModelParams params, int r_max, std::vector<double> k_grid,
                std::vector<std::optional<BandPoint>> lower,
                std::vector<std::optional<BandPoint>> upper,
                BandInfo lower_info, BandInfo upper_info);

  const ModelParams& params() const { return params_; }
  int r_max() const { return r_max_; }
  int n_k() const { return static_cast<int>(k_grid_.size()); }
  const std::vector<double>& k_grid() const { return k_grid_; }
  int index_of_k(double k, double tol = 1e-9) const;  ///< -1 if absent

  const std::vector<std::optional<BandPoint>>& band(BandId which) const;
  const BandInfo& info(BandId which) const;

  /// Scattering continuum envelope [-2 J_k, +2 J_k] shifted by nothing;
  /// returns {min, max} = {-2|J_k|, +2|J_k|} * ... (plain +-2 J_k with J_k >= 0).
  std::pair<double, double> scattering_envelope(double k) const;

  /// |E_upper - E_lower| at the zone edge k = pi (0 when the bands merge).
  double gap_at_zone_edge() const;

  /// Periodic linear interpolation of the band energy; throws if either
  /// bracketing grid point lacks the band.
  double energy_at(BandId which, double k) const;
  /// True when energy_at(which, k) has the grid support it needs.
  bool has_energy_at(BandId which, double k) const;

 private:
  ModelParams params_;
  int r_max_;
  std::vector<double> k_grid_;
  std::vector<std::optional<BandPoint>> lower_, upper_;
  BandInfo lower_info_, upper_info_;
};

/// Diagonalise the truncated relative-coordinate chain at momentum k and
/// extract the (at most two) bound states outside the scattering envelope.
BandColumn solve_band_column(const ModelParams& p, double k, int r_max);

/// Band structure over n_k points k_m = -pi + 2 pi m / n_k, m = 1..n_k
/// (uniform grid on (-pi, pi], matching an n_k-site ring).
BandStructure compute_band_structure(const ModelParams& p, int n_k,
                                     int r_max = 400);

/// Closed-form termination momentum of an incomplete band:
/// the band edge sits where J_k = U V / (U + 2 V); incomplete iff that value
/// lies in (0, 2 kappa), and then k_edge = 2 acos(J_edge / (2 kappa)).
std::optional<double> analytic_band_edge(const ModelParams& p, BandId which);

/// Refine the band termination point by bisecting the bound-state existence
/// predicate between the last bound and first unbound grid momenta.
std::optional<double> band_edge(const ModelParams& p, BandId which,
                                int r_max = 400, double k_tol = 1e-4);

/// CSV columns: k, lower_energy, upper_energy, scat_min, scat_max; cells for
/// missing band points are left empty. Floats use 12 significant digits.
void write_band_csv(const BandStructure& bs, const std::string& path);

}  // namespace ebh
