#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "ebh/field.hpp"

namespace ebh {

enum class Boundary { open, periodic };

const char* to_string(Boundary b);
Boundary boundary_from_string(const std::string& name);

/// Lattice and interaction parameters of the two-boson extended Bose-Hubbard
/// chain: H0 = -kappa sum (a_j^dag a_{j+1} + h.c.) + (U/2) sum n_j (n_j - 1)
///             + V sum n_j n_{j+1}.
struct ModelParams {
  int n_sites = 160;
  double kappa = 1.0;  ///< hopping strength, > 0
  double u = 0.0;      ///< on-site interaction U
  double v = 0.0;      ///< nearest-neighbour interaction V
  Boundary boundary = Boundary::open;

  void validate() const;  ///< throws std::invalid_argument on bad values
};

/// Two-boson configuration basis. Configuration (j, r) places the bosons on
/// sites j and j + r, with 1 <= j <= N and 0 <= r <= N - j; r = 0 is the
/// doubly occupied site, normalised as (a_j^dag)^2 / sqrt(2) |vac>.
/// States are ordered lexicographically in (j, r); dimension N (N + 1) / 2.
class PairBasis {
 public:
  explicit PairBasis(int n_sites);

  int n_sites() const { return n_sites_; }
  int dimension() const { return dim_; }

  int index(int j, int r) const;              ///< throws on invalid (j, r)
  std::pair<int, int> config(int idx) const;  ///< inverse of index()

  /// Canonical index of the unordered site pair {a, b}, 1-based sites.
  int index_of_sites(int a, int b) const;

 private:
  int n_sites_;
  int dim_;
  std::vector<int> row_offset_;  // row_offset_[j-1] == index(j, 0)
};

/// Real symmetric sparse operator (all Hamiltonians here are real in the
/// configuration bases used).
class SparseOperator {
 public:
  SparseOperator() = default;
  SparseOperator(int dim, const std::vector<Eigen::Triplet<double>>& entries);

  int dimension() const { return dim_; }
  int nonzeros() const { return static_cast<int>(mat_.nonZeros()); }
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix() const { return mat_; }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd dense() const;
  double symmetry_defect() const;  ///< max |A - A^T| entry
  /// Gershgorin bounds containing the whole spectrum.
  std::pair<double, double> spectral_bounds() const;

 private:
  int dim_ = 0;
  Eigen::SparseMatrix<double, Eigen::RowMajor> mat_;
};

/// Full two-boson Hamiltonian H0 + force * X in the pair basis. The diagonal
/// of configuration (j, r) is U [r == 0] + V [r adjacent] + force (2j + r);
/// off-diagonal hopping is -kappa, enhanced by sqrt(2) on bonds that connect a
/// doubly occupied configuration to a nearest-neighbour pair.
/// Periodic boundary requires force == 0 (the tilt breaks the ring).
SparseOperator build_full_hamiltonian(const ModelParams& p, const PairBasis& basis,
                                      double force);

/// Momentum-space relative-coordinate chain H_eq^k, truncated at r_max:
/// semi-infinite chain with hopping -J_k (-sqrt(2) J_k on the 0-1 bond),
/// J_k = 2 kappa cos(k/2), and diagonal U at r = 0, V at r = 1.
SparseOperator build_keq_hamiltonian(const ModelParams& p, double k, int r_max);

/// Strong-coupling centre-of-mass chain: uniform hopping -sqrt(2) kappa and
/// diagonal force * l + (delta/2) (-1)^l on l = 0 .. length-1, delta = U - V.
/// The constant (U + V)/2 offset is omitted.
SparseOperator build_effective_hamiltonian(const ModelParams& p, int length,
                                           double force);

/// One-boson chain with the same conventions (site index from 1):
/// hopping -kappa, diagonal force * j.
SparseOperator build_single_particle_hamiltonian(const ModelParams& p, double force);

/// Diagonal of the summed coordinate X: X(j, r) = 2j + r.
Eigen::VectorXd com_coordinate(const PairBasis& basis);

/// One-site translation operator on the pair basis (periodic lattices only).
SparseOperator translation_operator(const PairBasis& basis);

}  // namespace ebh
