#include "ebh/packet.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ebh {

namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

/// Last relative index carrying significant amplitude.
int tail_stop(const Eigen::VectorXd& psi_rel) {
  int stop = static_cast<int>(psi_rel.size()) - 1;
  while (stop > 1 && std::abs(psi_rel[stop]) < 1e-18) --stop;
  return stop;
}

/// Powers u^m for m = 0..m_max of u = exp(i k / 2).
std::vector<cd> half_phase_powers(double k, int m_max) {
  std::vector<cd> pow(static_cast<std::size_t>(m_max) + 1);
  const cd u = std::exp(cd(0.0, k / 2));
  pow[0] = 1.0;
  for (int m = 1; m <= m_max; ++m) pow[m] = pow[m - 1] * u;
  return pow;
}

}  // namespace

StateVector build_packet(const PacketSpec& spec, const BandStructure& band,
                         const PairBasis& basis) {
  if (!(spec.alpha > 0))
    throw std::invalid_argument("packet: alpha must be positive");
  if (!(spec.tail_tolerance > 0))
    throw std::invalid_argument("packet: tail_tolerance must be positive");
  const int n = basis.n_sites();
  if (band.n_k() != n)
    throw std::invalid_argument(
        "packet: band grid must match the lattice (n_k == n_sites)");

  const auto& arr = band.band(spec.band);
  StateVector state;
  state.amplitudes = Eigen::VectorXcd::Zero(basis.dimension());

  double weight_used = 0.0, weight_missing = 0.0;
  for (int q = 0; q < n; ++q) {
    const double k = band.k_grid()[q];
    const double dk = std::remainder(k - spec.k0, 2 * kPi);
    if (std::abs(dk) > 4 * spec.alpha) continue;
    const double w2 = std::exp(-dk * dk / (spec.alpha * spec.alpha));
    if (!arr[q]) {
      weight_missing += w2;
      continue;
    }
    weight_used += w2;
    const cd w = std::exp(-dk * dk / (2 * spec.alpha * spec.alpha)) *
                 std::exp(cd(0.0, -spec.n_a * dk));
    const Eigen::VectorXd& psi_rel = arr[q]->psi_rel;
    const int r_stop = tail_stop(psi_rel);
    const auto pow = half_phase_powers(k, 2 * n + r_stop);
    for (int j = 1; j <= n; ++j) {
      const int r_hi = std::min(n - j, r_stop);
      const int base = basis.index(j, 0);
      for (int r = 0; r <= r_hi; ++r)
        state.amplitudes[base + r] += w * psi_rel[r] * pow[2 * j + r];
    }
  }

  const double total = weight_used + weight_missing;
  if (!(total > 0))
    throw std::runtime_error("packet: no momentum support on the grid");
  if (weight_missing / total > spec.tail_tolerance)
    throw std::runtime_error(
        "packet: " + std::to_string(weight_missing / total) +
        " of the momentum weight falls where the band does not exist "
        "(tolerance " + std::to_string(spec.tail_tolerance) + ")");
  if (!(state.norm() > 0))
    throw std::runtime_error("packet: assembled state has zero norm");
  state.normalize();

  // Warn when the tails do not clear the lattice ends: observables then pick
  // up boundary reflections from the very first time step.
  const int guard = 10;
  if (n > 2 * guard) {
    double edge_weight = 0.0;
    for (int j = 1; j <= n; ++j) {
      const int base = basis.index(j, 0);
      for (int r = 0; r <= n - j; ++r) {
        if (j <= guard || j + r > n - guard)
          edge_weight += std::norm(state.amplitudes[base + r]);
      }
    }
    if (edge_weight > 1e-4)
      std::fprintf(stderr,
                   "warning: packet carries %.3g of its weight within %d sites "
                   "of the lattice ends; expect boundary reflections\n",
                   edge_weight, guard);
  }
  return state;
}

MomentumDistribution momentum_distribution(const StateVector& state,
                                           const BandStructure& band,
                                           const PairBasis& basis) {
  const int n = basis.n_sites();
  if (band.n_k() != n)
    throw std::invalid_argument(
        "packet: band grid must match the lattice (n_k == n_sites)");
  if (state.dimension() != basis.dimension())
    throw std::invalid_argument("packet: state does not match the basis");

  MomentumDistribution dist;
  dist.k = band.k_grid();
  dist.p_lower.assign(n, 0.0);
  dist.p_upper.assign(n, 0.0);
  const double nrm2 = state.amplitudes.squaredNorm();
  if (!(nrm2 > 0)) throw std::invalid_argument("packet: zero state");

  for (BandId which : {BandId::lower, BandId::upper}) {
    const auto& arr = band.band(which);
    auto& p = which == BandId::lower ? dist.p_lower : dist.p_upper;
    for (int q = 0; q < n; ++q) {
      if (!arr[q]) continue;
      const double k = band.k_grid()[q];
      const Eigen::VectorXd& psi_rel = arr[q]->psi_rel;
      const int r_stop = tail_stop(psi_rel);
      const auto pow = half_phase_powers(k, 2 * n + r_stop);
      cd overlap = 0.0;
      for (int j = 1; j <= n; ++j) {
        const int r_hi = std::min(n - j, r_stop);
        const int base = basis.index(j, 0);
        for (int r = 0; r <= r_hi; ++r)
          overlap += psi_rel[r] * std::conj(pow[2 * j + r]) *
                     state.amplitudes[base + r];
      }
      p[q] = std::norm(overlap) / static_cast<double>(n) / nrm2;
    }
  }

  cd mean_lo = 0.0, mean_up = 0.0;
  for (int q = 0; q < n; ++q) {
    dist.weight_lower += dist.p_lower[q];
    dist.weight_upper += dist.p_upper[q];
    mean_lo += dist.p_lower[q] * std::exp(cd(0.0, dist.k[q]));
    mean_up += dist.p_upper[q] * std::exp(cd(0.0, dist.k[q]));
  }
  dist.leakage = 1.0 - dist.weight_lower - dist.weight_upper;
  dist.circular_mean_lower = std::arg(mean_lo);
  dist.circular_mean_upper = std::arg(mean_up);
  return dist;
}

}  // namespace ebh
