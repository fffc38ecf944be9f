#include "ebh/band.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace ebh {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

/// Givens-rotation QR of (T - sigma I) for a symmetric tridiagonal T.
/// R has three bands; the rotations are kept so Q^T can be applied to
/// right-hand sides during inverse iteration.
struct TridiagQR {
  Eigen::VectorXd r0, r1, r2;
  std::vector<std::pair<double, double>> cs;
  double scale = 1.0;
};

TridiagQR tridiag_qr(const Eigen::VectorXd& d, const Eigen::VectorXd& e, double sigma) {
  const int n = static_cast<int>(d.size());
  TridiagQR f;
  f.r0.setZero(n);
  f.r1.setZero(n);
  f.r2.setZero(n);
  f.cs.resize(n - 1);
  f.scale = d.cwiseAbs().maxCoeff() + 2 * e.cwiseAbs().maxCoeff() + std::abs(sigma);
  double a = d[0] - sigma, b = n > 1 ? e[0] : 0.0, c = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    const double sub = e[i];
    const double a1 = d[i + 1] - sigma;
    const double b1 = i + 2 < n ? e[i + 1] : 0.0;
    const double r = std::hypot(a, sub);
    const double cc = r == 0.0 ? 1.0 : a / r;
    const double ss = r == 0.0 ? 0.0 : sub / r;
    f.cs[i] = {cc, ss};
    f.r0[i] = r;
    f.r1[i] = cc * b + ss * a1;
    f.r2[i] = cc * c + ss * b1;
    a = -ss * b + cc * a1;
    b = -ss * c + cc * b1;
    c = 0.0;
  }
  f.r0[n - 1] = a;
  return f;
}

Eigen::VectorXd qr_solve(const TridiagQR& f, Eigen::VectorXd y) {
  const int n = static_cast<int>(y.size());
  for (int i = 0; i < n - 1; ++i) {
    const auto [cc, ss] = f.cs[i];
    const double yi = y[i], yj = y[i + 1];
    y[i] = cc * yi + ss * yj;
    y[i + 1] = -ss * yi + cc * yj;
  }
  const double tiny = 1e-300 + 1e-16 * f.scale;
  Eigen::VectorXd x(n);
  for (int i = n - 1; i >= 0; --i) {
    double acc = y[i];
    if (i + 1 < n) acc -= f.r1[i] * x[i + 1];
    if (i + 2 < n) acc -= f.r2[i] * x[i + 2];
    double piv = f.r0[i];
    if (std::abs(piv) < tiny) piv = piv >= 0 ? tiny : -tiny;
    x[i] = acc / piv;
  }
  return x;
}

Eigen::VectorXd tridiag_apply(const Eigen::VectorXd& d, const Eigen::VectorXd& e,
                              const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd y = d.cwiseProduct(x);
  for (int i = 0; i < n - 1; ++i) {
    y[i] += e[i] * x[i + 1];
    y[i + 1] += e[i] * x[i];
  }
  return y;
}

/// Eigenvector of the tridiagonal (d, e) at an isolated eigenvalue sigma.
Eigen::VectorXd inverse_iteration(const Eigen::VectorXd& d, const Eigen::VectorXd& e,
                                  double sigma) {
  const int n = static_cast<int>(d.size());
  const TridiagQR f = tridiag_qr(d, e, sigma);
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = uni(rng);
  x.normalize();
  for (int it = 0; it < 4; ++it) {
    x = qr_solve(f, x);
    x.normalize();
    const double res = (tridiag_apply(d, e, x) - sigma * x).norm();
    if (res < 1e-9 * std::max(1.0, f.scale)) return x;
  }
  throw std::runtime_error("band: inverse iteration failed to converge");
}

/// Decay exponent of the eigenvector tail (exact geometric for r >= 1).
double fit_beta(const Eigen::VectorXd& psi) {
  const double a2 = std::abs(psi[2]), a3 = std::abs(psi[3]), a4 = std::abs(psi[4]);
  if (a3 < 1e-250 || a4 < 1e-250) return 50.0;  // decays too fast to resolve
  return 0.5 * (std::log(a2 / a3) + std::log(a3 / a4));
}

}  // namespace

const char* to_string(BandId b) { return b == BandId::lower ? "lower" : "upper"; }

BandId band_id_from_string(const std::string& name) {
  if (name == "lower") return BandId::lower;
  if (name == "upper") return BandId::upper;
  throw std::invalid_argument("band: unknown band '" + name + "'");
}

BandColumn solve_band_column(const ModelParams& p, double k, int r_max) {
  p.validate();
  if (r_max < 8) throw std::invalid_argument("band: r_max must be at least 8");
  BandColumn col;
  col.k = k;
  double jk = 2.0 * p.kappa * std::cos(k / 2);
  if (std::abs(jk) < 1e-12 * p.kappa) jk = 0.0;
  if (jk < 0.0)
    throw std::invalid_argument("band: momentum must lie in (-pi, pi]");
  col.j_k = jk;
  const int dim = r_max + 1;

  if (jk == 0.0) {
    // decoupled chain: a state pinned at r = 0 (energy U) and one at r = 1
    // (energy V); everything else is the zero-energy remnant of the continuum
    const double inf = std::numeric_limits<double>::infinity();
    auto add = [&](double energy, int r0) {
      if (std::abs(energy) < 1e-12) return;
      BandPoint pt;
      pt.energy = energy;
      pt.root.beta = inf;
      pt.root.branch = energy > 0 ? Branch::minus : Branch::plus;
      pt.root.energy = energy > 0 ? inf : -inf;
      pt.root.energy_analytic = pt.root.energy;
      pt.root.residual = 0.0;
      pt.psi_rel = Eigen::VectorXd::Zero(dim);
      pt.psi_rel[r0] = 1.0;
      col.bound.push_back(pt);
    };
    add(p.u, 0);
    add(p.v, 1);
    std::sort(col.bound.begin(), col.bound.end(),
              [](const BandPoint& a, const BandPoint& b) { return a.energy < b.energy; });
    return col;
  }

  Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
  d[0] = p.u;
  d[1] = p.v;
  Eigen::VectorXd e = Eigen::VectorXd::Constant(dim - 1, -jk);
  e[0] = -std::sqrt(2.0) * jk;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& evs = solver.eigenvalues();

  const double edge_tol = 1e-6 * std::max(1.0, 2 * jk);
  std::vector<double> below, above;
  for (int i = 0; i < dim && evs[i] < -2 * jk - edge_tol; ++i) below.push_back(evs[i]);
  for (int i = dim - 1; i >= 0 && evs[i] > 2 * jk + edge_tol; --i) above.push_back(evs[i]);

  // cubic roots per branch, most tightly bound first, for cross-labelling
  const double u_red = p.u / jk, v_red = p.v / jk;
  auto accept_side = [&](const std::vector<double>& energies, Branch branch) {
    const auto roots = solve_bethe(u_red, v_red, branch, 0);
    std::size_t matched = 0;
    for (double energy : energies) {
      Eigen::VectorXd psi = inverse_iteration(d, e, energy);
      // A state close to the continuum edge may be a discretisation remnant;
      // probe its decay before accepting.  Far from the edge the eigenvector
      // tail can underflow to noise, so only edge-adjacent states are probed.
      const double gap = std::abs(energy) - 2 * jk;
      if (gap < 0.01 * std::max(1.0, 2 * jk) && fit_beta(psi) <= 1e-3) continue;
      if (matched >= roots.size())
        throw std::logic_error("band: chain shows more bound states than the cubic");
      BandPoint pt;
      pt.energy = energy;
      pt.root = roots[matched++];
      pt.root.energy = energy / jk;  // chain value is canonical
      if (psi[0] < 0 || (psi[0] == 0 && psi[1] < 0)) psi = -psi;
      pt.psi_rel = std::move(psi);
      col.bound.push_back(pt);
    }
  };
  accept_side(below, Branch::plus);
  accept_side(above, Branch::minus);
  std::sort(col.bound.begin(), col.bound.end(),
            [](const BandPoint& a, const BandPoint& b) { return a.energy < b.energy; });
  return col;
}

std::optional<double> analytic_band_edge(const ModelParams& p, BandId which) {
  p.validate();
  const double e_low = std::min(p.u, p.v), e_up = std::max(p.u, p.v);
  if (e_low == 0.0 || e_up == 0.0) return std::nullopt;  // single-band system

  // only the band adjacent to the continuum can terminate
  Branch branch;
  if (e_low > 0.0) {  // both bands above the continuum
    if (which == BandId::upper) return std::nullopt;
    branch = Branch::minus;
  } else if (e_up < 0.0) {  // both below
    if (which == BandId::lower) return std::nullopt;
    branch = Branch::plus;
  } else {  // one on each side
    branch = which == BandId::lower ? Branch::plus : Branch::minus;
  }

  const double denom = p.u + 2 * p.v;
  if (denom == 0.0) return std::nullopt;
  const double j_edge = -branch_sign(branch) * p.u * p.v / denom;
  if (!(j_edge > 0.0) || !(j_edge < 2 * p.kappa)) return std::nullopt;
  return 2.0 * std::acos(j_edge / (2 * p.kappa));
}

std::optional<double> band_edge(const ModelParams& p, BandId which, int r_max,
                                double k_tol) {
  const auto analytic = analytic_band_edge(p, which);
  if (!analytic) return std::nullopt;

  auto count = [&](double k) {
    return static_cast<int>(solve_band_column(p, k, r_max).bound.size());
  };
  double k_lo = 1e-6;           // band missing side (toward k = 0)
  double k_hi = kPi * (1 - 1e-9);
  const int full = count(k_hi);
  const int reduced = count(k_lo);
  if (full == reduced) return analytic;  // grid cannot resolve the sliver
  while (k_hi - k_lo > k_tol) {
    const double mid = 0.5 * (k_lo + k_hi);
    (count(mid) == full ? k_hi : k_lo) = mid;
  }
  return 0.5 * (k_lo + k_hi);
}

BandStructure::BandStructure(ModelParams params, int r_max, std::vector<double> k_grid,
                             std::vector<std::optional<BandPoint>> lower,
                             std::vector<std::optional<BandPoint>> upper,
                             BandInfo lower_info, BandInfo upper_info)
    : params_(std::move(params)),
      r_max_(r_max),
      k_grid_(std::move(k_grid)),
      lower_(std::move(lower)),
      upper_(std::move(upper)),
      lower_info_(lower_info),
      upper_info_(upper_info) {
  if (lower_.size() != k_grid_.size() || upper_.size() != k_grid_.size())
    throw std::invalid_argument("band: grid and band arrays disagree in size");
}

int BandStructure::index_of_k(double k, double tol) const {
  for (std::size_t i = 0; i < k_grid_.size(); ++i)
    if (std::abs(k_grid_[i] - k) < tol) return static_cast<int>(i);
  return -1;
}

const std::vector<std::optional<BandPoint>>& BandStructure::band(BandId which) const {
  return which == BandId::lower ? lower_ : upper_;
}

const BandInfo& BandStructure::info(BandId which) const {
  return which == BandId::lower ? lower_info_ : upper_info_;
}

std::pair<double, double> BandStructure::scattering_envelope(double k) const {
  const double jk = std::abs(2.0 * params_.kappa * std::cos(k / 2));
  return {-2 * jk, 2 * jk};
}

double BandStructure::gap_at_zone_edge() const {
  const int q = index_of_k(kPi);
  if (q < 0) throw std::logic_error("band: grid lacks the zone edge");
  if (!lower_[q] || !upper_[q]) return std::numeric_limits<double>::infinity();
  return std::abs(upper_[q]->energy - lower_[q]->energy);
}

double BandStructure::energy_at(BandId which, double k) const {
  const int n = n_k();
  double kw = std::remainder(k, 2 * kPi);
  if (kw <= -kPi) kw += 2 * kPi;
  // grid point m (1-based) sits at -pi + 2 pi m / n
  const double t = (kw + kPi) * n / (2 * kPi) - 1.0;  // in (-1, n-1]
  const auto& arr = band(which);
  const int q0 = static_cast<int>(std::floor(t));
  const double frac = t - q0;
  const int qa = (q0 % n + n) % n;
  const int qb = (qa + 1) % n;
  if (!arr[qa] || (frac > 1e-12 && !arr[qb]))
    throw std::runtime_error("band: no " + std::string(to_string(which)) +
                             " band at k = " + fmt12(kw));
  if (frac <= 1e-12) return arr[qa]->energy;
  return (1 - frac) * arr[qa]->energy + frac * arr[qb]->energy;
}

bool BandStructure::has_energy_at(BandId which, double k) const {
  const int n = n_k();
  double kw = std::remainder(k, 2 * kPi);
  if (kw <= -kPi) kw += 2 * kPi;
  const double t = (kw + kPi) * n / (2 * kPi) - 1.0;
  const auto& arr = band(which);
  const int q0 = static_cast<int>(std::floor(t));
  const double frac = t - q0;
  const int qa = (q0 % n + n) % n;
  const int qb = (qa + 1) % n;
  return arr[qa] && (frac <= 1e-12 || arr[qb]);
}

BandStructure compute_band_structure(const ModelParams& p, int n_k, int r_max) {
  p.validate();
  if (n_k < 4) throw std::invalid_argument("band: need at least 4 momentum points");

  std::vector<double> grid(n_k);
  std::vector<BandColumn> cols(n_k);
  for (int m = 1; m <= n_k; ++m) {
    const int q = m - 1;
    grid[q] = -kPi + 2 * kPi * m / n_k;
    const int mirror = n_k - 2 - q;  // same |k|, already computed
    if (grid[q] < 0 && mirror >= 0 && mirror < n_k && mirror > q) {
      // negative-k column equals its positive partner; fill later
      continue;
    }
    cols[q] = solve_band_column(p, grid[q], r_max);
  }
  for (int q = 0; q < n_k; ++q) {
    if (grid[q] >= 0) continue;
    const int mirror = n_k - 2 - q;
    cols[q] = cols[mirror];
    cols[q].k = grid[q];
  }

  std::vector<std::optional<BandPoint>> lower(n_k), upper(n_k);
  double ref_lo = std::numeric_limits<double>::quiet_NaN();
  double ref_up = std::numeric_limits<double>::quiet_NaN();
  // walk the non-negative half from the zone edge inward, tracking continuity
  for (int q = n_k - 1; q >= 0; --q) {
    if (grid[q] < -1e-15) break;
    const auto& b = cols[q].bound;
    if (b.size() == 2) {
      lower[q] = b[0];
      upper[q] = b[1];
      ref_lo = b[0].energy;
      ref_up = b[1].energy;
    } else if (b.size() == 1) {
      const double energy = b[0].energy;
      bool to_lower;
      if (!std::isnan(ref_lo) && !std::isnan(ref_up))
        to_lower = std::abs(energy - ref_lo) <= std::abs(energy - ref_up);
      else if (!std::isnan(ref_lo))
        to_lower = true;
      else if (!std::isnan(ref_up))
        to_lower = false;
      else
        to_lower = energy < 0.0;  // lone band: below the continuum counts as lower
      (to_lower ? lower : upper)[q] = b[0];
      (to_lower ? ref_lo : ref_up) = energy;
    } else if (b.size() > 2) {
      throw std::logic_error("band: more than two bound states in one column");
    }
  }
  for (int q = 0; q < n_k; ++q) {  // mirror assignments onto k < 0
    if (grid[q] >= -1e-15) continue;
    const int mirror = n_k - 2 - q;
    lower[q] = lower[mirror];
    upper[q] = upper[mirror];
  }

  auto make_info = [&](BandId which, const std::vector<std::optional<BandPoint>>& arr) {
    BandInfo info;
    const auto analytic = analytic_band_edge(p, which);
    bool any_missing = false;
    double min_present = kPi;
    bool any_present = false;
    for (int q = 0; q < n_k; ++q) {
      if (arr[q]) {
        any_present = true;
        min_present = std::min(min_present, std::abs(grid[q]));
      } else {
        any_missing = true;
      }
    }
    if (analytic) {
      info.complete = false;
      info.k_edge = analytic;
    } else if (any_missing && any_present) {
      info.complete = false;
      info.k_edge = std::max(0.0, min_present - kPi / n_k);
    } else {
      info.complete = any_present;  // fully absent band is not "complete"
      if (!any_present) info.k_edge = kPi;  // terminates before it begins
    }
    return info;
  };
  BandInfo lo_info = make_info(BandId::lower, lower);
  BandInfo up_info = make_info(BandId::upper, upper);

  return BandStructure(p, r_max, std::move(grid), std::move(lower), std::move(upper),
                       lo_info, up_info);
}

void write_band_csv(const BandStructure& bs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("band: cannot open " + path);
  out << "k,lower_energy,upper_energy,scat_min,scat_max\n";
  for (int q = 0; q < bs.n_k(); ++q) {
    const double k = bs.k_grid()[q];
    const auto [lo, hi] = bs.scattering_envelope(k);
    out << fmt12(k) << ',';
    if (bs.band(BandId::lower)[q]) out << fmt12(bs.band(BandId::lower)[q]->energy);
    out << ',';
    if (bs.band(BandId::upper)[q]) out << fmt12(bs.band(BandId::upper)[q]->energy);
    out << ',' << fmt12(lo) << ',' << fmt12(hi) << '\n';
  }
}

}  // namespace ebh
