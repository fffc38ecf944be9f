#include "ebh/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ebh {

const char* to_string(Boundary b) {
  return b == Boundary::open ? "open" : "periodic";
}

Boundary boundary_from_string(const std::string& name) {
  if (name == "open") return Boundary::open;
  if (name == "periodic") return Boundary::periodic;
  throw std::invalid_argument("model: unknown boundary '" + name + "'");
}

void ModelParams::validate() const {
  if (n_sites < 2)
    throw std::invalid_argument("model: n_sites must be at least 2, got " +
                                std::to_string(n_sites));
  if (!(kappa > 0.0))
    throw std::invalid_argument("model: kappa must be positive");
  if (!std::isfinite(u) || !std::isfinite(v))
    throw std::invalid_argument("model: interactions must be finite");
}

PairBasis::PairBasis(int n_sites) : n_sites_(n_sites) {
  if (n_sites < 1) throw std::invalid_argument("basis: n_sites must be positive");
  dim_ = n_sites * (n_sites + 1) / 2;
  row_offset_.resize(n_sites);
  int off = 0;
  for (int j = 1; j <= n_sites; ++j) {
    row_offset_[j - 1] = off;
    off += n_sites - j + 1;  // r = 0 .. n_sites - j
  }
}

int PairBasis::index(int j, int r) const {
  if (j < 1 || j > n_sites_ || r < 0 || r > n_sites_ - j)
    throw std::out_of_range("basis: configuration (" + std::to_string(j) + ", " +
                            std::to_string(r) + ") out of range");
  return row_offset_[j - 1] + r;
}

std::pair<int, int> PairBasis::config(int idx) const {
  if (idx < 0 || idx >= dim_) throw std::out_of_range("basis: index out of range");
  auto it = std::upper_bound(row_offset_.begin(), row_offset_.end(), idx);
  const int j = static_cast<int>(it - row_offset_.begin());  // row_offset_[j-1] <= idx
  return {j, idx - row_offset_[j - 1]};
}

int PairBasis::index_of_sites(int a, int b) const {
  if (a < 1 || a > n_sites_ || b < 1 || b > n_sites_)
    throw std::out_of_range("basis: site out of range");
  const int j = std::min(a, b);
  return index(j, std::abs(a - b));
}

SparseOperator::SparseOperator(int dim,
                               const std::vector<Eigen::Triplet<double>>& entries)
    : dim_(dim), mat_(dim, dim) {
  mat_.setFromTriplets(entries.begin(), entries.end());
  mat_.makeCompressed();
}

Eigen::VectorXcd SparseOperator::apply(const Eigen::VectorXcd& x) const {
  Eigen::VectorXd xr = x.real(), xi = x.imag();
  Eigen::VectorXd yr = mat_ * xr, yi = mat_ * xi;
  Eigen::VectorXcd y(dim_);
  y.real() = yr;
  y.imag() = yi;
  return y;
}

Eigen::VectorXd SparseOperator::apply(const Eigen::VectorXd& x) const {
  return mat_ * x;
}

Eigen::MatrixXd SparseOperator::dense() const { return Eigen::MatrixXd(mat_); }

double SparseOperator::symmetry_defect() const {
  Eigen::SparseMatrix<double, Eigen::RowMajor> t = mat_.transpose();
  Eigen::SparseMatrix<double, Eigen::RowMajor> d = mat_ - t;
  double m = 0.0;
  for (int i = 0; i < d.outerSize(); ++i)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(d, i); it; ++it)
      m = std::max(m, std::abs(it.value()));
  return m;
}

std::pair<double, double> SparseOperator::spectral_bounds() const {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (int i = 0; i < mat_.outerSize(); ++i) {
    double center = 0.0, radius = 0.0;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(mat_, i); it; ++it) {
      if (it.col() == i)
        center = it.value();
      else
        radius += std::abs(it.value());
    }
    if (first || center - radius < lo) lo = center - radius;
    if (first || center + radius > hi) hi = center + radius;
    first = false;
  }
  return {lo, hi};
}

namespace {

int wrap_site(int s, int n) { return (s - 1 + n) % n + 1; }

}  // namespace

SparseOperator build_full_hamiltonian(const ModelParams& p, const PairBasis& basis,
                                      double force) {
  p.validate();
  if (p.n_sites != basis.n_sites())
    throw std::invalid_argument("model: basis size does not match n_sites");
  const bool periodic = p.boundary == Boundary::periodic;
  if (periodic && force != 0.0)
    throw std::invalid_argument(
        "model: a nonzero tilt is incompatible with periodic boundaries");

  const int n = p.n_sites;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(basis.dimension()) * 5);

  for (int i = 0; i < basis.dimension(); ++i) {
    const auto [j, r] = basis.config(i);
    double diag = force * (2 * j + r);
    if (r == 0) diag += p.u;
    if (r == 1 || (periodic && r == n - 1)) diag += p.v;
    if (diag != 0.0) trip.emplace_back(i, i, diag);

    // one directed hop per (boson, direction); the reverse element comes from
    // the target configuration's own enumeration
    const int site_a = j, site_b = j + r;
    const int n_movers = (r == 0) ? 1 : 2;
    for (int m = 0; m < n_movers; ++m) {
      const int s = (m == 0) ? site_a : site_b;
      const int other = (m == 0) ? site_b : site_a;
      for (int d : {+1, -1}) {
        int sp = s + d;
        if (periodic)
          sp = wrap_site(sp, n);
        else if (sp < 1 || sp > n)
          continue;
        const int tgt = basis.index_of_sites(other, sp);
        const auto [tj, tr] = basis.config(tgt);
        const double amp = (r == 0 || tr == 0) ? std::sqrt(2.0) : 1.0;
        trip.emplace_back(tgt, i, -p.kappa * amp);
      }
    }
  }
  return SparseOperator(basis.dimension(), trip);
}

SparseOperator build_keq_hamiltonian(const ModelParams& p, double k, int r_max) {
  p.validate();
  if (r_max < 2) throw std::invalid_argument("model: r_max must be at least 2");
  const double jk = 2.0 * p.kappa * std::cos(k / 2);
  const int dim = r_max + 1;  // r = 0 .. r_max
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(dim) * 3);
  trip.emplace_back(0, 0, p.u);
  trip.emplace_back(1, 1, p.v);
  const double h01 = -std::sqrt(2.0) * jk;
  trip.emplace_back(0, 1, h01);
  trip.emplace_back(1, 0, h01);
  for (int r = 1; r + 1 < dim; ++r) {
    trip.emplace_back(r, r + 1, -jk);
    trip.emplace_back(r + 1, r, -jk);
  }
  return SparseOperator(dim, trip);
}

SparseOperator build_effective_hamiltonian(const ModelParams& p, int length,
                                           double force) {
  p.validate();
  if (length < 2) throw std::invalid_argument("model: chain length must be at least 2");
  const double delta = p.u - p.v;
  const double hop = -std::sqrt(2.0) * p.kappa;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(length) * 3);
  for (int l = 0; l < length; ++l) {
    const double stagger = (l % 2 == 0) ? delta / 2 : -delta / 2;
    const double diag = force * l + stagger;
    if (diag != 0.0) trip.emplace_back(l, l, diag);
    if (l + 1 < length) {
      trip.emplace_back(l, l + 1, hop);
      trip.emplace_back(l + 1, l, hop);
    }
  }
  return SparseOperator(length, trip);
}

SparseOperator build_single_particle_hamiltonian(const ModelParams& p, double force) {
  p.validate();
  const bool periodic = p.boundary == Boundary::periodic;
  if (periodic && force != 0.0)
    throw std::invalid_argument(
        "model: a nonzero tilt is incompatible with periodic boundaries");
  const int n = p.n_sites;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 3);
  for (int j = 1; j <= n; ++j) {
    if (force != 0.0) trip.emplace_back(j - 1, j - 1, force * j);
    if (j < n) {
      trip.emplace_back(j - 1, j, -p.kappa);
      trip.emplace_back(j, j - 1, -p.kappa);
    }
  }
  if (periodic && n > 2) {
    trip.emplace_back(n - 1, 0, -p.kappa);
    trip.emplace_back(0, n - 1, -p.kappa);
  }
  return SparseOperator(n, trip);
}

Eigen::VectorXd com_coordinate(const PairBasis& basis) {
  Eigen::VectorXd x(basis.dimension());
  for (int i = 0; i < basis.dimension(); ++i) {
    const auto [j, r] = basis.config(i);
    x[i] = 2 * j + r;
  }
  return x;
}

SparseOperator translation_operator(const PairBasis& basis) {
  const int n = basis.n_sites();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(basis.dimension());
  for (int i = 0; i < basis.dimension(); ++i) {
    const auto [j, r] = basis.config(i);
    const int a = wrap_site(j + 1, n);
    const int b = wrap_site(j + r + 1, n);
    trip.emplace_back(basis.index_of_sites(a, b), i, 1.0);
  }
  return SparseOperator(basis.dimension(), trip);
}

}  // namespace ebh
