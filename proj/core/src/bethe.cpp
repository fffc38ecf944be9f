#include "ebh/bethe.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace ebh {

const char* to_string(Branch b) { return b == Branch::plus ? "plus" : "minus"; }

const char* to_string(Region r) {
  switch (r) {
    case Region::I: return "I";
    case Region::II: return "II";
    case Region::III: return "III";
    case Region::IV: return "IV";
    case Region::V: return "V";
    case Region::VI: return "VI";
  }
  return "?";
}

std::vector<double> cubic_real_roots(double a2, double a1, double a0) {
  Eigen::Matrix3d companion;
  companion << 0, 0, -a0,
               1, 0, -a1,
               0, 1, -a2;
  Eigen::EigenSolver<Eigen::Matrix3d> es(companion);
  std::vector<double> roots;
  for (int i = 0; i < 3; ++i) {
    const std::complex<double> z = es.eigenvalues()[i];
    const double scale = std::max(1.0, std::abs(z));
    if (std::abs(z.imag()) > 1e-8 * scale) continue;
    double x = z.real();
    for (int it = 0; it < 3; ++it) {  // Newton polish
      const double f = ((x + a2) * x + a1) * x + a0;
      const double fp = (3 * x + 2 * a2) * x + a1;
      if (std::abs(fp) < 1e-14) break;
      x -= f / fp;
    }
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

double boundary_indicator(double u, double v, Branch branch) {
  return u * (1.0 + branch_sign(branch) * v) + 2.0 * v;
}

namespace {

/// Eigenvalues of the truncated relative-coordinate chain at J = 1.
Eigen::VectorXd chain_spectrum(double u, double v, int r_max) {
  const int dim = r_max + 1;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
  diag[0] = u;
  diag[1] = v;
  Eigen::VectorXd sub = Eigen::VectorXd::Constant(dim - 1, -1.0);
  sub[0] = -std::sqrt(2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

}  // namespace

std::vector<BetheRoot> solve_bethe(double u, double v, Branch branch, int r_max) {
  const double s = branch_sign(branch);
  std::vector<BetheRoot> out;
  for (double x : cubic_real_roots(s * (u + v), u * v - 1.0, s * v)) {
    if (!(x > 1.0)) continue;
    BetheRoot r;
    r.branch = branch;
    r.beta = std::log(x);
    r.energy_analytic = -s * (x + 1.0 / x);
    r.energy = r.energy_analytic;
    r.residual = std::abs(((x + s * (u + v)) * x + (u * v - 1.0)) * x + s * v);
    out.push_back(r);
  }
  std::sort(out.begin(), out.end(),
            [](const BetheRoot& a, const BetheRoot& b) { return a.beta > b.beta; });

  if (r_max >= 8 && !out.empty()) {
    const Eigen::VectorXd evs = chain_spectrum(u, v, r_max);
    for (BetheRoot& r : out) {
      if (r.beta * r_max < 25.0) continue;  // tail not resolved by the chain
      int best = 0;
      (evs.array() - r.energy_analytic).abs().minCoeff(&best);
      const double lambda = evs[best];
      const double scale = std::max(1.0, std::abs(r.energy_analytic));
      if (std::abs(lambda - r.energy_analytic) > 1e-6 * scale)
        throw std::runtime_error(
            "bethe: closed-form bound energy disagrees with the chain spectrum");
      r.energy = lambda;
    }
  }
  return out;
}

PhasePoint classify_region(double u, double v, double boundary_tol) {
  PhasePoint pt;
  pt.u = u;
  pt.v = v;

  int n_plus = 0, n_minus = 0;
  for (Branch b : {Branch::plus, Branch::minus}) {
    const double s = branch_sign(b);
    for (double x : cubic_real_roots(s * (u + v), u * v - 1.0, s * v))
      if (x > 1.0) (b == Branch::plus ? n_plus : n_minus)++;
  }
  pt.bound_content.assign(static_cast<std::size_t>(n_plus), Branch::plus);
  pt.bound_content.insert(pt.bound_content.end(), static_cast<std::size_t>(n_minus),
                          Branch::minus);
  pt.on_boundary = std::abs(boundary_indicator(u, v, Branch::plus)) < boundary_tol ||
                   std::abs(boundary_indicator(u, v, Branch::minus)) < boundary_tol;

  if (n_plus == 0 && n_minus == 2) pt.region = Region::I;
  else if (n_plus == 2 && n_minus == 0) pt.region = Region::III;
  else if (n_plus == 1 && n_minus == 1) pt.region = v < 0 ? Region::II : Region::IV;
  else if (n_plus == 0 && n_minus == 1) pt.region = Region::V;
  else if (n_plus == 1 && n_minus == 0) pt.region = Region::VI;
  else if (n_plus == 0 && n_minus == 0) {
    // only on transition curves: a marginal state sits exactly at the band edge
    pt.region = u >= 0 ? Region::V : Region::VI;
    pt.on_boundary = true;
  } else {
    throw std::logic_error("bethe: impossible bound-state count (" +
                           std::to_string(n_plus) + ", " + std::to_string(n_minus) + ")");
  }
  return pt;
}

}  // namespace ebh
