#pragma once

#include <optional>
#include <vector>

namespace ebh {

/// Parity branch of a bound-pair ansatz: amplitudes carry (+1)^r or (-1)^r.
enum class Branch { plus, minus };

inline double branch_sign(Branch b) { return b == Branch::plus ? 1.0 : -1.0; }
const char* to_string(Branch b);

/// One bound-state root of the cubic
///   s e^{3 beta} + (u + v) e^{2 beta} + s (u v - 1) e^{beta} + v = 0,
/// s = branch sign, u = U / J_k, v = V / J_k, with decay exponent beta > 0.
/// Energies are reported in units of J_k.
struct BetheRoot {
  double beta = 0.0;
  Branch branch = Branch::plus;
  double energy = 0.0;           ///< E / J_k from the relative-coordinate chain
  double energy_analytic = 0.0;  ///< -2 s cosh(beta), matches energy
  double residual = 0.0;         ///< cubic residual at the accepted root
};

/// All real roots of x^3 + a2 x^2 + a1 x + a0, ascending.
std::vector<double> cubic_real_roots(double a2, double a1, double a0);

/// Physical bound-state roots (e^beta > 1) of one branch at reduced couplings
/// u = U / J_k, v = V / J_k. Roots are cross-checked against the truncated
/// relative-coordinate chain of length r_max; returned sorted by beta
/// descending (most tightly bound first).
std::vector<BetheRoot> solve_bethe(double u, double v, Branch branch,
                                   int r_max = 400);

/// Phase regions of the (u, v) bound-state diagram at fixed J_k:
///   I   - two minus-branch states          (n+ = 0, n- = 2)
///   II  - one of each, attractive side     (n+ = 1, n- = 1, v < 0)
///   III - two plus-branch states           (n+ = 2, n- = 0)
///   IV  - one of each, repulsive side      (n+ = 1, n- = 1, v >= 0)
///   V   - single minus-branch state        (n+ = 0, n- = 1)
///   VI  - single plus-branch state         (n+ = 1, n- = 0)
enum class Region { I, II, III, IV, V, VI };

const char* to_string(Region r);

/// Boundary indicator g_s(u, v) = u (1 + s v) + 2 v for branch sign s; a bound
/// state of that branch appears or disappears where the indicator changes sign
/// (the curve u = -2v / (1 + s v)).
double boundary_indicator(double u, double v, Branch branch);

struct PhasePoint {
  double u = 0.0;
  double v = 0.0;
  Region region = Region::I;
  std::vector<Branch> bound_content;  ///< one entry per bound state
  bool on_boundary = false;           ///< within tolerance of a transition curve
};

/// Classify (u, v) by analytic root counting alone (no diagonalisation);
/// cheap enough for dense phase-map rasters.
PhasePoint classify_region(double u, double v, double boundary_tol = 1e-9);

}  // namespace ebh
