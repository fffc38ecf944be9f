#include "ebh/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "ebh/observables.hpp"

namespace ebh {

namespace {

using cd = std::complex<double>;

/// Chebyshev coefficients (2 - delta_n0) i^{-n} J_n(tau) are assembled on the
/// fly; this returns the Bessel factors J_n(tau) until they are negligible.
std::vector<double> bessel_coefficients(double tau, double tol) {
  const double x = std::abs(tau);
  std::vector<double> c;
  int quiet = 0;
  for (int n = 0; n < 20000; ++n) {
    double jn = std::cyl_bessel_j(n, x);
    if (tau < 0 && n % 2 == 1) jn = -jn;  // J_n(-x) = (-1)^n J_n(x)
    c.push_back(jn);
    if (n > x && std::abs(jn) < tol) {
      if (++quiet >= 3) break;
    } else {
      quiet = 0;
    }
  }
  if (c.size() >= 20000)
    throw std::runtime_error("propagate: Chebyshev series failed to converge");
  return c;
}

/// Polynomial propagator for H = H0 + f * diag(x) with fixed spectral bounds
/// wide enough for every f used; coefficients are cached per distinct dt.
class ChebPropagator {
 public:
  ChebPropagator(const SparseOperator& h0, const Eigen::VectorXd* xdiag,
                 double f_max, double tol = 1e-14)
      : h0_(h0), xdiag_(xdiag), tol_(tol) {
    auto [lo, hi] = h0.spectral_bounds();
    if (xdiag_ && f_max > 0) {
      const double extra = f_max * xdiag_->cwiseAbs().maxCoeff();
      lo -= extra;
      hi += extra;
    }
    a_ = 0.5 * (hi + lo);
    b_ = std::max(0.5 * (hi - lo), 1e-12);
  }

  void set_force(double f) { f_ = f; }

  Eigen::VectorXcd apply_scaled(const Eigen::VectorXcd& v) const {
    Eigen::VectorXcd y = h0_.apply(v);
    if (xdiag_ && f_ != 0.0) y += f_ * xdiag_->cast<cd>().cwiseProduct(v);
    y -= a_ * v;
    y /= b_;
    return y;
  }

  Eigen::VectorXcd step(const Eigen::VectorXcd& psi, double dt) {
    const auto& c = coefficients(dt);
    Eigen::VectorXcd v_prev = psi;
    Eigen::VectorXcd v_cur = cd(0, -1) * apply_scaled(psi);
    Eigen::VectorXcd acc = c[0] * v_prev;
    for (std::size_t n = 1; n < c.size(); ++n) {
      acc += (2.0 * c[n]) * v_cur;
      Eigen::VectorXcd v_next = cd(0, -2) * apply_scaled(v_cur) + v_prev;
      v_prev = std::move(v_cur);
      v_cur = std::move(v_next);
    }
    return std::exp(cd(0, -a_ * dt)) * acc;
  }

 private:
  const std::vector<double>& coefficients(double dt) {
    const long long key = std::llround(dt * 1e12);
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(key, bessel_coefficients(b_ * dt, tol_)).first;
    return it->second;
  }

  const SparseOperator& h0_;
  const Eigen::VectorXd* xdiag_;
  double a_ = 0.0, b_ = 1.0, f_ = 0.0, tol_;
  std::map<long long, std::vector<double>> cache_;
};

void check_times(const std::vector<double>& times) {
  if (times.empty()) throw std::invalid_argument("propagate: no sample times");
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (!(times[i] < times[i + 1]))
      throw std::invalid_argument("propagate: sample times must be strictly increasing");
}

/// Records samples into a Trajectory with bounded snapshot storage.
class Recorder {
 public:
  Recorder(Trajectory& traj, int n_samples, const EvolveOptions& opts,
           double norm_ref)
      : traj_(traj), opts_(opts), norm_ref_(norm_ref) {
    stride_ = std::max(1, (n_samples + std::max(1, opts.max_stored_states) - 1) /
                              std::max(1, opts.max_stored_states));
    last_index_ = n_samples - 1;
  }

  void add(double t, const Eigen::VectorXcd& psi) {
    const int i = static_cast<int>(traj_.times.size());
    traj_.times.push_back(t);
    const double nrm = psi.norm();
    traj_.norms.push_back(nrm);
    if (std::abs(nrm - norm_ref_) > opts_.norm_tol * std::max(1.0, norm_ref_))
      throw std::runtime_error(
          "propagate: norm drifted by " + std::to_string(nrm - norm_ref_) +
          " at t = " + std::to_string(t) + "; integration is unreliable");
    if (i % stride_ == 0 || i == last_index_) {
      traj_.stored_indices.push_back(i);
      traj_.states.push_back(psi);
    }
    if (opts_.observer) opts_.observer->on_sample(t, psi);
  }

 private:
  Trajectory& traj_;
  const EvolveOptions& opts_;
  double norm_ref_;
  int stride_ = 1;
  int last_index_ = 0;
};

}  // namespace

const Eigen::VectorXcd& Trajectory::state_at_time(double t, double tol) const {
  for (std::size_t s = 0; s < stored_indices.size(); ++s)
    if (std::abs(times[static_cast<std::size_t>(stored_indices[s])] - t) < tol)
      return states[s];
  throw std::out_of_range("trajectory: no stored state at t = " + std::to_string(t));
}

const Eigen::VectorXcd& Trajectory::final_state() const {
  if (states.empty()) throw std::out_of_range("trajectory: empty");
  return states.back();
}

std::vector<double> sample_times(double t0, double t1, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("propagate: dt must be positive");
  if (!(t1 > t0)) throw std::invalid_argument("propagate: empty time span");
  std::vector<double> times;
  const int n = static_cast<int>(std::ceil((t1 - t0) / dt - 1e-9));
  times.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) times.push_back(t0 + i * dt);
  if (times.back() > t1 || t1 - times.back() > 1e-9 * std::max(1.0, std::abs(t1)))
    times.back() = t1;
  return times;
}

Eigen::VectorXcd chebyshev_step(const SparseOperator& h, const Eigen::VectorXcd& psi,
                                double dt, double tol) {
  ChebPropagator prop(h, nullptr, 0.0, tol);
  return prop.step(psi, dt);
}

Trajectory evolve_static(const SparseOperator& h, const Eigen::VectorXcd& psi0,
                         const std::vector<double>& times, const EvolveOptions& opts) {
  check_times(times);
  if (psi0.size() != h.dimension())
    throw std::invalid_argument("propagate: state and operator sizes differ");
  EvolveMethod method = opts.method;
  if (method == EvolveMethod::automatic)
    method = h.dimension() <= 600 ? EvolveMethod::dense : EvolveMethod::stepping;

  Trajectory traj;
  Recorder rec(traj, static_cast<int>(times.size()), opts, psi0.norm());

  if (method == EvolveMethod::dense) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.dense());
    if (es.info() != Eigen::Success)
      throw std::runtime_error("propagate: dense diagonalisation failed");
    const Eigen::MatrixXd& vecs = es.eigenvectors();
    const Eigen::VectorXd& vals = es.eigenvalues();
    Eigen::VectorXcd coeff(psi0.size());
    coeff.real() = vecs.transpose() * psi0.real();
    coeff.imag() = vecs.transpose() * psi0.imag();
    for (double t : times) {
      const double tau = t - times.front();
      Eigen::VectorXcd rotated(coeff.size());
      for (int i = 0; i < coeff.size(); ++i)
        rotated[i] = coeff[i] * std::exp(cd(0, -vals[i] * tau));
      Eigen::VectorXcd out(coeff.size());
      out.real() = vecs * rotated.real();
      out.imag() = vecs * rotated.imag();
      rec.add(t, out);
    }
  } else {
    ChebPropagator prop(h, nullptr, 0.0);
    Eigen::VectorXcd psi = psi0;
    rec.add(times.front(), psi);
    for (std::size_t i = 1; i < times.size(); ++i) {
      psi = prop.step(psi, times[i] - times[i - 1]);
      rec.add(times[i], psi);
    }
  }
  return traj;
}

Trajectory evolve_driven(const ModelParams& p, const PairBasis& basis,
                         const FieldProtocol& field, const Eigen::VectorXcd& psi0,
                         const std::vector<double>& times, double dt_max,
                         const EvolveOptions& opts) {
  p.validate();
  field.validate();
  check_times(times);
  if (!(dt_max > 0)) throw std::invalid_argument("propagate: dt_max must be positive");
  if (p.boundary == Boundary::periodic && !field.is_zero())
    throw std::invalid_argument(
        "propagate: a driven ring is not supported; use open boundaries");

  // genuinely static protocols take the exact single-Hamiltonian route
  if (field.kind == FieldKind::none || field.kind == FieldKind::constant) {
    const SparseOperator h =
        build_full_hamiltonian(p, basis, field.kind == FieldKind::none ? 0.0 : field.f0);
    return evolve_static(h, psi0, times, opts);
  }

  const SparseOperator h0 = build_full_hamiltonian(p, basis, 0.0);
  if (psi0.size() != h0.dimension())
    throw std::invalid_argument("propagate: state and basis sizes differ");
  const Eigen::VectorXd xdiag = com_coordinate(basis);
  const double f_max = field.max_abs_force();
  ChebPropagator prop(h0, &xdiag, f_max);

  double dt_eff = std::min(dt_max, 0.1 / p.kappa);
  if (field.kind == FieldKind::square || field.kind == FieldKind::sine)
    dt_eff = std::min(dt_eff, field.period / 200);

  auto propagate_interval = [&](Eigen::VectorXcd psi, double t0, double t1,
                                int refine) {
    const double span = t1 - t0;
    const int n_sub = refine * std::max(1, static_cast<int>(std::ceil(span / dt_eff - 1e-9)));
    const double h = span / n_sub;
    for (int s = 0; s < n_sub; ++s) {
      prop.set_force(field.force_at(t0 + (s + 0.5) * h));
      psi = prop.step(psi, h);
    }
    return psi;
  };

  Trajectory traj;
  Recorder rec(traj, static_cast<int>(times.size()), opts, psi0.norm());
  Eigen::VectorXcd psi = psi0;
  rec.add(times.front(), psi);
  for (std::size_t i = 1; i < times.size(); ++i) {
    Eigen::VectorXcd next = propagate_interval(psi, times[i - 1], times[i], 1);
    if (i == 1 && opts.certify) {
      const Eigen::VectorXcd fine = propagate_interval(psi, times[i - 1], times[i], 2);
      const double defect = (next - fine).norm();
      if (defect > opts.certify_tol) {
        const double recommended =
            dt_eff * std::sqrt(opts.certify_tol / defect) * 0.5;
        throw std::runtime_error(
            "propagate: step-halving certificate failed (defect " +
            std::to_string(defect) + "); retry with dt <= " +
            std::to_string(recommended));
      }
    }
    psi = std::move(next);
    rec.add(times[i], psi);
  }
  return traj;
}

}  // namespace ebh
