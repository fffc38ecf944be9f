#include "ebh/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ebh {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_momentum(double k) {
  double kw = std::remainder(k, 2 * kPi);
  if (kw <= -kPi) kw += 2 * kPi;
  return kw;
}

double positive_mod(double x, double m) {
  double r = std::fmod(x, m);
  if (r < 0) r += m;
  return r;
}

}  // namespace

Eigen::VectorXd density_profile(const Eigen::VectorXcd& psi, const PairBasis& basis) {
  if (psi.size() != basis.dimension())
    throw std::invalid_argument("observables: state does not match the basis");
  Eigen::VectorXd density = Eigen::VectorXd::Zero(basis.n_sites());
  for (int i = 0; i < basis.dimension(); ++i) {
    const double p = std::norm(psi[i]);
    if (p == 0.0) continue;
    const auto [j, r] = basis.config(i);
    if (r == 0) {
      density[j - 1] += 2 * p;
    } else {
      density[j - 1] += p;
      density[j + r - 1] += p;
    }
  }
  return density;
}

double mean_distance(const Eigen::VectorXcd& psi, const PairBasis& basis) {
  if (psi.size() != basis.dimension())
    throw std::invalid_argument("observables: state does not match the basis");
  double acc = 0.0, nrm = 0.0;
  for (int i = 0; i < basis.dimension(); ++i) {
    const double p = std::norm(psi[i]);
    if (p == 0.0) continue;
    acc += p * basis.config(i).second;
    nrm += p;
  }
  if (!(nrm > 0)) throw std::invalid_argument("observables: zero state");
  return acc / nrm;
}

double center_of_mass(const Eigen::VectorXcd& psi, const PairBasis& basis) {
  if (psi.size() != basis.dimension())
    throw std::invalid_argument("observables: state does not match the basis");
  double acc = 0.0, nrm = 0.0;
  for (int i = 0; i < basis.dimension(); ++i) {
    const double p = std::norm(psi[i]);
    if (p == 0.0) continue;
    const auto [j, r] = basis.config(i);
    acc += p * (2 * j + r);
    nrm += p;
  }
  if (!(nrm > 0)) throw std::invalid_argument("observables: zero state");
  return acc / nrm;
}

double energy_expectation(const SparseOperator& h, const Eigen::VectorXcd& psi) {
  if (psi.size() != h.dimension())
    throw std::invalid_argument("observables: state does not match the operator");
  const double nrm2 = psi.squaredNorm();
  if (!(nrm2 > 0)) throw std::invalid_argument("observables: zero state");
  return psi.dot(h.apply(psi)).real() / nrm2;
}

SemiclassicalPath semiclassical_path(const BandStructure& bs, BandId band, double k0,
                                     double x0, const FieldProtocol& field,
                                     const std::vector<double>& times) {
  if (times.empty()) throw std::invalid_argument("observables: no sample times");
  const double t0 = times.front();
  const bool merged = bs.gap_at_zone_edge() < 1e-6;

  // the momentum ODE integrates in closed form through the field impulse
  auto k_unwrapped = [&](double t) {
    return k0 + pair_drift_factor * field.impulse(t0, t);
  };

  BandId cur = band;
  auto dead = [&](BandId b, double k) {
    const BandInfo& info = bs.info(b);
    return !info.complete && info.k_edge &&
           std::abs(wrap_momentum(k)) < *info.k_edge;
  };
  const double dk_grid = 2 * kPi / bs.n_k();
  // Near a termination point the analytic edge extends a little past the last
  // momentum column actually resolved, so stencil arms are also gated on the
  // interpolation data being present.
  auto usable = [&](BandId b, double k) {
    return !dead(b, k) && bs.has_energy_at(b, k);
  };
  auto slope = [&](BandId b, double k) {
    const double d = dk_grid / 2;
    if (!usable(b, k)) return 0.0;
    const bool ok_plus = usable(b, k + d), ok_minus = usable(b, k - d);
    if (ok_plus && ok_minus)
      return (bs.energy_at(b, k + d) - bs.energy_at(b, k - d)) / (2 * d);
    if (ok_plus) return (bs.energy_at(b, k + d) - bs.energy_at(b, k)) / d;
    if (ok_minus) return (bs.energy_at(b, k) - bs.energy_at(b, k - d)) / d;
    return 0.0;
  };

  SemiclassicalPath path;
  if (dead(cur, k0))
    throw std::invalid_argument("observables: starting momentum is off the band");
  path.times.push_back(t0);
  path.k_c.push_back(wrap_momentum(k0));
  path.x_c.push_back(x0);

  const double rate_scale =
      std::max(std::abs(pair_drift_factor) * field.max_abs_force(), 1e-12);
  double x = x0;
  double t_prev = t0;
  double ku_prev = k0;
  for (std::size_t i = 1; i < times.size() && !path.hit_edge; ++i) {
    const double t_target = times[i];
    const double h_target = std::min(dk_grid / (4 * rate_scale), t_target - t_prev);
    const int n_sub =
        std::max(1, static_cast<int>(std::ceil((t_target - t_prev) / h_target)));
    const double h = (t_target - t_prev) / n_sub;
    for (int s = 0; s < n_sub; ++s) {
      const double ta = t_prev + s * h, tb = ta + h;
      const double ku_b = k_unwrapped(tb);
      // crossing an odd multiple of pi on merged bands continues diabatically
      // onto the partner branch (the dispersion is 4 pi periodic there)
      if (merged) {
        const double ca = std::floor((ku_prev + kPi) / (2 * kPi));
        const double cb = std::floor((ku_b + kPi) / (2 * kPi));
        if (ca != cb) cur = cur == BandId::lower ? BandId::upper : BandId::lower;
      }
      if (dead(cur, ku_b)) {
        double lo = ta, hi = tb;  // bracket the moment the band support ends
        for (int it = 0; it < 60 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
          const double mid = 0.5 * (lo + hi);
          (dead(cur, k_unwrapped(mid)) ? hi : lo) = mid;
        }
        const double t_edge = 0.5 * (lo + hi);
        const double k_mid = k_unwrapped(0.5 * (ta + t_edge));
        x += 2 * slope(cur, k_mid) * (t_edge - ta);
        path.hit_edge = true;
        path.t_edge = t_edge;
        path.times.push_back(t_edge);
        path.k_c.push_back(wrap_momentum(k_unwrapped(t_edge)));
        path.x_c.push_back(x);
        break;
      }
      const double k_mid = k_unwrapped(0.5 * (ta + tb));
      x += 2 * slope(cur, k_mid) * h;
      ku_prev = ku_b;
    }
    if (path.hit_edge) break;
    t_prev = t_target;
    path.times.push_back(t_target);
    path.k_c.push_back(wrap_momentum(k_unwrapped(t_target)));
    path.x_c.push_back(x);
  }
  return path;
}

std::optional<double> predict_lifetime(std::optional<double> k_edge, double k0,
                                       double drift_rate) {
  if (!k_edge || drift_rate == 0.0) return std::nullopt;
  const double period = 2 * kPi / std::abs(drift_rate);
  const double t1 = positive_mod((*k_edge - k0) / drift_rate, period);
  const double t2 = positive_mod((-*k_edge - k0) / drift_rate, period);
  return std::min(t1, t2);
}

SuddenDeathResult detect_sudden_death(const std::vector<double>& times,
                                      const std::vector<double>& r_mean,
                                      const std::vector<double>& leakage, int window,
                                      double slope_threshold, double leakage_threshold) {
  SuddenDeathResult res;
  const std::size_t n = times.size();
  if (r_mean.size() != n || leakage.size() != n)
    throw std::invalid_argument("observables: series lengths differ");
  if (window < 2 || n <= static_cast<std::size_t>(window)) return res;

  for (std::size_t i = static_cast<std::size_t>(window); i < n; ++i) {
    if (leakage[i] <= leakage_threshold) continue;
    // least-squares slope of <r> over the trailing window
    double st = 0, sr = 0, stt = 0, str = 0;
    const std::size_t lo = i - static_cast<std::size_t>(window);
    const double m = window + 1;
    for (std::size_t s = lo; s <= i; ++s) {
      st += times[s];
      sr += r_mean[s];
      stt += times[s] * times[s];
      str += times[s] * r_mean[s];
    }
    const double denom = m * stt - st * st;
    if (denom <= 0) continue;
    const double slope = (m * str - st * sr) / denom;
    if (slope >= slope_threshold) {
      res.detected = true;
      res.t_death = times[i];
      res.leakage_at = leakage[i];
      res.slope_at = slope;
      return res;
    }
  }
  return res;
}

std::optional<double> estimate_period(const std::vector<double>& times,
                                      const std::vector<double>& x) {
  const std::size_t n = times.size();
  if (x.size() != n || n < 8) return std::nullopt;
  const double span = times.back() - times.front();
  const double dt = span / static_cast<double>(n - 1);

  double mean = 0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);

  auto corr = [&](std::size_t lag) {
    double acc = 0;
    for (std::size_t i = 0; i + lag < n; ++i)
      acc += (x[i] - mean) * (x[i + lag] - mean);
    return acc / static_cast<double>(n - lag);
  };

  const std::size_t lag_max = std::min(n - 2, static_cast<std::size_t>(0.9 * n));
  if (lag_max < 4) return std::nullopt;
  std::vector<double> c(lag_max + 1, 0.0);
  for (std::size_t lag = 0; lag <= lag_max; ++lag) c[lag] = corr(lag);
  if (!(c[0] > 0)) return std::nullopt;

  // Accept a peak only after the autocorrelation has first dipped below half
  // of its zero-lag value.  Records that mix a dominant slow cycle with faint
  // fast interference stay near c(0) for many lags, and there the faint
  // component alone carves tiny local maxima; the dip requirement skips them.
  // The first qualifying maximum after the dip recovers at least half of the
  // zero-lag value, so harmonics at period multiples are never reached.
  bool dipped = false;
  for (std::size_t lag = 1; lag + 1 <= lag_max; ++lag) {
    if (!dipped) {
      dipped = c[lag] < 0.5 * c[0];
      continue;
    }
    if (c[lag] < 0.5 * c[0]) continue;
    if (!(c[lag] >= c[lag - 1] && c[lag] >= c[lag + 1])) continue;
    const double y0 = c[lag - 1], y1 = c[lag], y2 = c[lag + 1];
    const double denom = y0 - 2 * y1 + y2;
    double shift = 0.0;
    if (denom < 0) shift = 0.5 * (y0 - y2) / denom;
    return (static_cast<double>(lag) + shift) * dt;
  }
  return std::nullopt;
}

TrajectoryRecorder::TrajectoryRecorder(const ModelParams& params, const PairBasis& basis,
                                       const BandStructure* band,
                                       const SparseOperator* h0, int expected_samples)
    : params_(params), basis_(basis), band_(band), h0_(h0) {
  const int rows = std::max(1, expected_samples);
  series_.density.resize(rows, basis.n_sites());
}

void TrajectoryRecorder::set_fidelity_target(Eigen::VectorXcd target) {
  fidelity_target_ = std::move(target);
}

void TrajectoryRecorder::on_sample(double t, const Eigen::VectorXcd& psi) {
  series_.times.push_back(t);
  series_.norm.push_back(psi.norm());
  series_.x_c.push_back(center_of_mass(psi, basis_));
  series_.r_mean.push_back(mean_distance(psi, basis_));
  if (row_ >= series_.density.rows())
    series_.density.conservativeResize(series_.density.rows() + 64,
                                       basis_.n_sites());
  series_.density.row(row_) = density_profile(psi, basis_).transpose();

  if (band_) {
    StateVector sv{psi};
    const MomentumDistribution dist = momentum_distribution(sv, *band_, basis_);
    series_.leakage.push_back(dist.leakage);
    series_.w_lower.push_back(dist.weight_lower);
    series_.w_upper.push_back(dist.weight_upper);
    series_.k_c.push_back(dist.weight_lower >= dist.weight_upper
                              ? dist.circular_mean_lower
                              : dist.circular_mean_upper);
  }
  if (h0_) series_.energy.push_back(energy_expectation(*h0_, psi));
  if (fidelity_target_)
    series_.fidelity.push_back(
        std::abs(fidelity_target_->dot(psi)));
  ++row_;
}

ObservableSeries TrajectoryRecorder::take_series() {
  series_.density.conservativeResize(row_, basis_.n_sites());
  return std::move(series_);
}

}  // namespace ebh
