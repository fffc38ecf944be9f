#include "ebh/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ebh {

namespace {

constexpr double kPi = std::numbers::pi;

double overlap(double a, double b, double lo, double hi) {
  return std::max(0.0, std::min(b, hi) - std::max(a, lo));
}

}  // namespace

FieldProtocol FieldProtocol::none_field() { return {}; }

FieldProtocol FieldProtocol::constant(double f0) {
  FieldProtocol f;
  f.kind = FieldKind::constant;
  f.f0 = f0;
  return f;
}

FieldProtocol FieldProtocol::square_pulse(double f0, double period, double t_center) {
  FieldProtocol f;
  f.kind = FieldKind::square;
  f.f0 = f0;
  f.period = period;
  f.t_center = t_center;
  f.validate();
  return f;
}

FieldProtocol FieldProtocol::sine_pulse(double f0, double period, double t_center) {
  FieldProtocol f;
  f.kind = FieldKind::sine;
  f.f0 = f0;
  f.period = period;
  f.t_center = t_center;
  f.validate();
  return f;
}

FieldProtocol FieldProtocol::from_samples(std::vector<std::pair<double, double>> samples) {
  FieldProtocol f;
  f.kind = FieldKind::sampled;
  f.samples = std::move(samples);
  f.validate();
  return f;
}

double FieldProtocol::force_at(double t) const {
  switch (kind) {
    case FieldKind::none:
      return 0.0;
    case FieldKind::constant:
      return f0;
    case FieldKind::square: {
      const double s = t - t_center;
      if (s <= -period / 2 || s > period / 2) return 0.0;
      return s <= 0.0 ? f0 : -f0;
    }
    case FieldKind::sine: {
      const double s = t - t_center;
      if (s < -period / 2 || s > period / 2) return 0.0;
      return -(f0 * kPi / 2) * std::sin(2 * kPi * s / period);
    }
    case FieldKind::sampled: {
      if (samples.empty()) return 0.0;
      if (t <= samples.front().first) return t == samples.front().first ? samples.front().second : 0.0;
      if (t >= samples.back().first) return t == samples.back().first ? samples.back().second : 0.0;
      auto it = std::lower_bound(samples.begin(), samples.end(), t,
                                 [](const auto& s, double x) { return s.first < x; });
      const auto& [t1, f1] = *it;
      if (t1 == t) return f1;
      const auto& [t0, v0] = *(it - 1);
      return v0 + (f1 - v0) * (t - t0) / (t1 - t0);
    }
  }
  return 0.0;
}

double FieldProtocol::impulse(double t0, double t1) const {
  if (t1 < t0) return -impulse(t1, t0);
  switch (kind) {
    case FieldKind::none:
      return 0.0;
    case FieldKind::constant:
      return f0 * (t1 - t0);
    case FieldKind::square: {
      const double lo = t_center - period / 2;
      return f0 * (overlap(t0, t1, lo, t_center) -
                   overlap(t0, t1, t_center, t_center + period / 2));
    }
    case FieldKind::sine: {
      const double a = std::clamp(t0, t_center - period / 2, t_center + period / 2);
      const double b = std::clamp(t1, t_center - period / 2, t_center + period / 2);
      if (b <= a) return 0.0;
      auto anti = [&](double t) {
        return (f0 * period / 4) * std::cos(2 * kPi * (t - t_center) / period);
      };
      return anti(b) - anti(a);
    }
    case FieldKind::sampled: {
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const double a = std::max(t0, samples[i].first);
        const double b = std::min(t1, samples[i + 1].first);
        if (b <= a) continue;
        acc += 0.5 * (force_at(a) + force_at(b)) * (b - a);
      }
      return acc;
    }
  }
  return 0.0;
}

double FieldProtocol::max_abs_force() const {
  switch (kind) {
    case FieldKind::none:
      return 0.0;
    case FieldKind::constant:
    case FieldKind::square:
      return std::abs(f0);
    case FieldKind::sine:
      return std::abs(f0) * kPi / 2;
    case FieldKind::sampled: {
      double m = 0.0;
      for (const auto& [t, f] : samples) m = std::max(m, std::abs(f));
      return m;
    }
  }
  return 0.0;
}

bool FieldProtocol::is_zero() const { return max_abs_force() == 0.0; }

void FieldProtocol::validate() const {
  switch (kind) {
    case FieldKind::none:
    case FieldKind::constant:
      return;
    case FieldKind::square:
    case FieldKind::sine:
      if (!(period > 0.0))
        throw std::invalid_argument("field: pulse period must be positive");
      return;
    case FieldKind::sampled: {
      if (samples.size() < 2)
        throw std::invalid_argument("field: sampled protocol needs at least two points");
      for (std::size_t i = 0; i + 1 < samples.size(); ++i)
        if (!(samples[i].first < samples[i + 1].first))
          throw std::invalid_argument("field: sample times must be strictly increasing");
      return;
    }
  }
}

double impulse(const FieldProtocol& field, double t0, double t1) {
  return field.impulse(t0, t1);
}

std::string to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::none: return "none";
    case FieldKind::constant: return "static";
    case FieldKind::square: return "square";
    case FieldKind::sine: return "sine";
    case FieldKind::sampled: return "sampled";
  }
  return "none";
}

FieldKind field_kind_from_string(const std::string& name) {
  if (name == "none") return FieldKind::none;
  if (name == "static" || name == "constant") return FieldKind::constant;
  if (name == "square") return FieldKind::square;
  if (name == "sine") return FieldKind::sine;
  if (name == "sampled") return FieldKind::sampled;
  throw std::invalid_argument("field: unknown kind '" + name + "'");
}

}  // namespace ebh
