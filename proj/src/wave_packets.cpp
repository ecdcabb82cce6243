#include "halfwave/wave_packets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "halfwave/cutoffs.hpp"
#include "halfwave/decomposition.hpp"
#include "halfwave/errors.hpp"
#include "halfwave/numerics.hpp"

namespace halfwave {

namespace {

// Trapezoid rule for a function vanishing (with all derivatives) at both ends.
template <class Fn>
double trapezoid(double a, double b, int nodes, Fn&& fn) {
  const double step = (b - a) / (nodes - 1);
  CompensatedSum acc;
  for (int i = 0; i < nodes; ++i) {
    const double w = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
    acc.add(w * fn(a + i * step));
  }
  return step * acc.value();
}

double chord_to_angle(double chord) { return 2.0 * std::asin(std::min(1.0, 0.5 * chord)); }

double wrapped_offset(double a) {
  double d = std::fmod(a, kTwoPi);
  if (d > kPi) d -= kTwoPi;
  if (d <= -kPi) d += kTwoPi;
  return d;
}

}  // namespace

double WavePacketSymbols::angular_profile(double x) { return transition(2.0 * std::abs(x)); }

double WavePacketSymbols::c_sigma(double sigma) {
  const double root = std::sqrt(sigma);
  const double reach = chord_to_angle(root);
  const double integral = trapezoid(-reach, reach, 2001, [&](double a) {
    const double v = angular_profile(2.0 * std::abs(std::sin(0.5 * a)) / root);
    return v * v;
  });
  return 1.0 / std::sqrt(integral);
}

double WavePacketSymbols::angular_reach(double radius) {
  if (radius <= 0.0) return kPi;
  return chord_to_angle(std::sqrt(std::min(4.0, 2.0 / radius)));
}

WavePacketSymbols::WavePacketSymbols(const GridSpec& spec, int k_max, PhiOmegaQuadrature quadrature)
    : spec_(spec), k_max_(k_max), quadrature_(quadrature) {
  if (k_max < 0) throw ConfigError("k_max must be non-negative");
  if (quadrature.sigma_nodes < 8) throw ConfigError("phi_omega needs at least 8 sigma nodes");
  if (quadrature.reproducing_nodes < 17) throw ConfigError("reproducing quadrature needs >= 17 nodes");

  const double bump_energy = trapezoid(-1.0, 1.0, 4001, [](double v) {
    const double b = unit_bump(v);
    return b * b;
  });
  psi_scale_ = 1.0 / std::sqrt(std::log(2.0) * bump_energy);

  const double lo = std::log(std::ldexp(1.0, -(k_max + 2)));
  const double hi = std::log(4.0);
  const int count = quadrature.sigma_nodes;
  const double step = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) {
    sigma_.push_back(std::exp(lo + i * step));
    sigma_weight_.push_back((i == 0 || i == count - 1) ? 0.5 * step : step);
    c_.push_back(c_sigma(sigma_.back()));
  }

  const int directions = quadrature.omega_nodes > 0 ? quadrature.omega_nodes : 4 * sector_count(k_max);
  for (int i = 0; i < directions; ++i) omega_.push_back(kTwoPi * i / directions);
}

double WavePacketSymbols::radial_profile(double u) const {
  if (!(u > 0.0)) return 0.0;
  return psi_scale_ * unit_bump(std::log2(u));
}

double WavePacketSymbols::phi(double radius, double angle_offset) const {
  if (radius < 0.125) return 0.0;
  const double chord = 2.0 * std::abs(std::sin(0.5 * angle_offset));
  CompensatedSum acc;
  for (std::size_t i = 0; i < sigma_.size(); ++i) {
    const double u = sigma_[i] * radius;
    if (u <= 0.5 || u >= 2.0) continue;
    const double ang = angular_profile(chord / std::sqrt(sigma_[i]));
    if (ang == 0.0) continue;
    acc.add(sigma_weight_[i] * radial_profile(u) * c_[i] * ang);
  }
  return acc.value();
}

double WavePacketSymbols::phi(double omega_angle, double kx, double ky) const {
  if (kx == 0.0 && ky == 0.0) return 0.0;
  return phi(std::hypot(kx, ky), wrapped_offset(std::atan2(ky, kx) - omega_angle));
}

double WavePacketSymbols::reproducing(double radius) const {
  if (radius < 0.125) return 0.0;
  const double reach = angular_reach(radius);
  const double total =
      trapezoid(-reach, reach, quadrature_.reproducing_nodes, [&](double a) { return phi(radius, a); });
  if (!(total > 0.0)) return 0.0;
  return 1.0 / total;
}

ReproductionCheck WavePacketSymbols::reproduction(const Field& f) const {
  if (!(f.spec() == spec_)) throw UsageError("field and symbols live on different grids");
  const Field spectral = to_spectral(f);
  const auto values = spectral.values();
  const auto lat = lattice(spec_);
  std::map<double, double> m_cache;
  CompensatedSum error, total;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == Complex(0.0)) continue;
    const double r = lat->radius[i];
    if (r < 0.5) continue;
    auto it = m_cache.find(r);
    if (it == m_cache.end()) it = m_cache.emplace(r, reproducing(r)).first;
    const double reach = angular_reach(r);
    double sum = 0.0;
    for (double omega : omega_) {
      const double offset = wrapped_offset(lat->angle[i] - omega);
      if (std::abs(offset) >= reach) continue;
      sum += phi(r, offset);
    }
    const double factor = it->second * omega_weight() * sum;
    error.add(std::norm(values[i]) * (factor - 1.0) * (factor - 1.0));
    total.add(std::norm(values[i]));
  }
  ReproductionCheck check;
  check.relative_error = total.value() > 0.0 ? std::sqrt(error.value() / total.value()) : 0.0;
  if (check.relative_error > 1e-3) {
    std::ostringstream msg;
    msg << "phi_omega reproduction error " << check.relative_error << " exceeds 1e-3 with "
        << omega_count() << " directions and " << sigma_.size() << " sigma nodes";
    check.warned = true;
    check.warning = msg.str();
  }
  return check;
}

Json WavePacketSymbols::metadata() const {
  Json j;
  j["k_max"] = k_max_;
  j["sigma_nodes"] = sigma_.size();
  j["sigma_range"] = {sigma_.front(), sigma_.back()};
  j["omega_nodes"] = omega_.size();
  j["reproducing_nodes"] = quadrature_.reproducing_nodes;
  j["psi_scale"] = psi_scale_;
  return j;
}

}  // namespace halfwave
