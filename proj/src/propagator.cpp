#include "halfwave/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "halfwave/errors.hpp"

namespace halfwave {

PhaseSpec PhaseSpec::halfwave() { return PhaseSpec(); }

PhaseSpec PhaseSpec::custom(std::function<double(double, double)> phase, double zero_value, std::string name) {
  if (!phase) throw ConfigError("custom phase needs a callable");
  PhaseSpec spec;
  spec.halfwave_ = false;
  spec.phase_ = std::move(phase);
  spec.zero_value_ = zero_value;
  spec.name_ = std::move(name);
  return spec;
}

double PhaseSpec::operator()(double kx, double ky) const {
  if (kx == 0.0 && ky == 0.0) return zero_value_;
  return halfwave_ ? std::hypot(kx, ky) : phase_(kx, ky);
}

double homogeneity_defect(const PhaseSpec& phase, const GridSpec& spec) {
  const auto lat = lattice(spec);
  const int n = spec.n;
  double worst = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    const int my = signed_index(iy, n);
    if (2 * my < -n / 2 || 2 * my >= n / 2) continue;
    for (int ix = 0; ix < n; ++ix) {
      const int mx = signed_index(ix, n);
      if (2 * mx < -n / 2 || 2 * mx >= n / 2 || (mx == 0 && my == 0)) continue;
      const double kx = lat->axis[ix], ky = lat->axis[iy];
      const double once = phase(kx, ky);
      const double twice = phase(2.0 * kx, 2.0 * ky);
      const double scale = std::max(std::abs(2.0 * once), 1e-300);
      worst = std::max(worst, std::abs(twice - 2.0 * once) / scale);
    }
  }
  return worst;
}

void verify_homogeneity(const PhaseSpec& phase, const GridSpec& spec) {
  const double defect = homogeneity_defect(phase, spec);
  if (!(defect <= 1e-10)) {
    std::ostringstream msg;
    msg << "phase '" << phase.name() << "' is not homogeneous of order 1: defect " << defect;
    throw ConfigError(msg.str());
  }
}

Field evolve(const Field& f, double t, const PhaseSpec& phase) {
  validate_wraparound(f, t);
  if (!phase.is_halfwave()) verify_homogeneity(phase, f.spec());
  if (t == 0.0) return f;
  return apply_multiplier(f, [&](double kx, double ky) { return std::polar(1.0, t * phase(kx, ky)); });
}

namespace {

double sinc_t(double r, double t) { return r == 0.0 ? t : std::sin(t * r) / r; }

}  // namespace

Field wave_pair(const Field& f, const Field& g, double t) {
  if (!(f.spec() == g.spec())) throw UsageError("wave_pair data live on different grids");
  validate_wraparound(f, t);
  validate_wraparound(g, t);
  if (t == 0.0) return f;
  const Field fs = to_spectral(f);
  const Field gs = to_spectral(g);
  const auto lat = lattice(f.spec());
  ComplexVector values(f.spec().size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double r = lat->radius[i];
    values[i] = std::cos(t * r) * fs.values()[i] + sinc_t(r, t) * gs.values()[i];
  }
  std::optional<double> radius;
  if (f.support_radius() && g.support_radius()) radius = std::max(*f.support_radius(), *g.support_radius());
  Field out(f.spec(), Representation::spectral, std::move(values), radius);
  return f.representation() == Representation::physical ? to_physical(out) : out;
}

Field wave_pair_velocity(const Field& f, const Field& g, double t) {
  if (!(f.spec() == g.spec())) throw UsageError("wave_pair data live on different grids");
  validate_wraparound(f, t);
  validate_wraparound(g, t);
  const Field fs = to_spectral(f);
  const Field gs = to_spectral(g);
  const auto lat = lattice(f.spec());
  ComplexVector values(f.spec().size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double r = lat->radius[i];
    values[i] = -r * std::sin(t * r) * fs.values()[i] + std::cos(t * r) * gs.values()[i];
  }
  Field out(f.spec(), Representation::spectral, std::move(values));
  return f.representation() == Representation::physical ? to_physical(out) : out;
}

namespace {

std::vector<double> quadrature_weights(int samples, DuhamelRule rule) {
  const int intervals = samples - 1;
  std::vector<double> w(samples, 0.0);
  if (rule == DuhamelRule::trapezoid || intervals == 1) {
    for (int i = 0; i < samples; ++i) w[i] = (i == 0 || i == intervals) ? 0.5 : 1.0;
    return w;
  }
  int simpson_end = intervals;
  if (intervals % 2 == 1) simpson_end = intervals - 3;
  for (int i = 0; i + 2 <= simpson_end; i += 2) {
    w[i] += 1.0 / 3.0;
    w[i + 1] += 4.0 / 3.0;
    w[i + 2] += 1.0 / 3.0;
  }
  if (simpson_end != intervals) {
    const int b = simpson_end;
    w[b] += 3.0 / 8.0;
    w[b + 1] += 9.0 / 8.0;
    w[b + 2] += 9.0 / 8.0;
    w[b + 3] += 3.0 / 8.0;
  }
  return w;
}

ComplexVector duhamel_sum(std::span<const Field> forcing, double t, int stride, DuhamelRule rule) {
  const int samples = (static_cast<int>(forcing.size()) - 1) / stride + 1;
  const auto weights = quadrature_weights(samples, rule);
  const double h = stride * t / (static_cast<double>(forcing.size()) - 1);
  const GridSpec& spec = forcing[0].spec();
  const auto lat = lattice(spec);
  ComplexVector acc(spec.size());
  for (int j = 0; j < samples; ++j) {
    const double s = j * h;
    const Field fs = to_spectral(forcing[static_cast<std::size_t>(j) * stride]);
    const auto v = fs.values();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += weights[j] * h * sinc_t(lat->radius[i], t - s) * v[i];
  }
  return acc;
}

}  // namespace

DuhamelResult duhamel(std::span<const Field> forcing, double t, DuhamelRule rule) {
  if (forcing.size() < 3) throw UsageError("Duhamel quadrature needs at least 3 forcing samples");
  const GridSpec& spec = forcing[0].spec();
  for (const auto& f : forcing) {
    if (!(f.spec() == spec)) throw UsageError("forcing samples live on different grids");
  }
  ComplexVector full = duhamel_sum(forcing, t, 1, rule);
  double difference = 0.0;
  if ((forcing.size() - 1) % 2 == 0 && forcing.size() >= 5) {
    const ComplexVector coarse = duhamel_sum(forcing, t, 2, rule);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < full.size(); ++i) {
      num += std::norm(full[i] - coarse[i]);
      den += std::norm(full[i]);
    }
    difference = std::sqrt(num / std::max(den, 1e-300));
  }
  Field value(spec, Representation::spectral, std::move(full));
  if (forcing[0].representation() == Representation::physical) value = to_physical(value);
  return {std::move(value), difference};
}

}  // namespace halfwave
