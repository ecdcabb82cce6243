#include "halfwave/datagen.hpp"

#include <cmath>

#include "halfwave/cutoffs.hpp"
#include "halfwave/decomposition.hpp"
#include "halfwave/errors.hpp"
#include "halfwave/numerics.hpp"
#include "halfwave/rng.hpp"

namespace halfwave {

std::string to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::radial_knapp: return "radial_knapp";
    case EnsembleKind::sector_bump: return "sector_bump";
    case EnsembleKind::random_annulus: return "random_annulus";
    case EnsembleKind::gaussian: return "gaussian";
  }
  return "unknown";
}

EnsembleKind ensemble_kind_from(const std::string& name) {
  for (auto kind : {EnsembleKind::radial_knapp, EnsembleKind::sector_bump, EnsembleKind::random_annulus,
                    EnsembleKind::gaussian}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown ensemble kind '" + name + "'");
}

Json EnsembleSpec::metadata() const {
  Json j;
  j["kind"] = to_string(kind);
  j["k"] = k;
  j["count"] = count;
  j["seed"] = seed;
  j["generator"] = CounterRng::identity();
  if (direction) j["direction"] = *direction;
  if (kind == EnsembleKind::gaussian) {
    j["centre"] = centre;
    j["width"] = width;
  }
  if (envelope_width) j["envelope_width"] = *envelope_width;
  return j;
}

double shell_profile(int k, double radius) {
  return annulus_bump(radius, std::ldexp(1.0, k - 1), std::ldexp(1.0, k));
}

double knapp_profile(double radius) { return annulus_bump(radius, 0.5, 1.0); }

namespace {

constexpr double kKnappTail = 0.01;
constexpr double kLocalizedTail = 1e-8;

double wrapped(double a) {
  double d = std::fmod(a, kTwoPi);
  if (d > kPi) d -= kTwoPi;
  if (d <= -kPi) d += kTwoPi;
  return d;
}

Field normalized(ComplexVector spectrum, const GridSpec& spec) {
  CompensatedSum mass;
  for (const auto& c : spectrum) mass.add(std::norm(c));
  const double norm = std::sqrt(spec.cell_area() * mass.value());
  if (norm > 0.0) {
    for (auto& c : spectrum) c /= norm;
  }
  return Field(spec, Representation::spectral, std::move(spectrum));
}

ComplexVector sector_spectrum(const GridSpec& spec, int k, int direction, std::array<double, 2> shift) {
  const SectorFamily family(spec, k);
  if (direction < 0 || direction >= family.size()) throw UsageError("sector direction out of range");
  const auto lat = lattice(spec);
  const double centre = family.direction_angle(direction);
  ComplexVector values(spec.size());
  for (int iy = 0; iy < spec.n; ++iy) {
    for (int ix = 0; ix < spec.n; ++ix) {
      const std::size_t i = static_cast<std::size_t>(iy) * spec.n + ix;
      const double radial = shell_profile(k, lat->radius[i]);
      if (radial == 0.0) continue;
      const double angular = unit_bump(wrapped(lat->angle[i] - centre) / family.spacing());
      if (angular == 0.0) continue;
      const double phase = -(lat->axis[ix] * shift[0] + lat->axis[iy] * shift[1]);
      values[i] = radial * angular * std::polar(1.0, phase);
    }
  }
  return values;
}

}  // namespace

Field knapp_radial(const GridSpec& spec) {
  const double scale = spec.n / (spec.length * spec.length);
  Field spectral = Field::from_spectrum(
      spec, [scale](double kx, double ky) { return Complex(scale * knapp_profile(std::hypot(kx, ky)), 0.0); });
  return spectral.with_support_radius(mass_radius(spectral, kKnappTail));
}

Field sector_bump(const GridSpec& spec, int k, int direction) {
  return normalized(sector_spectrum(spec, k, direction, {0.0, 0.0}), spec);
}

Field gaussian(const GridSpec& spec, std::array<double, 2> centre, double width) {
  if (!(width > 0.0)) throw ConfigError("Gaussian width must be positive");
  const Field f = Field::sample(spec, [&](double x, double y) {
    const double dx = x - centre[0], dy = y - centre[1];
    return Complex(std::exp(-(dx * dx + dy * dy) / (2.0 * width * width)), 0.0);
  });
  const double radius = std::hypot(centre[0], centre[1]) + width * std::sqrt(std::log(1.0 / kLocalizedTail));
  return f.with_support_radius(radius);
}

Field ensemble_sample(const GridSpec& spec, const EnsembleSpec& es, int index) {
  CounterRng rng(es.seed, static_cast<std::uint64_t>(index));
  switch (es.kind) {
    case EnsembleKind::radial_knapp: {
      const Field f = knapp_radial(spec);
      const double norm = lebesgue_norm(f, 2.0);
      return (1.0 / norm) * f;
    }
    case EnsembleKind::gaussian: {
      const Field f = gaussian(spec, es.centre, es.width);
      const double norm = lebesgue_norm(f, 2.0);
      return (1.0 / norm) * f;
    }
    case EnsembleKind::sector_bump: {
      const int count = sector_count(es.k);
      const int direction =
          es.direction ? *es.direction : std::min(count - 1, static_cast<int>(rng.uniform() * count));
      const double x = (rng.uniform() - 0.5) * spec.length;
      const double y = (rng.uniform() - 0.5) * spec.length;
      return normalized(sector_spectrum(spec, es.k, direction, {x, y}), spec);
    }
    case EnsembleKind::random_annulus: {
      const auto lat = lattice(spec);
      ComplexVector values(spec.size());
      for (std::size_t i = 0; i < values.size(); ++i) {
        const double radial = shell_profile(es.k, lat->radius[i]);
        if (radial > 0.0) values[i] = radial * rng.complex_normal();
      }
      if (!es.envelope_width) return normalized(std::move(values), spec);
      const double w = *es.envelope_width;
      if (!(w > 0.0)) throw ConfigError("envelope width must be positive");
      Field physical = to_physical(Field(spec, Representation::spectral, std::move(values)));
      ComplexVector enveloped = physical.storage();
      for (int iy = 0; iy < spec.n; ++iy) {
        const double y = coordinate(spec, iy);
        for (int ix = 0; ix < spec.n; ++ix) {
          const double x = coordinate(spec, ix);
          enveloped[static_cast<std::size_t>(iy) * spec.n + ix] *= std::exp(-(x * x + y * y) / (2.0 * w * w));
        }
      }
      const Field spectral = to_spectral(Field(spec, Representation::physical, std::move(enveloped)));
      ComplexVector banded = spectral.storage();
      for (std::size_t i = 0; i < banded.size(); ++i) banded[i] *= shell_profile(es.k, lat->radius[i]);
      const Field f = normalized(std::move(banded), spec);
      return f.with_support_radius(mass_radius(f, kLocalizedTail));
    }
  }
  throw UsageError("unhandled ensemble kind");
}

std::vector<Field> random_ensemble(const GridSpec& spec, const EnsembleSpec& es) {
  if (es.count < 1) throw ConfigError("ensemble count must be positive");
  if (es.k < 0) throw ConfigError("ensemble shell must be non-negative");
  std::vector<Field> out;
  out.reserve(es.count);
  for (int i = 0; i < es.count; ++i) out.push_back(ensemble_sample(spec, es, i));
  return out;
}

}  // namespace halfwave
