#pragma once

// Hand-rolled generators for property tests, driven by the project RNG so every
// failing case is reproducible from (seed, stream).

#include <cmath>
#include <cstdint>

#include "halfwave/datagen.hpp"
#include "halfwave/rng.hpp"
#include "halfwave/spectral_grid.hpp"

namespace halfwave::testing {

inline constexpr std::uint64_t kPropertySeed = 0x5eed1234;

class Gen {
 public:
  explicit Gen(std::uint64_t stream, std::uint64_t seed = kPropertySeed) : rng_(seed, stream) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(rng_.uniform() * (hi - lo + 1)); }
  Complex complex() { return rng_.complex_normal(); }

  // White noise in physical space.
  Field noise(const GridSpec& spec) {
    ComplexVector v(spec.size());
    for (auto& z : v) z = rng_.complex_normal();
    return Field(spec, Representation::physical, std::move(v));
  }

  // Random spectrum inside |xi| <= radius, zero elsewhere.
  Field band_limited(const GridSpec& spec, double radius) {
    const auto lat = lattice(spec);
    ComplexVector v(spec.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Complex z = rng_.complex_normal();
      if (lat->radius[i] <= radius) v[i] = z;
    }
    return Field(spec, Representation::spectral, std::move(v));
  }

  // One annulus sample of shell k with a fresh seed.
  Field annulus(const GridSpec& spec, int k) {
    EnsembleSpec es;
    es.k = k;
    es.seed = rng_.next_u64();
    return ensemble_sample(spec, es, 0);
  }

 private:
  CounterRng rng_;
};

inline Field plane_wave(const GridSpec& spec, int mx, int my, Complex amplitude = 1.0) {
  const double step = spec.frequency_step();
  return Field::sample(spec, [&](double x, double y) {
    return amplitude * std::polar(1.0, step * (mx * x + my * y));
  });
}

// The same wave built from one spectral coefficient, so every other mode is exactly zero.
inline Field exact_mode(const GridSpec& spec, int mx, int my, Complex amplitude = 1.0) {
  ComplexVector v(spec.size());
  v[static_cast<std::size_t>(wrap_index(my, spec.n)) * spec.n + wrap_index(mx, spec.n)] =
      amplitude * static_cast<double>(spec.n);
  return Field(spec, Representation::spectral, std::move(v));
}

inline double relative_error(const Field& a, const Field& b) {
  const double denom = lebesgue_norm(b, 2.0);
  return lebesgue_norm(a - b, 2.0) / (denom > 0.0 ? denom : 1.0);
}

inline double max_abs_difference(const Field& a, const Field& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
  return worst;
}

}  // namespace halfwave::testing
