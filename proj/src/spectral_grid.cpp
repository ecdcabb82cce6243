#include "halfwave/spectral_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <utility>

#include "fft.hpp"
#include "halfwave/errors.hpp"
#include "halfwave/numerics.hpp"

namespace halfwave {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

GridSpec create_grid(int n, double length) {
  if (!is_power_of_two(n) || n < 32) {
    throw ConfigError("grid size N=" + std::to_string(n) + " must be a power of two >= 32");
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    std::ostringstream msg;
    msg << "grid period L=" << length << " must be positive and finite";
    throw ConfigError(msg.str());
  }
  return GridSpec{2, n, length};
}

std::shared_ptr<const Lattice> lattice(const GridSpec& spec) {
  static std::mutex mutex;
  static std::map<std::pair<int, double>, std::shared_ptr<const Lattice>> cache;
  std::lock_guard lock(mutex);
  const auto key = std::make_pair(spec.n, spec.length);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  auto built = std::make_shared<Lattice>();
  const int n = spec.n;
  const double step = spec.frequency_step();
  built->axis.resize(n);
  for (int i = 0; i < n; ++i) built->axis[i] = step * signed_index(i, n);
  built->radius.resize(spec.size());
  built->angle.resize(spec.size());
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const double kx = built->axis[ix];
      const double ky = built->axis[iy];
      const std::size_t idx = static_cast<std::size_t>(iy) * n + ix;
      built->radius[idx] = std::hypot(kx, ky);
      double theta = std::atan2(ky, kx);
      if (theta < 0.0) theta += kTwoPi;
      built->angle[idx] = (kx == 0.0 && ky == 0.0) ? 0.0 : theta;
    }
  }
  cache.emplace(key, built);
  return built;
}

Field::Field(GridSpec spec, Representation representation, ComplexVector values,
             std::optional<double> support_radius)
    : spec_(spec),
      representation_(representation),
      values_(std::move(values)),
      support_radius_(support_radius) {
  if (values_.size() != spec_.size()) {
    throw UsageError("field has " + std::to_string(values_.size()) + " values, grid needs " +
                     std::to_string(spec_.size()));
  }
}

Field Field::zeros(const GridSpec& spec, Representation representation) {
  return Field(spec, representation, ComplexVector(spec.size()));
}

Field Field::sample(const GridSpec& spec, const std::function<Complex(double, double)>& fn) {
  ComplexVector values(spec.size());
  for (int iy = 0; iy < spec.n; ++iy) {
    const double y = coordinate(spec, iy);
    for (int ix = 0; ix < spec.n; ++ix) {
      values[static_cast<std::size_t>(iy) * spec.n + ix] = fn(coordinate(spec, ix), y);
    }
  }
  return Field(spec, Representation::physical, std::move(values));
}

Field Field::from_spectrum(const GridSpec& spec, const std::function<Complex(double, double)>& fn) {
  const auto lat = lattice(spec);
  ComplexVector values(spec.size());
  for (int iy = 0; iy < spec.n; ++iy) {
    for (int ix = 0; ix < spec.n; ++ix) {
      values[static_cast<std::size_t>(iy) * spec.n + ix] = fn(lat->axis[ix], lat->axis[iy]);
    }
  }
  return Field(spec, Representation::spectral, std::move(values));
}

Field Field::with_support_radius(std::optional<double> radius) const {
  return Field(spec_, representation_, values_, radius);
}

Field transform(const Field& f, Direction direction) {
  const bool forward = direction == Direction::forward;
  if (forward && f.representation() != Representation::physical) {
    throw UsageError("forward transform needs a physical-space field");
  }
  if (!forward && f.representation() != Representation::spectral) {
    throw UsageError("inverse transform needs a spectral field");
  }
  ComplexVector values = f.storage();
  if (forward) {
    detail::fft_forward(values.data(), f.spec().n);
  } else {
    detail::fft_inverse(values.data(), f.spec().n);
  }
  return Field(f.spec(), forward ? Representation::spectral : Representation::physical,
               std::move(values), f.support_radius());
}

Field to_physical(const Field& f) {
  return f.representation() == Representation::physical ? f : transform(f, Direction::inverse);
}

Field to_spectral(const Field& f) {
  return f.representation() == Representation::spectral ? f : transform(f, Direction::forward);
}

namespace {

Field combine(const Field& a, const Field& b, double sign) {
  if (!(a.spec() == b.spec())) throw UsageError("fields live on different grids");
  const Field bb = a.representation() == Representation::physical ? to_physical(b) : to_spectral(b);
  ComplexVector values = a.storage();
  const auto other = bb.values();
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += sign * other[i];
  std::optional<double> radius;
  if (a.support_radius() && b.support_radius()) {
    radius = std::max(*a.support_radius(), *b.support_radius());
  }
  return Field(a.spec(), a.representation(), std::move(values), radius);
}

}  // namespace

Field operator+(const Field& a, const Field& b) { return combine(a, b, 1.0); }
Field operator-(const Field& a, const Field& b) { return combine(a, b, -1.0); }

Field operator*(Complex scale, const Field& f) {
  ComplexVector values = f.storage();
  for (auto& v : values) v *= scale;
  return Field(f.spec(), f.representation(), std::move(values), f.support_radius());
}

Field apply_multiplier(const Field& f, const Symbol& symbol) {
  const Field spectral = to_spectral(f);
  const auto lat = lattice(f.spec());
  const int n = f.spec().n;
  ComplexVector values = spectral.storage();
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const double kx = lat->axis[ix];
      const double ky = lat->axis[iy];
      const Complex m = symbol(kx, ky);
      if (!std::isfinite(m.real()) || !std::isfinite(m.imag())) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "multiplier is not finite at xi = (" << kx << ", " << ky << ")";
        throw NumericError(msg.str());
      }
      values[static_cast<std::size_t>(iy) * n + ix] *= m;
    }
  }
  Field out(f.spec(), Representation::spectral, std::move(values), f.support_radius());
  return f.representation() == Representation::physical ? to_physical(out) : out;
}

Field apply_real_table(const Field& f, std::span<const double> table) {
  if (table.size() != f.spec().size()) throw UsageError("multiplier table does not match the grid");
  const Field spectral = to_spectral(f);
  ComplexVector values = spectral.storage();
  for (std::size_t i = 0; i < values.size(); ++i) values[i] *= table[i];
  Field out(f.spec(), Representation::spectral, std::move(values), f.support_radius());
  return f.representation() == Representation::physical ? to_physical(out) : out;
}

std::vector<double> lebesgue_norms(std::span<const Complex> samples, double cell_area,
                                   std::span<const double> exponents) {
  for (double p : exponents) {
    if (!(p >= 1.0)) throw ConfigError("Lebesgue exponent must be >= 1");
  }
  std::vector<CompensatedSum> sums(exponents.size());
  double peak = 0.0;
  for (const Complex& z : samples) {
    const double a = std::abs(z);
    peak = std::max(peak, a);
    for (std::size_t j = 0; j < exponents.size(); ++j) {
      if (std::isfinite(exponents[j])) sums[j].add(power_of_magnitude(a, exponents[j]));
    }
  }
  std::vector<double> norms(exponents.size());
  for (std::size_t j = 0; j < exponents.size(); ++j) {
    const double p = exponents[j];
    norms[j] = std::isfinite(p) ? std::pow(cell_area * sums[j].value(), 1.0 / p) : peak;
  }
  return norms;
}

std::vector<double> lebesgue_norms(const Field& f, std::span<const double> exponents) {
  const Field physical = to_physical(f);
  return lebesgue_norms(physical.values(), f.spec().cell_area(), exponents);
}

double lebesgue_norm(const Field& f, double p) {
  const double exponents[1] = {p};
  return lebesgue_norms(f, exponents)[0];
}

Complex inner_product(const Field& a, const Field& b) {
  const Field pa = to_physical(a);
  const Field pb = to_physical(b);
  const auto va = pa.values();
  const auto vb = pb.values();
  CompensatedSum re, im;
  for (std::size_t i = 0; i < va.size(); ++i) {
    const Complex z = std::conj(va[i]) * vb[i];
    re.add(z.real());
    im.add(z.imag());
  }
  return a.spec().cell_area() * Complex(re.value(), im.value());
}

namespace {

std::vector<std::pair<double, double>> radial_mass(const Field& f) {
  const Field physical = to_physical(f);
  const GridSpec& spec = f.spec();
  std::vector<std::pair<double, double>> samples;
  samples.reserve(spec.size());
  for (int iy = 0; iy < spec.n; ++iy) {
    const double y = coordinate(spec, iy);
    for (int ix = 0; ix < spec.n; ++ix) {
      const double r = std::hypot(coordinate(spec, ix), y);
      samples.emplace_back(r, std::norm(physical.values()[static_cast<std::size_t>(iy) * spec.n + ix]));
    }
  }
  return samples;
}

}  // namespace

double mass_radius(const Field& f, double tail_fraction) {
  auto samples = radial_mass(f);
  std::sort(samples.begin(), samples.end());
  CompensatedSum total;
  for (const auto& s : samples) total.add(s.second);
  if (total.value() == 0.0) return 0.0;
  const double allowed = tail_fraction * total.value();
  CompensatedSum tail;
  for (std::size_t i = samples.size(); i-- > 0;) {
    tail.add(samples[i].second);
    if (tail.value() > allowed) return samples[i].first;
  }
  return 0.0;
}

double mass_outside(const Field& f, double radius) {
  const auto samples = radial_mass(f);
  CompensatedSum total, outside;
  for (const auto& [r, m] : samples) {
    total.add(m);
    if (r > radius) outside.add(m);
  }
  return total.value() == 0.0 ? 0.0 : outside.value() / total.value();
}

void validate_wraparound(const Field& f, double t) {
  if (!f.support_radius()) return;
  const double needed = 2.0 * (std::abs(t) + *f.support_radius());
  if (f.spec().length < needed) {
    std::ostringstream msg;
    msg << "wraparound: period L=" << f.spec().length << " is below 2(|t|+R)=" << needed
        << " for t=" << t << ", R=" << *f.support_radius();
    throw ValidationError(msg.str());
  }
}

}  // namespace halfwave
