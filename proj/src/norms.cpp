#include "halfwave/norms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "halfwave/errors.hpp"
#include "halfwave/numerics.hpp"
#include "patch.hpp"

namespace halfwave {

using detail::norm_from_integral;
using detail::PatchLayout;

double fixed_time_loss(int d, double p) {
  const double inverse = std::isfinite(p) ? 1.0 / p : 0.0;
  return 0.5 * (d - 1) * std::abs(0.5 - inverse);
}

double decoupling_exponent(int d, double p) {
  const double critical = 2.0 * (d + 1) / (d - 1);
  if (p <= critical) return 0.0;
  return fixed_time_loss(d, p) - (std::isfinite(p) ? 1.0 / p : 0.0);
}

ExponentValues exponents(int d, double p) {
  const double s = fixed_time_loss(d, p);
  return {s, decoupling_exponent(d, p), 2.0 * s};
}

void ExponentTuple::validate() const {
  std::ostringstream msg;
  if (!(p >= 1.0)) msg << "p=" << p << " must lie in [1, inf]";
  else if (!(q >= 1.0) || !std::isfinite(q)) msg << "q=" << q << " must lie in [1, inf)";
  else if (!(r >= 1.0)) msg << "r=" << r << " must lie in [1, inf]";
  else if (d < 2) msg << "dimension d=" << d << " must be at least 2";
  else if (!std::isfinite(s)) msg << "regularity s must be finite";
  else return;
  throw ConfigError(msg.str());
}

Json ExponentTuple::to_json() const {
  Json j;
  j["s"] = s;
  j["p"] = std::isfinite(p) ? Json(p) : Json("inf");
  j["q"] = q;
  j["r"] = std::isfinite(r) ? Json(r) : Json("inf");
  j["d"] = d;
  return j;
}

TimeWindow::TimeWindow(double half_width, double shift) : half_width_(half_width), shift_(shift) {
  if (!(half_width >= 4.0)) throw ConfigError("time window half-width must be at least 4");
  if (!std::isfinite(shift)) throw ConfigError("time window shift must be finite");
  for (int i = 0; i <= 100; ++i) {
    const double t = shift + 0.01 * i;
    if (std::abs((*this)(t)) < 1.0) throw NumericError("window lower bound |g| >= 1 fails on [0, 1]");
  }
}

double TimeWindow::operator()(double t) const {
  const double u = 0.5 * (t - shift_);
  if (u == 0.0) return 1.2;
  const double sinc = std::sin(u) / u;
  return 1.2 * sinc * sinc;
}

double TimeWindow::envelope(double t) const {
  const double u = t - shift_;
  return 1.2 * std::min(1.0, 4.0 / (u * u));
}

double TimeWindow::certified_tail() const { return 2.0 * 4.8 / half_width_; }

Json TimeWindow::metadata() const {
  Json j;
  j["profile"] = "1.2*(sin(t/2)/(t/2))^2";
  j["half_width"] = half_width_;
  j["shift"] = shift_;
  j["certified_tail"] = certified_tail();
  return j;
}

namespace {

double lq_sum(std::span<const double> weighted, double q) {
  if (!std::isfinite(q)) {
    double peak = 0.0;
    for (double v : weighted) peak = std::max(peak, v);
    return peak;
  }
  CompensatedSum acc;
  for (double v : weighted) acc.add(power_of_magnitude(v, q));
  return std::pow(acc.value(), 1.0 / q);
}

double combine_scales(double low, const std::vector<ScaleTerm>& scales, double outer) {
  std::vector<double> weighted;
  for (const auto& s : scales) weighted.push_back(s.weight * s.value);
  return low + lq_sum(weighted, outer);
}

std::vector<double> norms_from(std::vector<double> integrals, std::span<const double> exponents) {
  for (std::size_t i = 0; i < integrals.size(); ++i) {
    integrals[i] = norm_from_integral(integrals[i], exponents[i]);
  }
  return integrals;
}

void check_exponents(std::span<const double> exponents) {
  if (exponents.empty()) throw UsageError("no exponents requested");
  for (double p : exponents) {
    if (!(p >= 1.0)) throw ConfigError("Lebesgue exponent must be >= 1");
  }
}

}  // namespace

double NormReport::recombine() const {
  if (per_sector.empty()) return combine_scales(low_freq, per_scale, outer);
  std::vector<ScaleTerm> rebuilt = per_scale;
  for (auto& scale : rebuilt) {
    std::vector<double> values;
    for (const auto& term : per_sector) {
      if (term.k == scale.k) values.push_back(term.value);
    }
    scale.value = lq_sum(values, exponents.q);
  }
  return combine_scales(low_freq, rebuilt, outer);
}

Json NormReport::to_json() const {
  Json j;
  j["kind"] = kind;
  j["exponents"] = exponents.to_json();
  j["total"] = total;
  j["low_freq"] = low_freq;
  Json scales = Json::array();
  for (const auto& scale : per_scale) {
    Json s;
    s["k"] = scale.k;
    s["weight"] = scale.weight;
    s["value"] = scale.value;
    Json sectors = Json::array();
    for (const auto& term : per_sector) {
      if (term.k != scale.k) continue;
      sectors.push_back({{"index", term.index}, {"angle", term.angle}, {"value", term.value}});
    }
    if (!sectors.empty()) s["sectors"] = sectors;
    scales.push_back(s);
  }
  j["scales"] = scales;
  if (!warnings.empty()) j["warnings"] = warnings;
  return j;
}

std::string NormReport::to_csv() const {
  CsvTable csv({"k", "nu_index", "angle", "term"});
  if (per_sector.empty()) {
    for (const auto& scale : per_scale) {
      csv.add_row({csv_cell(static_cast<long long>(scale.k)), "", "", csv_cell(scale.value)});
    }
  } else {
    for (const auto& term : per_sector) {
      csv.add_row({csv_cell(static_cast<long long>(term.k)), csv_cell(static_cast<long long>(term.index)),
                   csv_cell(term.angle), csv_cell(term.value)});
    }
  }
  return csv.str();
}

double sobolev_norm(const Field& f, double s, double p) {
  const Field lifted = apply_multiplier(f, [s](double kx, double ky) {
    return Complex(std::pow(1.0 + kx * kx + ky * ky, 0.5 * s), 0.0);
  });
  return lebesgue_norm(lifted, p);
}

namespace {

void require_no_leakage(const Field& f, const DyadicFamily& dyadic) {
  const double leak = leakage_fraction(f, dyadic);
  if (leak > 1e-20) {
    std::ostringstream msg;
    msg << "spectrum leaks past 2^" << dyadic.k_max() << ": mass fraction " << leak;
    throw ValidationError(msg.str());
  }
}

}  // namespace

std::vector<ShellTerms> shell_terms(const Field& f, const DyadicFamily& dyadic,
                                    std::span<const double> exponents) {
  check_exponents(exponents);
  if (!(f.spec() == dyadic.spec())) throw UsageError("field and dyadic family live on different grids");
  require_no_leakage(f, dyadic);
  const Field spectral = to_spectral(f);
  std::vector<ShellTerms> out(exponents.size());
  for (std::size_t i = 0; i < exponents.size(); ++i) out[i].p = exponents[i];
  for (int k = 0; k <= dyadic.k_max(); ++k) {
    const auto values = norms_from(detail::masked_integrals(spectral, dyadic.table(k), exponents), exponents);
    for (std::size_t i = 0; i < exponents.size(); ++i) out[i].values.push_back(values[i]);
  }
  return out;
}

NormReport assemble_besov(const ShellTerms& terms, double s, double r) {
  NormReport report;
  report.kind = "besov";
  if (!(terms.p >= 1.0) || !(r >= 1.0)) throw ConfigError("Besov exponents need p, r >= 1");
  report.exponents = {s, terms.p, std::isfinite(r) ? r : 1.0, r, 2};
  report.outer = r;
  for (std::size_t k = 0; k < terms.values.size(); ++k) {
    report.per_scale.push_back({static_cast<int>(k), std::exp2(s * static_cast<double>(k)), terms.values[k]});
  }
  report.total = combine_scales(0.0, report.per_scale, r);
  return report;
}

NormReport besov_norm(const Field& f, double s, double p, double r, const DyadicFamily& dyadic) {
  const double exps[1] = {p};
  return assemble_besov(shell_terms(f, dyadic, exps)[0], s, r);
}

std::vector<SectorTable> sector_terms(const Field& f, const DecompositionPlan& plan,
                                      std::span<const double> exponents) {
  check_exponents(exponents);
  if (!(f.spec() == plan.spec())) throw UsageError("field and plan live on different grids");
  plan.validate_coverage(f);
  const Field spectral = to_spectral(f);
  const auto values = spectral.values();

  std::vector<SectorTable> out(exponents.size());
  const auto low = norms_from(
      detail::masked_integrals(spectral, plan.dyadic().low_frequency_table(), exponents), exponents);
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    out[i].p = exponents[i];
    out[i].low = low[i];
  }
  for (int k = plan.k_lo(); k <= plan.k_hi(); ++k) {
    const SectorFamily& family = plan.sectors(k);
    for (auto& table : out) {
      table.scales.push_back(k);
      table.sectors.emplace_back();
    }
    for (int j = 0; j < family.size(); ++j) {
      const SectorEntries& entries = plan.entries(k, j);
      std::vector<std::uint32_t> indices;
      std::vector<Complex> coefficients;
      for (std::size_t e = 0; e < entries.index.size(); ++e) {
        const Complex c = entries.weight[e] * values[entries.index[e]];
        if (c == Complex(0.0)) continue;
        indices.push_back(entries.index[e]);
        coefficients.push_back(c);
      }
      const PatchLayout layout(f.spec(), std::move(indices), exponents);
      const auto norms = norms_from(layout.integrals(coefficients, exponents), exponents);
      for (std::size_t i = 0; i < exponents.size(); ++i) {
        out[i].sectors.back().push_back({k, j, family.direction_angle(j), norms[i]});
      }
    }
  }
  return out;
}

NormReport assemble_adapted(const SectorTable& table, const ExponentTuple& tuple, std::string kind) {
  tuple.validate();
  if (tuple.p != table.p) throw UsageError("sector table was computed for a different p");
  NormReport report;
  report.kind = std::move(kind);
  report.exponents = tuple;
  report.outer = tuple.q;
  report.low_freq = table.low;
  const double shift = 0.5 * (tuple.d - 1) * (0.5 - 1.0 / tuple.q);
  for (std::size_t i = 0; i < table.scales.size(); ++i) {
    const int k = table.scales[i];
    std::vector<double> values;
    for (const auto& term : table.sectors[i]) {
      values.push_back(term.value);
      report.per_sector.push_back(term);
    }
    report.per_scale.push_back({k, std::exp2(k * (tuple.s + shift)), lq_sum(values, tuple.q)});
  }
  report.total = combine_scales(report.low_freq, report.per_scale, tuple.q);
  return report;
}

NormReport adapted_norm_discrete(const Field& f, const ExponentTuple& tuple, const DecompositionPlan& plan) {
  tuple.validate();
  const double exps[1] = {tuple.p};
  return assemble_adapted(sector_terms(f, plan, exps)[0], tuple, "adapted_discrete");
}

namespace {

struct SpectralPoint {
  std::uint32_t index;
  double radius;
  double angle;
  double reach;
  Complex value;
};

std::vector<SpectralPoint> high_points(const Field& spectral, const WavePacketSymbols& symbols) {
  const auto values = spectral.values();
  const auto lat = lattice(spectral.spec());
  std::vector<SpectralPoint> points;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == Complex(0.0) || lat->radius[i] < 0.125) continue;
    points.push_back({static_cast<std::uint32_t>(i), lat->radius[i], lat->angle[i],
                      symbols.angular_reach(lat->radius[i]), values[i]});
  }
  return points;
}

double wrapped(double a) {
  double d = std::fmod(a, kTwoPi);
  if (d > kPi) d -= kTwoPi;
  if (d <= -kPi) d += kTwoPi;
  return d;
}

void check_symbols(const Field& f, const WavePacketSymbols& symbols, const DyadicFamily& dyadic) {
  if (!(f.spec() == symbols.spec()) || !(f.spec() == dyadic.spec())) {
    throw UsageError("field, symbols and dyadic family must share one grid");
  }
  if (symbols.spec().dim != 2) throw ConfigError("phi_omega family is implemented for d = 2");
  require_no_leakage(f, dyadic);
}

}  // namespace

std::vector<DirectionTable> direction_terms(const Field& f, const WavePacketSymbols& symbols,
                                            const DyadicFamily& dyadic, std::span<const double> exponents) {
  check_exponents(exponents);
  check_symbols(f, symbols, dyadic);
  const Field spectral = to_spectral(f);
  const auto points = high_points(spectral, symbols);
  const auto low = norms_from(
      detail::masked_integrals(spectral, dyadic.low_frequency_table(), exponents), exponents);
  const int scales = dyadic.k_max() + 1;

  std::vector<DirectionTable> out(exponents.size());
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    out[i].p = exponents[i];
    out[i].low = low[i];
    out[i].omega_weight = symbols.omega_weight();
    out[i].terms.assign(symbols.omega_count(), std::vector<double>(scales, 0.0));
  }
  for (int w = 0; w < symbols.omega_count(); ++w) {
    const double omega = symbols.omega_angle(w);
    std::vector<std::vector<std::uint32_t>> indices(scales);
    std::vector<std::vector<Complex>> coefficients(scales);
    for (const auto& pt : points) {
      const double offset = wrapped(pt.angle - omega);
      if (std::abs(offset) >= pt.reach) continue;
      const double phi = symbols.phi(pt.radius, offset);
      if (phi == 0.0) continue;
      for (int l = 0; l < scales; ++l) {
        const double psi = dyadic.table(l)[pt.index];
        if (psi == 0.0) continue;
        indices[l].push_back(pt.index);
        coefficients[l].push_back(psi * phi * pt.value);
      }
    }
    for (int l = 0; l < scales; ++l) {
      if (indices[l].empty()) continue;
      const PatchLayout layout(f.spec(), std::move(indices[l]), exponents);
      const auto norms = norms_from(layout.integrals(coefficients[l], exponents), exponents);
      for (std::size_t i = 0; i < exponents.size(); ++i) out[i].terms[w][l] = norms[i];
    }
  }
  return out;
}

namespace {

double omega_integral(const std::vector<double>& per_direction, double weight, double q, int stride) {
  CompensatedSum acc;
  for (std::size_t w = 0; w < per_direction.size(); w += stride) {
    acc.add(power_of_magnitude(per_direction[w], q));
  }
  return std::pow(stride * weight * acc.value(), 1.0 / q);
}

IntegralNorm integral_with_estimate(double low, const std::vector<double>& per_direction, double weight,
                                    double q) {
  IntegralNorm result;
  const double fine = omega_integral(per_direction, weight, q, 1);
  result.value = low + fine;
  if (per_direction.size() % 2 == 0 && fine > 0.0) {
    const double coarse = omega_integral(per_direction, weight, q, 2);
    result.error_estimate = std::abs(fine - coarse) / fine;
  }
  if (result.error_estimate > 0.1) {
    std::ostringstream msg;
    msg << "omega quadrature error estimate " << result.error_estimate << " exceeds 10%";
    result.warnings.push_back(msg.str());
  }
  return result;
}

}  // namespace

Json IntegralNorm::to_json() const {
  Json j;
  j["value"] = value;
  j["error_estimate"] = error_estimate;
  if (!warnings.empty()) j["warnings"] = warnings;
  return j;
}

IntegralNorm assemble_integral(const DirectionTable& table, const ExponentTuple& tuple) {
  tuple.validate();
  if (tuple.p != table.p) throw UsageError("direction table was computed for a different p");
  std::vector<double> besov;
  for (const auto& row : table.terms) {
    std::vector<double> weighted;
    for (std::size_t l = 0; l < row.size(); ++l) weighted.push_back(std::exp2(tuple.s * l) * row[l]);
    besov.push_back(lq_sum(weighted, tuple.r));
  }
  return integral_with_estimate(table.low, besov, table.omega_weight, tuple.q);
}

IntegralNorm adapted_norm_integral(const Field& f, const ExponentTuple& tuple,
                                   const WavePacketSymbols& symbols, const DyadicFamily& dyadic) {
  tuple.validate();
  const double exps[1] = {tuple.p};
  return assemble_integral(direction_terms(f, symbols, dyadic, exps)[0], tuple);
}

IntegralNorm fio_hardy_norm(const Field& f, double s, double p, const WavePacketSymbols& symbols,
                            const DyadicFamily& dyadic) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("FIO Hardy norm is realized for 1 < p < inf");
  check_symbols(f, symbols, dyadic);
  const Field spectral = to_spectral(f);
  const auto points = high_points(spectral, symbols);
  const double exps[1] = {p};
  const double low = norm_from_integral(
      detail::masked_integrals(spectral, dyadic.low_frequency_table(), exps)[0], p);
  std::vector<double> per_direction(symbols.omega_count(), 0.0);
  for (int w = 0; w < symbols.omega_count(); ++w) {
    const double omega = symbols.omega_angle(w);
    std::vector<std::uint32_t> indices;
    std::vector<Complex> coefficients;
    for (const auto& pt : points) {
      const double offset = wrapped(pt.angle - omega);
      if (std::abs(offset) >= pt.reach) continue;
      const double phi = symbols.phi(pt.radius, offset);
      if (phi == 0.0) continue;
      indices.push_back(pt.index);
      coefficients.push_back(std::pow(1.0 + pt.radius * pt.radius, 0.5 * s) * phi * pt.value);
    }
    if (indices.empty()) continue;
    const PatchLayout layout(f.spec(), std::move(indices), exps);
    per_direction[w] = norm_from_integral(layout.integrals(coefficients, exps)[0], p);
  }
  return integral_with_estimate(low, per_direction, symbols.omega_weight(), p);
}

namespace {

// Sparse spectral data for time-dependent evaluations.
struct Packet {
  std::vector<std::uint32_t> indices;
  std::vector<Complex> coefficients;
  std::vector<double> radii;
};

Packet packet_from(const GridSpec& spec, std::vector<std::uint32_t> indices, std::vector<Complex> coefficients) {
  const auto lat = lattice(spec);
  Packet packet;
  packet.radii.reserve(indices.size());
  for (auto idx : indices) packet.radii.push_back(lat->radius[idx]);
  packet.indices = std::move(indices);
  packet.coefficients = std::move(coefficients);
  return packet;
}

Packet packet_from(const Field& f) {
  const Field spectral = to_spectral(f);
  const auto values = spectral.values();
  std::vector<std::uint32_t> indices;
  std::vector<Complex> coefficients;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == Complex(0.0)) continue;
    indices.push_back(static_cast<std::uint32_t>(i));
    coefficients.push_back(values[i]);
  }
  return packet_from(f.spec(), std::move(indices), std::move(coefficients));
}

// |xi| - xi.nu varies by at most `spread` over the packet for a suitable direction nu.
double radial_spread(const GridSpec& spec, const Packet& packet) {
  const auto lat = lattice(spec);
  const int n = spec.n;
  double mx = 0.0, my = 0.0, rmax = 0.0;
  for (std::size_t e = 0; e < packet.indices.size(); ++e) {
    const double kx = lat->axis[packet.indices[e] % n];
    const double ky = lat->axis[packet.indices[e] / n];
    const double a = std::abs(packet.coefficients[e]);
    mx += a * kx;
    my += a * ky;
    rmax = std::max(rmax, packet.radii[e]);
  }
  const double norm = std::hypot(mx, my);
  if (norm == 0.0) return 2.0 * rmax;
  const double nx = mx / norm, ny = my / norm;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t e = 0; e < packet.indices.size(); ++e) {
    const double kx = lat->axis[packet.indices[e] % n];
    const double ky = lat->axis[packet.indices[e] / n];
    const double v = packet.radii[e] - (kx * nx + ky * ny);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

std::vector<Complex> evolved(const Packet& packet, double t) {
  std::vector<Complex> out(packet.coefficients.size());
  for (std::size_t e = 0; e < out.size(); ++e) {
    out[e] = packet.coefficients[e] * std::polar(1.0, t * packet.radii[e]);
  }
  return out;
}

constexpr double kTailFraction = 1e-3;

SpacetimeNorms spacetime_for_packet(const GridSpec& spec, const Packet& packet, const TimeWindow& window,
                                    std::span<const double> exponents) {
  SpacetimeNorms result;
  result.values.assign(exponents.size(), 0.0);
  if (packet.indices.empty()) return result;

  double p_top = 2.0;
  for (double p : exponents) {
    if (std::isfinite(p)) p_top = std::max(p_top, p);
  }
  const double p_even = 2.0 * std::ceil(0.5 * p_top);
  const double bandwidth = p_even + 0.5 * p_even * radial_spread(spec, packet);
  const double dt = 0.8 * kTwoPi / bandwidth;

  CompensatedSum l1, l2;
  for (const Complex& c : packet.coefficients) {
    l1.add(std::abs(c));
    l2.add(std::norm(c));
  }
  const double sup_bound = l1.value() / spec.n;
  const double mass = spec.cell_area() * l2.value();
  const double area = spec.length * spec.length;

  const PatchLayout layout(spec, packet.indices, exponents);
  std::vector<CompensatedSum> sums(exponents.size());
  double peak = 0.0;
  int samples = 0;
  auto accumulate = [&](long j) {
    const double t = window.shift() + j * dt;
    const double g = std::abs(window(t));
    const auto ints = layout.integrals(evolved(packet, t), exponents);
    for (std::size_t i = 0; i < exponents.size(); ++i) {
      if (std::isfinite(exponents[i])) {
        sums[i].add(power_of_magnitude(g, exponents[i]) * ints[i]);
      } else {
        peak = std::max(peak, g * ints[i]);
      }
    }
    ++samples;
  };

  long reached = 0;
  accumulate(0);
  double tail = 0.0;
  for (double half = 4.0;; half += 4.0) {
    if (half > window.half_width()) {
      std::ostringstream msg;
      msg << "space-time tail bound " << tail << " not certified within the window half-width "
          << window.half_width();
      throw ValidationError(msg.str());
    }
    const long target = static_cast<long>(std::floor(half / dt));
    for (long j = reached + 1; j <= target; ++j) {
      accumulate(j);
      accumulate(-j);
    }
    reached = target;
    bool certified = true;
    tail = 0.0;
    for (std::size_t i = 0; i < exponents.size(); ++i) {
      const double p = exponents[i];
      const double g_at = window.envelope(window.shift() + half);
      double bound;
      if (std::isfinite(p)) {
        const double sup_p = p >= 2.0 ? std::pow(sup_bound, p - 2.0) * mass
                                      : std::pow(area, 1.0 - 0.5 * p) * std::pow(mass, 0.5 * p);
        bound = 2.0 * std::pow(4.8, p) * std::pow(half, 1.0 - 2.0 * p) / (2.0 * p - 1.0) * sup_p;
        tail = std::max(tail, bound / std::max(dt * sums[i].value(), 1e-300));
        if (bound > kTailFraction * dt * sums[i].value()) certified = false;
      } else {
        bound = g_at * sup_bound;
        tail = std::max(tail, bound / std::max(peak, 1e-300));
        if (bound > peak) certified = false;
      }
    }
    if (certified) {
      result.quadrature = {dt, half, tail, samples};
      break;
    }
  }
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    result.values[i] = std::isfinite(exponents[i]) ? std::pow(dt * sums[i].value(), 1.0 / exponents[i]) : peak;
  }
  return result;
}

}  // namespace

SpacetimeNorms spacetime_norms(const Field& f, const TimeWindow& window, std::span<const double> exponents) {
  check_exponents(exponents);
  validate_wraparound(f, std::abs(window.shift()) + window.half_width());
  return spacetime_for_packet(f.spec(), packet_from(f), window, exponents);
}

std::vector<SectorTable> spacetime_sector_terms(const Field& f, const DecompositionPlan& plan,
                                                const TimeWindow& window, std::span<const double> exponents) {
  check_exponents(exponents);
  if (!(f.spec() == plan.spec())) throw UsageError("field and plan live on different grids");
  plan.validate_coverage(f);
  validate_wraparound(f, std::abs(window.shift()) + window.half_width());
  const Field spectral = to_spectral(f);
  const auto values = spectral.values();

  std::vector<SectorTable> out(exponents.size());
  {
    const auto rho = plan.dyadic().low_frequency_table();
    std::vector<std::uint32_t> indices;
    std::vector<Complex> coefficients;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (rho[i] == 0.0 || values[i] == Complex(0.0)) continue;
      indices.push_back(static_cast<std::uint32_t>(i));
      coefficients.push_back(rho[i] * values[i]);
    }
    const auto low = spacetime_for_packet(f.spec(), packet_from(f.spec(), std::move(indices), std::move(coefficients)),
                                          window, exponents);
    for (std::size_t i = 0; i < exponents.size(); ++i) {
      out[i].p = exponents[i];
      out[i].low = low.values[i];
    }
  }
  for (int k = plan.k_lo(); k <= plan.k_hi(); ++k) {
    const SectorFamily& family = plan.sectors(k);
    for (auto& table : out) {
      table.scales.push_back(k);
      table.sectors.emplace_back();
    }
    for (int j = 0; j < family.size(); ++j) {
      const SectorEntries& entries = plan.entries(k, j);
      std::vector<std::uint32_t> indices;
      std::vector<Complex> coefficients;
      for (std::size_t e = 0; e < entries.index.size(); ++e) {
        const Complex c = entries.weight[e] * values[entries.index[e]];
        if (c == Complex(0.0)) continue;
        indices.push_back(entries.index[e]);
        coefficients.push_back(c);
      }
      const auto norms = spacetime_for_packet(
          f.spec(), packet_from(f.spec(), std::move(indices), std::move(coefficients)), window, exponents);
      for (std::size_t i = 0; i < exponents.size(); ++i) {
        out[i].sectors.back().push_back({k, j, family.direction_angle(j), norms.values[i]});
      }
    }
  }
  return out;
}

NormReport wavepacket_spacetime_norm(const Field& f, const ExponentTuple& tuple, const TimeWindow& window,
                                     const DecompositionPlan& plan) {
  tuple.validate();
  const double exps[1] = {tuple.p};
  auto report = assemble_adapted(spacetime_sector_terms(f, plan, window, exps)[0], tuple, "wavepacket_spacetime");
  return report;
}

IntervalNorm interval_spacetime_norm(const Field& f, double p, double a, double b, int nodes) {
  if (nodes < 5 || nodes % 2 == 0) throw ConfigError("Simpson rule needs an odd node count >= 5");
  if (!(b > a)) throw ConfigError("time interval must have b > a");
  if (!(p >= 1.0)) throw ConfigError("Lebesgue exponent must be >= 1");
  validate_wraparound(f, std::max(std::abs(a), std::abs(b)));
  const Packet packet = packet_from(f);
  const double exps[1] = {p};
  const PatchLayout layout(f.spec(), packet.indices, exps);
  const double h = (b - a) / (nodes - 1);
  std::vector<double> values(nodes);
  for (int i = 0; i < nodes; ++i) values[i] = layout.integrals(evolved(packet, a + i * h), exps)[0];

  IntervalNorm result;
  if (!std::isfinite(p)) {
    result.value = *std::max_element(values.begin(), values.end());
    double coarse = 0.0;
    for (int i = 0; i < nodes; i += 2) coarse = std::max(coarse, values[i]);
    result.halved_difference = result.value > 0.0 ? std::abs(result.value - coarse) / result.value : 0.0;
    return result;
  }
  auto simpson = [&](int stride) {
    const int intervals = (nodes - 1) / stride;
    CompensatedSum acc;
    for (int i = 0; i <= intervals; ++i) {
      const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc.add(w * values[i * stride]);
    }
    return acc.value() * stride * h / 3.0;
  };
  result.value = std::pow(simpson(1), 1.0 / p);
  if ((nodes - 1) % 4 == 0) {
    const double coarse = std::pow(simpson(2), 1.0 / p);
    result.halved_difference = result.value > 0.0 ? std::abs(result.value - coarse) / result.value : 0.0;
  }
  return result;
}

}  // namespace halfwave
