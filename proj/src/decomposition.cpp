#include "halfwave/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "halfwave/cutoffs.hpp"
#include "halfwave/errors.hpp"
#include "halfwave/numerics.hpp"

namespace halfwave {

double dyadic_cutoff(int k, double radius) {
  if (k == 0) return transition(radius);
  return transition(radius / std::ldexp(1.0, k)) - transition(radius / std::ldexp(1.0, k - 1));
}

double low_frequency_cutoff(double radius) { return transition(radius / 2.0); }

DyadicFamily::DyadicFamily(const GridSpec& spec, int k_max) : spec_(spec), k_max_(k_max) {
  if (k_max < 0) throw ConfigError("k_max must be non-negative");
  const double top = std::ldexp(1.0, k_max + 1);
  if (!(top < spec.nyquist())) {
    std::ostringstream msg;
    msg << "k_max=" << k_max << " needs Nyquist > " << top << " but N=" << spec.n
        << ", L=" << spec.length << " gives " << spec.nyquist();
    throw ConfigError(msg.str());
  }
  const auto lat = lattice(spec);
  tables_.assign(k_max + 1, std::vector<double>(spec.size()));
  rho_.resize(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double r = lat->radius[i];
    rho_[i] = low_frequency_cutoff(r);
    for (int k = 0; k <= k_max; ++k) tables_[k][i] = dyadic_cutoff(k, r);
  }
}

std::span<const double> DyadicFamily::table(int k) const {
  if (k < 0 || k > k_max_) throw UsageError("dyadic scale " + std::to_string(k) + " not in family");
  return tables_[k];
}

DyadicFamily build_dyadic(const GridSpec& spec, int k_max) { return DyadicFamily(spec, k_max); }

int sector_count(int k) {
  return static_cast<int>(std::ceil(kTwoPi * std::pow(2.0, 0.5 * k)));
}

namespace {

constexpr int kMinArcPoints = 16;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a;
}

// Signed angular distance in (-pi, pi].
double angle_offset(double a, double b) {
  double d = std::fmod(a - b, kTwoPi);
  if (d > kPi) d -= kTwoPi;
  if (d <= -kPi) d += kTwoPi;
  return d;
}

int arc_count(double length, int n_max_index, int k) {
  const int count = sector_count(k);
  const double step = kTwoPi / length;
  const double inner = std::ldexp(1.0, k - 1);
  const double outer = std::ldexp(1.0, k + 1);
  const double half_arc = 0.5 * std::pow(2.0, -0.5 * k);
  std::vector<int> hits(count, 0);
  const int reach = std::min(n_max_index, static_cast<int>(std::ceil(outer / step)) + 1);
  for (int my = -reach; my <= reach; ++my) {
    if (my < -n_max_index || my >= n_max_index) continue;
    for (int mx = -reach; mx <= reach; ++mx) {
      if (mx < -n_max_index || mx >= n_max_index) continue;
      const double kx = step * mx;
      const double ky = step * my;
      const double r = std::hypot(kx, ky);
      if (r < inner || r > outer) continue;
      const double theta = wrap_angle(std::atan2(ky, kx));
      const int lower = static_cast<int>(std::floor(theta / (kTwoPi / count)));
      for (int j = lower - 1; j <= lower + 2; ++j) {
        const int jj = ((j % count) + count) % count;
        if (std::abs(angle_offset(theta, kTwoPi * jj / count)) <= half_arc) ++hits[jj];
      }
    }
  }
  return *std::min_element(hits.begin(), hits.end());
}

}  // namespace

int min_points_per_arc(const GridSpec& spec, int k) { return arc_count(spec.length, spec.n / 2, k); }

SectorFamily::SectorFamily(const GridSpec& spec, int k) : spec_(spec), k_(k), count_(sector_count(k)) {
  if (k < 0) throw ConfigError("sector scale must be non-negative");
  if (min_points_per_arc(spec, k) >= kMinArcPoints) return;
  // Points per arc scale with L^2; find the period that resolves the arc, then the N keeping Nyquist.
  double length = spec.length;
  const int unbounded = std::numeric_limits<int>::max() / 4;
  while (arc_count(length, unbounded, k) < kMinArcPoints) length *= 1.25;
  int n = 32;
  while (!(kPi * n / length > std::ldexp(1.0, k + 1))) n *= 2;
  std::ostringstream msg;
  msg << "sector family k=" << k << " is under-resolved on N=" << spec.n << ", L=" << spec.length
      << " (fewer than " << kMinArcPoints << " lattice points per arc); requires L >= " << length
      << " with N >= " << n;
  throw ConfigError(msg.str());
}

double SectorFamily::direction_angle(int j) const {
  if (j < 0 || j >= count_) throw UsageError("sector index out of range");
  return kTwoPi * j / count_;
}

std::array<double, 2> SectorFamily::direction(int j) const {
  const double a = direction_angle(j);
  return {std::cos(a), std::sin(a)};
}

int SectorFamily::index_of(std::array<double, 2> nu) const {
  for (int j = 0; j < count_; ++j) {
    const auto d = direction(j);
    if (std::hypot(d[0] - nu[0], d[1] - nu[1]) < 1e-12) return j;
  }
  throw UsageError("direction is not in the sector family");
}

std::pair<int, double> SectorFamily::split(double angle) const {
  const double position = wrap_angle(angle) / spacing();
  double base = std::floor(position);
  double frac = position - base;
  int lower = static_cast<int>(base) % count_;
  const double b_lower = unit_bump(frac);
  const double b_upper = unit_bump(1.0 - frac);
  return {lower, b_lower / (b_lower + b_upper)};
}

double SectorFamily::cutoff(int j, double angle) const {
  if (j < 0 || j >= count_) throw UsageError("sector index out of range");
  const auto [lower, weight] = split(angle);
  if (j == lower) return weight;
  if (j == (lower + 1) % count_) return 1.0 - weight;
  return 0.0;
}

double SectorFamily::cutoff(int j, double kx, double ky) const {
  if (kx == 0.0 && ky == 0.0) return 1.0 / count_;
  return cutoff(j, wrap_angle(std::atan2(ky, kx)));
}

Json SectorFamily::metadata() const {
  Json j;
  j["k"] = k_;
  j["directions"] = count_;
  j["spacing"] = spacing();
  j["min_points_per_arc"] = min_points_per_arc(spec_, k_);
  return j;
}

SectorFamily build_sectors(const GridSpec& spec, int k) { return SectorFamily(spec, k); }

Field sector_project(const Field& f, const SectorFamily& family, int j, const DyadicFamily& dyadic) {
  if (!(f.spec() == family.spec()) || !(f.spec() == dyadic.spec())) {
    throw UsageError("field and families live on different grids");
  }
  if (j < 0 || j >= family.size()) throw UsageError("sector index out of range");
  const auto psi = dyadic.table(family.scale());
  const auto lat = lattice(f.spec());
  std::vector<double> table(f.spec().size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (psi[i] == 0.0) continue;
    const bool origin = lat->radius[i] == 0.0;
    table[i] = psi[i] * (origin ? 1.0 / family.size() : family.cutoff(j, lat->angle[i]));
  }
  return apply_real_table(f, table);
}

Field sector_project(const Field& f, const SectorFamily& family, std::array<double, 2> nu,
                     const DyadicFamily& dyadic) {
  return sector_project(f, family, family.index_of(nu), dyadic);
}

DecompositionPlan::DecompositionPlan(const GridSpec& spec, int k_lo, int k_hi)
    : spec_(spec), k_lo_(k_lo), k_hi_(k_hi), dyadic_(spec, k_hi) {
  if (k_lo < 0 || k_lo > k_hi) throw ConfigError("plan needs 0 <= k_lo <= k_hi");
  const auto lat = lattice(spec);
  for (int k = k_lo; k <= k_hi; ++k) {
    families_.emplace_back(spec, k);
    const SectorFamily& family = families_.back();
    std::vector<SectorEntries> shell(family.size());
    const auto psi = dyadic_.table(k);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const double w = psi[i];
      if (w == 0.0) continue;
      const auto index = static_cast<std::uint32_t>(i);
      if (lat->radius[i] == 0.0) {
        for (auto& e : shell) {
          e.index.push_back(index);
          e.weight.push_back(w / family.size());
        }
        continue;
      }
      const auto [lower, share] = family.split(lat->angle[i]);
      if (share > 0.0) {
        shell[lower].index.push_back(index);
        shell[lower].weight.push_back(w * share);
      }
      if (share < 1.0) {
        const int upper = (lower + 1) % family.size();
        shell[upper].index.push_back(index);
        shell[upper].weight.push_back(w * (1.0 - share));
      }
    }
    entries_.push_back(std::move(shell));
  }
}

const SectorFamily& DecompositionPlan::sectors(int k) const {
  if (k < k_lo_ || k > k_hi_) throw UsageError("scale " + std::to_string(k) + " not in plan");
  return families_[k - k_lo_];
}

const SectorEntries& DecompositionPlan::entries(int k, int j) const {
  const SectorFamily& family = sectors(k);
  if (j < 0 || j >= family.size()) throw UsageError("sector index out of range");
  return entries_[k - k_lo_][j];
}

double DecompositionPlan::uncovered_fraction(const Field& f) const {
  if (!(f.spec() == spec_)) throw UsageError("field and plan live on different grids");
  const Field spectral = to_spectral(f);
  const auto values = spectral.values();
  const auto rho = dyadic_.low_frequency_table();
  CompensatedSum total, outside;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double m = std::norm(values[i]);
    total.add(m);
    if (m == 0.0 || rho[i] == 1.0) continue;
    double cover = 0.0;
    for (int k = k_lo_; k <= k_hi_; ++k) cover += dyadic_.table(k)[i];
    if (std::abs(cover - 1.0) > 1e-12) outside.add(m);
  }
  return total.value() == 0.0 ? 0.0 : outside.value() / total.value();
}

void DecompositionPlan::validate_coverage(const Field& f) const {
  const double leak = uncovered_fraction(f);
  if (leak > 1e-20) {
    std::ostringstream msg;
    msg << "spectrum not covered by plan shells " << k_lo_ << ".." << k_hi_
        << ": uncovered mass fraction " << leak;
    throw ValidationError(msg.str());
  }
}

Json DecompositionPlan::metadata() const {
  Json j;
  j["N"] = spec_.n;
  j["L"] = spec_.length;
  j["k_lo"] = k_lo_;
  j["k_hi"] = k_hi_;
  Json shells = Json::array();
  for (const auto& family : families_) shells.push_back(family.metadata());
  j["shells"] = shells;
  return j;
}

double leakage_fraction(const Field& f, const DyadicFamily& dyadic) {
  const Field spectral = to_spectral(f);
  const auto values = spectral.values();
  const auto lat = lattice(f.spec());
  const double reach = std::ldexp(1.0, dyadic.k_max());
  CompensatedSum total, outside;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double m = std::norm(values[i]);
    total.add(m);
    if (lat->radius[i] > reach) outside.add(m);
  }
  return total.value() == 0.0 ? 0.0 : outside.value() / total.value();
}

std::string symbol_csv(const GridSpec& spec, std::span<const double> table) {
  if (spec.n > 256) throw ConfigError("symbol CSV export is limited to N <= 256");
  if (table.size() != spec.size()) throw UsageError("table does not match grid");
  const auto lat = lattice(spec);
  CsvTable csv({"xi_x", "xi_y", "value"});
  for (int iy = 0; iy < spec.n; ++iy) {
    for (int ix = 0; ix < spec.n; ++ix) {
      csv.add_row({csv_cell(lat->axis[ix]), csv_cell(lat->axis[iy]),
                   csv_cell(table[static_cast<std::size_t>(iy) * spec.n + ix])});
    }
  }
  return csv.str();
}

}  // namespace halfwave
