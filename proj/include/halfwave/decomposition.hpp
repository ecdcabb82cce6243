#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "halfwave/report.hpp"
#include "halfwave/spectral_grid.hpp"

namespace halfwave {

// psi_0 = eta(|xi|), psi_k = eta(|xi|/2^k) - eta(|xi|/2^{k-1}), rho = eta(|xi|/2).
double dyadic_cutoff(int k, double radius);
double low_frequency_cutoff(double radius);

class DyadicFamily {
 public:
  // Throws ConfigError unless 2^{k_max+1} is below the grid's Nyquist frequency.
  DyadicFamily(const GridSpec& spec, int k_max);

  const GridSpec& spec() const { return spec_; }
  int k_max() const { return k_max_; }
  std::span<const double> table(int k) const;
  std::span<const double> low_frequency_table() const { return rho_; }

 private:
  GridSpec spec_;
  int k_max_;
  std::vector<std::vector<double>> tables_;
  std::vector<double> rho_;
};

DyadicFamily build_dyadic(const GridSpec& spec, int k_max);

// M_k = ceil(2 pi 2^{k/2}).
int sector_count(int k);

// Smallest number of lattice points found in any arc of angle 2^{-k/2}
// (centred on a family direction) of the annulus 2^{k-1} <= |xi| <= 2^{k+1}.
int min_points_per_arc(const GridSpec& spec, int k);

class SectorFamily {
 public:
  // Throws ConfigError naming the required L and N when an arc has fewer than 16 points.
  SectorFamily(const GridSpec& spec, int k);

  const GridSpec& spec() const { return spec_; }
  int scale() const { return k_; }
  int size() const { return count_; }
  double spacing() const { return kTwoPi / count_; }
  double direction_angle(int j) const;
  std::array<double, 2> direction(int j) const;
  // Index of a family direction; UsageError if nu is not one of them.
  int index_of(std::array<double, 2> nu) const;

  // chi_j as a function of the angle of xi.
  double cutoff(int j, double angle) const;
  // chi_j(xi), with the value 1/M_k at the origin.
  double cutoff(int j, double kx, double ky) const;
  // The two sectors that can be nonzero at an angle: chi_lower = weight, chi_{lower+1} = 1 - weight.
  std::pair<int, double> split(double angle) const;

  Json metadata() const;

 private:
  GridSpec spec_;
  int k_;
  int count_;
};

SectorFamily build_sectors(const GridSpec& spec, int k);

// chi^k_nu(D) f with chi^k_nu = chi_nu psi_k.
Field sector_project(const Field& f, const SectorFamily& family, int j, const DyadicFamily& dyadic);
Field sector_project(const Field& f, const SectorFamily& family, std::array<double, 2> nu,
                     const DyadicFamily& dyadic);

// Nonzero lattice values of one chi^k_nu.
struct SectorEntries {
  std::vector<std::uint32_t> index;
  std::vector<double> weight;
};

// Dyadic family up to k_hi plus sector families for the shells k_lo..k_hi.
class DecompositionPlan {
 public:
  DecompositionPlan(const GridSpec& spec, int k_lo, int k_hi);

  const GridSpec& spec() const { return spec_; }
  int k_lo() const { return k_lo_; }
  int k_hi() const { return k_hi_; }
  const DyadicFamily& dyadic() const { return dyadic_; }
  const SectorFamily& sectors(int k) const;
  const SectorEntries& entries(int k, int j) const;

  // Spectral mass fraction outside {rho = 1} and outside the plan's shells.
  double uncovered_fraction(const Field& f) const;
  // ValidationError if uncovered_fraction exceeds 1e-20.
  void validate_coverage(const Field& f) const;

  Json metadata() const;

 private:
  GridSpec spec_;
  int k_lo_;
  int k_hi_;
  DyadicFamily dyadic_;
  std::vector<SectorFamily> families_;
  std::vector<std::vector<SectorEntries>> entries_;
};

// Spectral mass fraction where sum_{k<=k_max} psi_k < 1, i.e. beyond the family's reach.
double leakage_fraction(const Field& f, const DyadicFamily& dyadic);

// Plot-ready CSV of a lattice table: xi_x, xi_y, value (N <= 256).
std::string symbol_csv(const GridSpec& spec, std::span<const double> table);

}  // namespace halfwave
