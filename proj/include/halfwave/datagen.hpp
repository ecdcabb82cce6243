#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "halfwave/report.hpp"
#include "halfwave/spectral_grid.hpp"

namespace halfwave {

enum class EnsembleKind { radial_knapp, sector_bump, random_annulus, gaussian };

std::string to_string(EnsembleKind kind);
// ConfigError on unknown names.
EnsembleKind ensemble_kind_from(const std::string& name);

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::random_annulus;
  // Shell k: radial spectral support [2^{k-1}, 2^k].
  int k = 3;
  int count = 1;
  std::uint64_t seed = 0;
  // sector_bump: fixed direction index; random per sample when absent.
  std::optional<int> direction;
  // gaussian: centre and width.
  std::array<double, 2> centre{0.0, 0.0};
  double width = 1.0;
  // random_annulus: physical Gaussian envelope of this width (the shell profile is
  // re-applied afterwards, so band limitation stays exact).
  std::optional<double> envelope_width;

  Json metadata() const;
};

// Generated fields are returned in spectral form so exact spectral zeros survive.

// Radial annulus profile of shell k: smooth bump on [2^{k-1}, 2^k].
double shell_profile(int k, double radius);

// F^{-1} of the radial bump chi(|xi|) supported in [1/2, 1]. The support radius
// is the radius holding all but 1% of the L2 mass.
Field knapp_radial(const GridSpec& spec);
// The Knapp spectral profile itself.
double knapp_profile(double radius);

// Unit-L2 smooth bump with spectrum in [2^{k-1}, 2^k] x {angle within 2 pi/M_k of nu_j}.
// ConfigError if the sector family k is not resolved on the grid.
Field sector_bump(const GridSpec& spec, int k, int direction);

// exp(-|x - centre|^2 / (2 width^2)), peak 1.
Field gaussian(const GridSpec& spec, std::array<double, 2> centre, double width);

std::vector<Field> random_ensemble(const GridSpec& spec, const EnsembleSpec& es);
Field ensemble_sample(const GridSpec& spec, const EnsembleSpec& es, int index);

}  // namespace halfwave
