#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "halfwave/spectral_grid.hpp"

namespace halfwave::detail {

// Evaluates Lebesgue integrals of a trigonometric polynomial given by a sparse
// set of lattice coefficients. The coefficient positions are fixed at
// construction; values are passed per call so one layout serves many time
// steps or many multipliers with the same support.
//
// For even integer exponents |u|^p is itself a trigonometric polynomial, so
// after demodulating to the box centre it can be integrated exactly on an
// N' x N' grid with N' > (p/2)(W - 1). The small grid is used only when that
// bound also holds for N, so results match the full-grid sum up to rounding.
class PatchLayout {
 public:
  PatchLayout(const GridSpec& spec, std::vector<std::uint32_t> indices,
              std::span<const double> exponents);

  const GridSpec& spec() const { return spec_; }
  std::span<const std::uint32_t> indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  int evaluation_size() const { return n_eval_; }

  // Entry j of the result is the integral of |u|^p_j (finite p) or max |u|
  // (p = infinity), where u is the inverse unitary DFT of the coefficients on
  // the full grid. Exponents must be a subset of the construction exponents.
  std::vector<double> integrals(std::span<const Complex> coefficients,
                                std::span<const double> exponents) const;

  // Physical samples on the evaluation grid, scaled so their integrals match.
  ComplexVector samples(std::span<const Complex> coefficients) const;
  double cell_area() const;

 private:
  GridSpec spec_;
  std::vector<std::uint32_t> indices_;
  std::vector<std::uint32_t> targets_;
  int n_eval_ = 0;
  double scale_ = 1.0;
};

// Integrals from a full spectral field restricted to the nonzero entries of table * f^.
std::vector<double> masked_integrals(const Field& spectral, std::span<const double> table,
                                     std::span<const double> exponents);

// Converts an integral of |u|^p (or max) into the norm.
double norm_from_integral(double integral, double p);

}  // namespace halfwave::detail
