#include "patch.hpp"

#include <algorithm>
#include <cmath>

#include "fft.hpp"
#include "halfwave/errors.hpp"
#include "halfwave/numerics.hpp"

namespace halfwave::detail {

PatchLayout::PatchLayout(const GridSpec& spec, std::vector<std::uint32_t> indices,
                         std::span<const double> exponents)
    : spec_(spec), indices_(std::move(indices)), n_eval_(spec.n) {
  const int n = spec.n;
  targets_.assign(indices_.begin(), indices_.end());
  if (indices_.empty()) return;

  double p_max = 0.0;
  for (double p : exponents) {
    if (!is_even_integer(p)) return;
    p_max = std::max(p_max, p);
  }
  if (p_max == 0.0) return;

  int lo_x = n, hi_x = -n, lo_y = n, hi_y = -n;
  for (auto idx : indices_) {
    const int mx = signed_index(static_cast<int>(idx % n), n);
    const int my = signed_index(static_cast<int>(idx / n), n);
    lo_x = std::min(lo_x, mx);
    hi_x = std::max(hi_x, mx);
    lo_y = std::min(lo_y, my);
    hi_y = std::max(hi_y, my);
  }
  const int width = std::max(hi_x - lo_x, hi_y - lo_y) + 1;
  const double reach = 0.5 * p_max * (width - 1);
  if (!(n > reach)) return;
  int small = 8;
  while (!(small > reach) || small < width) small *= 2;
  if (small >= n) return;

  const int cx = lo_x + (hi_x - lo_x) / 2;
  const int cy = lo_y + (hi_y - lo_y) / 2;
  for (std::size_t j = 0; j < indices_.size(); ++j) {
    const int mx = signed_index(static_cast<int>(indices_[j] % n), n) - cx;
    const int my = signed_index(static_cast<int>(indices_[j] / n), n) - cy;
    targets_[j] = static_cast<std::uint32_t>(wrap_index(my, small) * small + wrap_index(mx, small));
  }
  n_eval_ = small;
  scale_ = static_cast<double>(small) / n;
}

double PatchLayout::cell_area() const {
  const double h = spec_.length / n_eval_;
  return h * h;
}

ComplexVector PatchLayout::samples(std::span<const Complex> coefficients) const {
  if (coefficients.size() != indices_.size()) throw UsageError("patch coefficient count mismatch");
  ComplexVector buffer(static_cast<std::size_t>(n_eval_) * n_eval_);
  for (std::size_t j = 0; j < targets_.size(); ++j) buffer[targets_[j]] = scale_ * coefficients[j];
  fft_inverse(buffer.data(), n_eval_);
  return buffer;
}

std::vector<double> PatchLayout::integrals(std::span<const Complex> coefficients,
                                           std::span<const double> exponents) const {
  std::vector<double> out(exponents.size(), 0.0);
  if (indices_.empty()) return out;
  const ComplexVector buffer = samples(coefficients);
  std::vector<CompensatedSum> sums(exponents.size());
  double peak = 0.0;
  bool all_even = true;
  for (double p : exponents) all_even = all_even && is_even_integer(p);
  if (all_even) {
    for (const Complex& z : buffer) {
      const double a2 = std::norm(z);
      for (std::size_t j = 0; j < exponents.size(); ++j) sums[j].add(power_of_magnitude(a2, 0.5 * exponents[j]));
    }
  } else {
    for (const Complex& z : buffer) {
      const double a = std::abs(z);
      peak = std::max(peak, a);
      for (std::size_t j = 0; j < exponents.size(); ++j) {
        if (std::isfinite(exponents[j])) sums[j].add(power_of_magnitude(a, exponents[j]));
      }
    }
  }
  const double area = cell_area();
  for (std::size_t j = 0; j < exponents.size(); ++j) {
    out[j] = std::isfinite(exponents[j]) ? area * sums[j].value() : peak;
  }
  return out;
}

std::vector<double> masked_integrals(const Field& spectral, std::span<const double> table,
                                     std::span<const double> exponents) {
  if (spectral.representation() != Representation::spectral) {
    throw UsageError("masked_integrals needs spectral coefficients");
  }
  const auto values = spectral.values();
  std::vector<std::uint32_t> indices;
  std::vector<Complex> coefficients;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (table[i] == 0.0 || values[i] == Complex(0.0)) continue;
    indices.push_back(static_cast<std::uint32_t>(i));
    coefficients.push_back(table[i] * values[i]);
  }
  const PatchLayout layout(spectral.spec(), std::move(indices), exponents);
  return layout.integrals(coefficients, exponents);
}

double norm_from_integral(double integral, double p) {
  return std::isfinite(p) ? std::pow(integral, 1.0 / p) : integral;
}

}  // namespace halfwave::detail
