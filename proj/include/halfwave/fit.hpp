#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "halfwave/report.hpp"

namespace halfwave {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  // Root mean square of the fit residuals on the y scale.
  double residual = 0.0;
  std::vector<std::pair<double, double>> samples;

  Json to_json() const;
};

// Ordinary least squares y = slope x + intercept. UsageError with fewer than 3
// points or when all x coincide; NumericError on non-finite input.
FitResult least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace halfwave
