#include "halfwave/fit.hpp"

#include <cmath>

#include "halfwave/errors.hpp"
#include "halfwave/numerics.hpp"

namespace halfwave {

Json FitResult::to_json() const {
  Json j;
  j["slope"] = slope;
  j["intercept"] = intercept;
  j["residual"] = residual;
  Json pts = Json::array();
  for (const auto& [x, y] : samples) pts.push_back({x, y});
  j["samples"] = std::move(pts);
  return j;
}

FitResult least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw UsageError("fit needs matching x and y");
  if (x.size() < 3) throw UsageError("degenerate fit: at least 3 points are required");
  const double n = static_cast<double>(x.size());
  CompensatedSum sx, sy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw NumericError("non-finite value in fit data");
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / n, my = sy.value() / n;
  CompensatedSum sxx, sxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx.add((x[i] - mx) * (x[i] - mx));
    sxy.add((x[i] - mx) * (y[i] - my));
  }
  if (!(sxx.value() > 0.0)) throw UsageError("degenerate fit: all abscissae coincide");

  FitResult fit;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  CompensatedSum ss;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.slope * x[i] + fit.intercept);
    ss.add(e * e);
    fit.samples.emplace_back(x[i], y[i]);
  }
  fit.residual = std::sqrt(ss.value() / n);
  return fit;
}

}  // namespace halfwave
