#pragma once

#include <functional>
#include <span>
#include <string>

#include "halfwave/spectral_grid.hpp"

namespace halfwave {

// Order-one homogeneous phase phi(xi). Homogeneous functions are undefined at
// the origin, so every phase carries an explicit value there.
class PhaseSpec {
 public:
  static PhaseSpec halfwave();
  static PhaseSpec custom(std::function<double(double, double)> phase, double zero_value, std::string name);

  double operator()(double kx, double ky) const;
  bool is_halfwave() const { return halfwave_; }
  const std::string& name() const { return name_; }
  double zero_value() const { return zero_value_; }

 private:
  PhaseSpec() = default;
  bool halfwave_ = true;
  std::function<double(double, double)> phase_;
  double zero_value_ = 0.0;
  std::string name_ = "halfwave";
};

// Largest relative deviation |phi(2 xi) - 2 phi(xi)| / |2 phi(xi)| over lattice pairs.
double homogeneity_defect(const PhaseSpec& phase, const GridSpec& spec);
// ConfigError if the defect exceeds 1e-10.
void verify_homogeneity(const PhaseSpec& phase, const GridSpec& spec);

// e^{it phi(D)} f. ValidationError when f has a support radius R and L < 2(|t| + R).
Field evolve(const Field& f, double t, const PhaseSpec& phase = PhaseSpec::halfwave());

// cos(tD) f + sin(tD)/D g, with sin(t|xi|)/|xi| = t at xi = 0.
Field wave_pair(const Field& f, const Field& g, double t);
// Time derivative of wave_pair: -D sin(tD) f + cos(tD) g.
Field wave_pair_velocity(const Field& f, const Field& g, double t);

enum class DuhamelRule { simpson, trapezoid };

struct DuhamelResult {
  Field value;
  // ||full - coarse||_2 / max(||full||_2, tiny) with every other sample, when the rule allows it.
  double halving_difference = 0.0;
};

// int_0^t sin((t - s) D)/D F(s) ds from samples F(s_j), s_j = j t / (n - 1).
// Composite Simpson closes odd interval counts with a 3/8 panel.
DuhamelResult duhamel(std::span<const Field> forcing, double t, DuhamelRule rule = DuhamelRule::simpson);

}  // namespace halfwave
