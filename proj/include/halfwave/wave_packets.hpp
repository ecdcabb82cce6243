#pragma once

#include <string>
#include <vector>

#include "halfwave/report.hpp"
#include "halfwave/spectral_grid.hpp"

namespace halfwave {

struct PhiOmegaQuadrature {
  int sigma_nodes = 64;
  // 0 selects 4 M_{k_max} directions.
  int omega_nodes = 0;
  // Angular trapezoid nodes for the radial normalization m.
  int reproducing_nodes = 257;
};

struct ReproductionCheck {
  double relative_error = 0.0;
  bool warned = false;
  std::string warning;
};

// The phi_omega family on the circle: phi_omega(xi) = int_0^4 psi(sigma xi) phi_{omega,sigma}(xi) dsigma/sigma
// with phi_{omega,sigma}(xi) = c_sigma phi((xi^ - omega)/sigma^{1/2}), plus the reproducing symbol m.
class WavePacketSymbols {
 public:
  WavePacketSymbols(const GridSpec& spec, int k_max, PhiOmegaQuadrature quadrature = {});

  const GridSpec& spec() const { return spec_; }
  int k_max() const { return k_max_; }

  // psi on the radius, normalized so int_0^inf psi(sigma r)^2 dsigma/sigma = 1.
  double radial_profile(double u) const;
  // phi(x) = eta(2|x|): one near 0, zero for |x| >= 1.
  static double angular_profile(double x);
  // Circle quadrature of the c_sigma normalization.
  static double c_sigma(double sigma);

  // phi_omega as a function of |xi| and the angle between xi^ and omega.
  double phi(double radius, double angle_offset) const;
  double phi(double omega_angle, double kx, double ky) const;

  // m(|xi|) = 1 / int phi_omega(xi) d omega (radial), by a fine angular quadrature.
  double reproducing(double radius) const;

  int omega_count() const { return static_cast<int>(omega_.size()); }
  double omega_angle(int i) const { return omega_[i]; }
  double omega_weight() const { return kTwoPi / omega_count(); }
  // Largest angular offset at which phi_omega can be nonzero for this radius.
  static double angular_reach(double radius);

  std::span<const double> sigma_nodes() const { return sigma_; }

  // || int m(D) phi_nu(D) f dnu - f ||_2 / ||f||_2 with the coarse omega quadrature,
  // restricted to f with spectrum in |xi| >= 1/2. Warns above 1e-3.
  ReproductionCheck reproduction(const Field& f) const;

  Json metadata() const;

 private:
  GridSpec spec_;
  int k_max_;
  PhiOmegaQuadrature quadrature_;
  double psi_scale_;
  std::vector<double> sigma_;
  std::vector<double> sigma_weight_;
  std::vector<double> c_;
  std::vector<double> omega_;
};

}  // namespace halfwave
