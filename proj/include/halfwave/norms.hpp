#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "halfwave/decomposition.hpp"
#include "halfwave/report.hpp"
#include "halfwave/spectral_grid.hpp"
#include "halfwave/wave_packets.hpp"

namespace halfwave {

// s(p) = ((d-1)/2)|1/2 - 1/p|, sbar(p) = 0 up to p = 2(d+1)/(d-1) and s(p) - 1/p beyond.
// sbar is reported as 0 for p < 2, where it is not used.
struct ExponentValues {
  double s = 0.0;
  double s_bar = 0.0;
  double growth = 0.0;  // 2 s(p)
};
ExponentValues exponents(int d, double p);
double fixed_time_loss(int d, double p);
double decoupling_exponent(int d, double p);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct ExponentTuple {
  double s = 0.0;
  double p = 2.0;
  double q = 2.0;
  double r = 2.0;
  int d = 2;

  // ConfigError unless p in [1, inf], q in [1, inf), r in [1, inf], d >= 2.
  void validate() const;
  Json to_json() const;
};

// |g(t)| >= 1 on [0, 1] with Fourier support in [-1, 1]: g(t) = 1.2 (sin(t/2)/(t/2))^2,
// optionally translated to g(t - shift), truncated to |t - shift| <= half_width.
class TimeWindow {
 public:
  explicit TimeWindow(double half_width = 64.0, double shift = 0.0);

  double operator()(double t) const;
  double half_width() const { return half_width_; }
  double shift() const { return shift_; }
  // Upper bound for int_{|t - shift| > half_width} |g(t)| dt.
  double certified_tail() const;
  // Pointwise bound |g(t)| <= 1.2 min(1, 4/(t - shift)^2).
  double envelope(double t) const;
  Json metadata() const;

 private:
  double half_width_;
  double shift_;
};

struct SectorTerm {
  int k = 0;
  int index = 0;
  double angle = 0.0;
  double value = 0.0;
};

struct ScaleTerm {
  int k = 0;
  double weight = 1.0;
  double value = 0.0;
};

// total = low_freq + l^outer(weight_k * value_k); for adapted norms value_k is the
// l^q sum of that scale's sector terms.
struct NormReport {
  std::string kind;
  ExponentTuple exponents;
  double outer = 2.0;
  double total = 0.0;
  double low_freq = 0.0;
  std::vector<ScaleTerm> per_scale;
  std::vector<SectorTerm> per_sector;
  std::vector<std::string> warnings;

  // Rebuilds total from per_sector (or per_scale when there are no sectors).
  double recombine() const;
  Json to_json() const;
  std::string to_csv() const;
};

double sobolev_norm(const Field& f, double s, double p);

// Per-scale Lebesgue norms ||psi_k(D) f||_p for each exponent.
struct ShellTerms {
  double p = 2.0;
  std::vector<double> values;  // index k = 0..k_max
};
std::vector<ShellTerms> shell_terms(const Field& f, const DyadicFamily& dyadic,
                                    std::span<const double> exponents);
NormReport assemble_besov(const ShellTerms& terms, double s, double r);
// ValidationError when spectrum leaks past 2^{k_max}.
NormReport besov_norm(const Field& f, double s, double p, double r, const DyadicFamily& dyadic);

// Per-sector values ||chi^k_nu(D) f||_p (or the space-time version) for each exponent.
struct SectorTable {
  double p = 2.0;
  double low = 0.0;
  std::vector<int> scales;
  std::vector<std::vector<SectorTerm>> sectors;  // [scale - k_lo][j]
};
std::vector<SectorTable> sector_terms(const Field& f, const DecompositionPlan& plan,
                                      std::span<const double> exponents);
NormReport assemble_adapted(const SectorTable& table, const ExponentTuple& tuple, std::string kind);

NormReport adapted_norm_discrete(const Field& f, const ExponentTuple& tuple, const DecompositionPlan& plan);

// Per-direction Besov pieces ||psi_l(D) phi_omega(D) f||_p, l = 0..k_max, and ||rho(D) f||_p.
struct DirectionTable {
  double p = 2.0;
  double low = 0.0;
  double omega_weight = 0.0;
  std::vector<std::vector<double>> terms;  // [omega][l]
};
std::vector<DirectionTable> direction_terms(const Field& f, const WavePacketSymbols& symbols,
                                            const DyadicFamily& dyadic, std::span<const double> exponents);

struct IntegralNorm {
  double value = 0.0;
  // Relative change when only every other omega node is used.
  double error_estimate = 0.0;
  std::vector<std::string> warnings;
  Json to_json() const;
};
IntegralNorm assemble_integral(const DirectionTable& table, const ExponentTuple& tuple);
IntegralNorm adapted_norm_integral(const Field& f, const ExponentTuple& tuple,
                                   const WavePacketSymbols& symbols, const DyadicFamily& dyadic);

// ||rho(D) f||_p + (int ||<D>^s phi_omega(D) f||_p^p d omega)^{1/p}, 1 < p < inf.
IntegralNorm fio_hardy_norm(const Field& f, double s, double p, const WavePacketSymbols& symbols,
                            const DyadicFamily& dyadic);

struct SpacetimeQuadrature {
  double dt = 0.0;
  double half_width = 0.0;
  double tail_bound = 0.0;
  int samples = 0;
};

// ||g(t) e^{itD} f||_{L^p(R x R^2)} for each exponent, by trapezoid in t.
struct SpacetimeNorms {
  std::vector<double> values;
  SpacetimeQuadrature quadrature;
};
SpacetimeNorms spacetime_norms(const Field& f, const TimeWindow& window, std::span<const double> exponents);

std::vector<SectorTable> spacetime_sector_terms(const Field& f, const DecompositionPlan& plan,
                                                const TimeWindow& window, std::span<const double> exponents);
NormReport wavepacket_spacetime_norm(const Field& f, const ExponentTuple& tuple, const TimeWindow& window,
                                     const DecompositionPlan& plan);

// ||e^{itD} f||_{L^p([a, b] x R^2)} by composite Simpson on `nodes` points (odd).
struct IntervalNorm {
  double value = 0.0;
  double halved_difference = 0.0;
};
IntervalNorm interval_spacetime_norm(const Field& f, double p, double a, double b, int nodes = 129);

}  // namespace halfwave
