#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "halfwave/datagen.hpp"
#include "halfwave/decomposition.hpp"
#include "halfwave/fit.hpp"
#include "halfwave/norms.hpp"
#include "halfwave/report.hpp"
#include "halfwave/spectral_grid.hpp"
#include "halfwave/wave_packets.hpp"

namespace halfwave {

// Grid used for shell k in the k = 3..6 sweeps: L = 12, N = 128, 128, 256, 512.
GridSpec sweep_grid(int k);

// Samples of one shell on one grid.
struct ShellEnsemble {
  int k = 0;
  GridSpec spec;
  std::vector<Field> samples;
};

// Shell-k samples on sweep_grid(k): `annulus` random annulus fields, then `bumps` sector bumps.
ShellEnsemble shell_ensemble(int k, int annulus, int bumps, std::uint64_t seed);

// Band statistics of a list of positive ratios.
struct Band {
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
  int count = 0;

  double width() const { return min > 0.0 ? max / min : 0.0; }
  Json to_json() const;
};
// Zero and non-finite entries are skipped.
Band band_of(std::span<const double> ratios);

// ---- Propagator growth ----

// Least-squares fit of log ||evolve(f, t)||_p against log(1 + t).
FitResult growth_fit(const Field& f, double p, std::span<const double> times);

struct GrowthReport {
  double p = 2.0;
  // "forward": ||e^{itD} f||_p. "dual": ||e^{itD} chi(D) g_t||_p / ||g_t||_p with the
  // Hoelder witness g_t of e^{itD} f in L^{p'}.
  std::string method;
  std::vector<double> times;
  std::vector<double> values;
  FitResult fit;
  double target = 0.0;

  Json to_json() const;
  std::string to_csv() const;
};

// Growth of the half-wave group on Knapp data. p = infinity uses the dual witness,
// since the sup norm of the evolved Knapp datum itself decays.
GrowthReport knapp_growth(const Field& knapp, double p, std::span<const double> times);

// |u|^{p'-1} conj(u)/|u| (zero where u vanishes), p' the dual exponent of p in (1, inf].
Field holder_witness(const Field& u, double p);

// Fraction of the L1 mass of u inside the shell ||x| - t| <= half_width.
double shell_fraction(const Field& u, double t, double half_width);

// ---- Invariance of the adapted norm ----

struct InvarianceReport {
  ExponentTuple tuple;
  std::vector<double> times;
  std::vector<double> worst_ratio;
  FitResult fit;  // log worst_ratio against log(1 + t)
  double bound = 0.0;

  Json to_json() const;
  std::string to_csv() const;
};

// adapted_norm_discrete(evolve(f, t)) / adapted_norm_discrete(f) over an ensemble,
// one report per exponent tuple. All tuples share the per-sector tables.
std::vector<InvarianceReport> invariance_report(std::span<const Field> ensemble,
                                                std::span<const ExponentTuple> tuples,
                                                const DecompositionPlan& plan, std::span<const double> times);

// ---- Local smoothing ----

struct SmoothingRow {
  int k = 0;
  int sample = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double quadrature_change = 0.0;
  double ratio() const { return lhs / rhs; }
};

struct LocalSmoothingReport {
  double p = 4.0;
  double epsilon = 0.1;
  double s = 0.0;
  std::vector<SmoothingRow> rows;
  std::vector<int> shells;
  std::vector<double> worst;  // per shell
  FitResult fit;              // log worst against k

  Json to_json() const;
  std::string to_csv() const;
};

// ||e^{itD} f||_{L^p([0,1] x R^2)} / ||f||_{B^{sbar(p)+eps}_{p,2,2}} for one field.
SmoothingRow local_smoothing_ratio(const Field& f, double p, double epsilon, const DecompositionPlan& plan);
LocalSmoothingReport local_smoothing_report(std::span<const ShellEnsemble> shells, double p, double epsilon);

// ---- Decoupling ----

struct DecouplingRow {
  int k = 0;
  int sample = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  std::vector<double> per_sector;  // ||g e^{itD} chi_nu(D) f||_{L^p(R x R^2)}
  double ratio() const { return lhs / rhs; }
};

struct DecouplingReport {
  double p = 6.0;
  std::vector<DecouplingRow> rows;
  std::vector<int> shells;
  std::vector<double> worst;  // per shell
  FitResult fit;              // log2 worst against k

  Json to_json() const;
  std::string to_csv() const;
};

// LHS = ||e^{itD} f||_{L^p([0,1] x R^2)}, RHS = (sum_nu ||g e^{itD} chi_nu(D) f||_p^2)^{1/2}
// with the angular cutoffs of family k.
DecouplingRow decoupling_row(const Field& f, int k, double p, const TimeWindow& window);
// Needs at least three shells for the fit; with fewer the fit stays empty.
DecouplingReport decoupling_report(std::span<const ShellEnsemble> shells, double p, const TimeWindow& window);

// ---- Norm equivalence ----

struct EquivalenceSample {
  int k = 0;
  int sample = 0;
  // discrete, integral, wave packet; one triple per tuple.
  std::vector<std::array<double, 3>> norms;
  std::vector<double> integral_error;
};

struct PairBand {
  std::string pair;
  ExponentTuple tuple;
  std::vector<int> shells;
  std::vector<Band> per_shell;
  Band overall;
  FitResult trend;  // log2 median ratio against k
};

struct EquivalenceReport {
  std::vector<ExponentTuple> tuples;
  std::vector<EquivalenceSample> samples;
  std::vector<PairBand> bands;
  std::vector<std::string> warnings;

  Json to_json() const;
  std::string to_csv() const;
};

EquivalenceReport equivalence_report(std::span<const ShellEnsemble> shells, std::span<const ExponentTuple> tuples,
                                     const TimeWindow& window, const PhiOmegaQuadrature& quadrature = {});

// ---- Embeddings ----

struct EmbeddingRow {
  std::string name;
  double p = 4.0;
  int k = 0;
  int sample = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant() const { return rhs > 0.0 ? lhs / rhs : 0.0; }
};

struct EmbeddingSummary {
  std::string name;
  double p = 4.0;
  std::vector<int> shells;
  std::vector<double> worst;  // per shell
  double band = 0.0;
};

struct EmbeddingReport {
  std::vector<EmbeddingRow> rows;
  std::vector<EmbeddingSummary> summary;

  Json to_json() const;
  std::string to_csv() const;
};

// Both sides of every Sobolev/adapted-Besov embedding at s = 0 for each p (p >= 2),
// each written as LHS <= C RHS. Dual-exponent instances use p' = p/(p-1).
std::vector<EmbeddingRow> embedding_rows(const Field& f, int sample, double p, const DecompositionPlan& plan,
                                         const WavePacketSymbols& symbols, double epsilon = 0.1);
EmbeddingReport embedding_report(std::span<const ShellEnsemble> shells, std::span<const double> ps,
                                 double epsilon = 0.1);

// ---- Products ----

struct ProductRow {
  std::string name;
  int sample = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant() const { return rhs > 0.0 ? lhs / rhs : 0.0; }
};

struct ProductReport {
  double s = 1.0;
  std::vector<ProductRow> rows;
  double worst_bilinear = 0.0;
  double worst_trilinear = 0.0;

  Json to_json() const;
  std::string to_csv() const;
};

// Pointwise product in physical space. ValidationError unless the sum of the
// factors' largest spectral radii is below the Nyquist frequency.
Field product(std::span<const Field> factors);

// ||f g||_{B^s_{p,1,1}} / (||f||_{B^s_{p1,1,1}} ||g||_{B^s_{p2,1,1}}) and the trilinear
// ||f1 f2 f3||_{B^{s-1}_{p,1,1}} / prod ||f_i||_{B^s_{p_i,1,1}}, 1/p = sum 1/p_i.
ProductRow bilinear_check(const Field& f, const Field& g, double s, double p1, double p2, const DecompositionPlan& plan);
ProductRow trilinear_check(std::span<const Field> factors, double s, std::array<double, 3> ps,
                           const DecompositionPlan& plan);
ProductReport product_estimate_check(std::span<const std::array<Field, 3>> triples, double s,
                                     const DecompositionPlan& plan);

}  // namespace halfwave
