#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "generators.hpp"
#include "halfwave/errors.hpp"
#include "halfwave/experiments.hpp"
#include "halfwave/propagator.hpp"

using namespace halfwave;
using halfwave::testing::Gen;

TEST_CASE("least squares") {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
  const std::vector<double> y{1.0, 3.0, 5.0, 7.0};
  const FitResult exact = least_squares(x, y);
  CHECK(exact.slope == doctest::Approx(2.0));
  CHECK(exact.intercept == doctest::Approx(1.0));
  CHECK(exact.residual < 1e-14);
  CHECK(exact.samples.size() == 4);

  const std::vector<double> bent{1.0, 3.5, 5.0, 7.0};
  CHECK(least_squares(x, bent).residual > 0.1);

  const std::vector<double> two{0.0, 1.0};
  CHECK_THROWS_AS(least_squares(two, two), UsageError);
  const std::vector<double> same{1.0, 1.0, 1.0};
  CHECK_THROWS_AS(least_squares(same, same), UsageError);
  const std::vector<double> bad{1.0, std::numeric_limits<double>::quiet_NaN(), 2.0, 3.0};
  CHECK_THROWS_AS(least_squares(x, bad), NumericError);
}

TEST_CASE("bands skip zero and non-finite ratios") {
  const std::vector<double> ratios{2.0, 0.0, std::numeric_limits<double>::infinity(), 1.0, 4.0};
  const Band band = band_of(ratios);
  CHECK(band.count == 3);
  CHECK(band.min == 1.0);
  CHECK(band.max == 4.0);
  CHECK(band.median == 2.0);
  CHECK(band.width() == 4.0);
  CHECK(band_of(std::vector<double>{}).width() == 0.0);
}

TEST_CASE("sweep grids") {
  CHECK(sweep_grid(3) == create_grid(128, 12.0));
  CHECK(sweep_grid(4) == create_grid(128, 12.0));
  CHECK(sweep_grid(5) == create_grid(256, 12.0));
  CHECK(sweep_grid(6) == create_grid(512, 12.0));
  CHECK_THROWS_AS(sweep_grid(-1), ConfigError);
}

TEST_CASE("Hoelder witness attains the dual norm") {
  const GridSpec g = create_grid(64, 10.0);
  for (int trial = 0; trial < 5; ++trial) {
    Gen gen(10 + trial);
    const Field u = gen.noise(g);
    for (double p : {4.0, 1.5, kInfinity}) {
      const double dual = std::isfinite(p) ? p / (p - 1.0) : 1.0;
      const Field w = holder_witness(u, p);
      Complex pairing = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) pairing += u.values()[i] * w.values()[i];
      pairing *= g.cell_area();
      CHECK(std::abs(pairing.imag()) < 1e-9 * std::abs(pairing));
      CHECK(pairing.real() / lebesgue_norm(w, p) == doctest::Approx(lebesgue_norm(u, dual)).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(holder_witness(Field::zeros(g, Representation::physical), 1.0), ConfigError);
}

TEST_CASE("Knapp growth is flat in L2") {
  const GridSpec g = create_grid(512, 128.0);
  const std::vector<double> times{4.0, 8.0, 16.0, 32.0};
  const GrowthReport report = knapp_growth(knapp_radial(g), 2.0, times);
  CHECK(std::abs(report.fit.slope) < 0.02);
  CHECK(report.target == 0.0);
  CHECK(report.values.size() == times.size());
  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(growth_fit(knapp_radial(g), 2.0, two), UsageError);
}

TEST_CASE("decoupling at p = 2 is controlled by the window") {
  const GridSpec g = sweep_grid(3);
  const TimeWindow window;
  // LHS = ||f||_2; RHS^2 = ||g||_2^2 sum ||chi_nu f||^2 with 1/2 <= sum chi_nu^2 <= 1.
  const double window_l2 = std::sqrt(1.44 * 2.0 * 2.0 * kPi / 3.0);
  for (int trial = 0; trial < 3; ++trial) {
    Gen gen(20 + trial);
    const DecouplingRow row = decoupling_row(gen.annulus(g, 3), 3, 2.0, window);
    CHECK(row.ratio() >= (1.0 / window_l2) * (1.0 - 1e-3));
    CHECK(row.ratio() <= (std::sqrt(2.0) / window_l2) * (1.0 + 1e-3));
    CHECK(row.per_sector.size() == static_cast<std::size_t>(sector_count(3)));
  }
}

TEST_CASE("norm equivalence is scale invariant") {
  ShellEnsemble shell = shell_ensemble(3, 1, 0, 31);
  shell.samples.push_back(Complex(3.0) * shell.samples[0]);
  const std::vector<ShellEnsemble> shells{shell};
  const std::vector<ExponentTuple> tuples{{0.0, 4.0, 2.0, 2.0, 2}};
  const EquivalenceReport report = equivalence_report(shells, tuples, TimeWindow());
  REQUIRE(report.samples.size() == 2);
  for (int m = 0; m < 3; ++m) {
    CHECK(report.samples[1].norms[0][m] == doctest::Approx(3.0 * report.samples[0].norms[0][m]).epsilon(1e-10));
  }
  for (const auto& band : report.bands) CHECK(band.overall.width() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("embedding rows: the identity instance has constant one") {
  const ShellEnsemble shell = shell_ensemble(3, 1, 0, 41);
  const DecompositionPlan plan(shell.spec, 2, 3);
  const WavePacketSymbols symbols(shell.spec, 3);
  const auto rows = embedding_rows(shell.samples[0], 0, 4.0, plan, symbols);
  bool found = false;
  for (const auto& row : rows) {
    CHECK(std::isfinite(row.constant()));
    CHECK(row.constant() > 0.0);
    if (row.name == "integrability_identity") {
      found = true;
      CHECK(row.constant() == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  CHECK(found);
}

TEST_CASE("products") {
  const GridSpec g = create_grid(128, kTwoPi);
  const Field a = testing::exact_mode(g, 3, 1);
  const Field b = testing::exact_mode(g, -1, 5);
  const Field ab[2] = {a, b};
  CHECK(testing::max_abs_difference(to_physical(product(ab)), testing::plane_wave(g, 2, 6)) < 1e-12);

  const Field zero = Field::zeros(g, Representation::spectral);
  const Field az[2] = {a, zero};
  CHECK(lebesgue_norm(product(az), kInfinity) == 0.0);

  const Field high = testing::exact_mode(g, 40, 0);
  const Field hh[2] = {high, high};
  CHECK_THROWS_AS(product(hh), ValidationError);

  const GridSpec pg = create_grid(256, 32.0);
  const DecompositionPlan plan(pg, 0, 3);
  Gen gen(50);
  const Field f = gen.band_limited(pg, 4.0);
  const ProductRow row = bilinear_check(f, Field::zeros(pg, Representation::spectral), 1.0, 4.0, 4.0, plan);
  CHECK(row.lhs == 0.0);
  CHECK(row.constant() == 0.0);
}

TEST_CASE("local smoothing ratio is finite and positive") {
  const ShellEnsemble shell = shell_ensemble(3, 1, 0, 61);
  const DecompositionPlan plan(shell.spec, 2, 3);
  const SmoothingRow row = local_smoothing_ratio(shell.samples[0], 4.0, 0.1, plan);
  CHECK(row.lhs > 0.0);
  CHECK(row.rhs > 0.0);
  CHECK(row.quadrature_change < 1e-3);
}
