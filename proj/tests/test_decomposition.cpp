#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "halfwave/cutoffs.hpp"
#include "halfwave/decomposition.hpp"
#include "halfwave/errors.hpp"
#include "halfwave/experiments.hpp"
#include "halfwave/norms.hpp"
#include "halfwave/wave_packets.hpp"

using namespace halfwave;
using halfwave::testing::Gen;

TEST_CASE("cutoff building blocks") {
  CHECK(smooth_glue(0.0) == 0.0);
  CHECK(smooth_glue(-1.0) == 0.0);
  CHECK(transition(1.0) == 1.0);
  CHECK(transition(2.0) == 0.0);
  CHECK(transition(0.3) == 1.0);
  for (double x = -1.0; x <= 0.0; x += 0.01) {
    CHECK(unit_bump(x) + unit_bump(x + 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(annulus_bump(3.0, 2.0, 4.0) == doctest::Approx(1.0));
  CHECK(annulus_bump(1.9, 2.0, 4.0) == 0.0);
}

TEST_CASE("dyadic cutoffs: support and partition of unity") {
  CHECK(dyadic_cutoff(3, 2.0) == 0.0);
  CHECK(dyadic_cutoff(3, 32.0) == 0.0);
  CHECK(dyadic_cutoff(3, 8.0) > 0.0);
  CHECK(low_frequency_cutoff(1.5) == 1.0);
  CHECK(low_frequency_cutoff(4.0) == 0.0);

  for (double r = 0.0; r <= 100.0; r += 0.137) {
    double total = 0.0;
    int nonzero = 0, first = -1, last = -1;
    for (int k = 0; k <= 8; ++k) {
      const double v = dyadic_cutoff(k, r);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      total += v;
      if (v > 0.0) {
        ++nonzero;
        if (first < 0) first = k;
        last = k;
      }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(nonzero <= 2);
    CHECK(last - first <= 1);
  }
}

TEST_CASE("dyadic tables sum to one on the resolved lattice") {
  const GridSpec g = sweep_grid(6);
  const DyadicFamily dyadic(g, 6);
  const auto lat = lattice(g);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (lat->radius[i] > 64.0) continue;
    double total = 0.0;
    for (int k = 0; k <= 6; ++k) total += dyadic.table(k)[i];
    worst = std::max(worst, std::abs(total - 1.0));
  }
  CHECK(worst < 1e-14);
  CHECK(dyadic.low_frequency_table()[0] == 1.0);
}

TEST_CASE("sector counts") {
  CHECK(sector_count(0) == 7);
  CHECK(sector_count(4) == 26);
  CHECK(sector_count(5) == 36);
  for (int k = 1; k <= 10; ++k) CHECK(sector_count(k) >= sector_count(k - 1));
}

TEST_CASE("angular cutoffs: partition, homogeneity, overlap") {
  for (int k = 3; k <= 6; ++k) {
    const SectorFamily family(sweep_grid(k), k);
    const int m = family.size();
    for (int a = 0; a < 2048; ++a) {
      const double angle = kTwoPi * a / 2048.0;
      double total = 0.0;
      int nonzero = 0;
      for (int j = 0; j < m; ++j) {
        const double v = family.cutoff(j, angle);
        total += v;
        nonzero += v > 0.0;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(nonzero <= 2);
    }
    for (int j = 0; j < m; ++j) CHECK(family.cutoff(j, family.direction_angle(j)) == doctest::Approx(1.0));
  }

  const SectorFamily family(sweep_grid(4), 4);
  Gen gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const double kx = gen.uniform(-30.0, 30.0), ky = gen.uniform(-30.0, 30.0);
    const double lambda = gen.uniform(0.1, 10.0);
    const int j = gen.integer(0, family.size() - 1);
    CHECK(family.cutoff(j, lambda * kx, lambda * ky) == doctest::Approx(family.cutoff(j, kx, ky)).epsilon(1e-12));
  }
  CHECK(family.cutoff(3, 0.0, 0.0) == doctest::Approx(1.0 / family.size()));
}

TEST_CASE("direction lookup") {
  const SectorFamily family(sweep_grid(3), 3);
  CHECK(family.index_of(family.direction(5)) == 5);
  CHECK_THROWS_AS(family.index_of({1.0 / std::sqrt(2.0), 0.5}), UsageError);
  CHECK_THROWS_AS(family.direction_angle(family.size()), UsageError);
}

TEST_CASE("coarse grids refuse fine sector families") {
  const GridSpec g = create_grid(64, 2.0);
  CHECK(min_points_per_arc(g, 3) < 16);
  CHECK_THROWS_AS(SectorFamily(g, 3), ConfigError);
  try {
    SectorFamily bad(g, 3);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("requires L") != std::string::npos);
  }
}

TEST_CASE("sector projection of a plane wave") {
  const GridSpec g = create_grid(256, 4.0 * kPi);
  const DyadicFamily dyadic(g, 4);
  const SectorFamily family(g, 3);
  // xi = (8, 0): psi_3(8) = 1 and the wave sits on direction 0.
  const Field wave = testing::plane_wave(g, 16, 0);
  REQUIRE(g.frequency_step() * 16 == doctest::Approx(8.0));
  REQUIRE(dyadic_cutoff(3, 8.0) == doctest::Approx(1.0));
  CHECK(testing::max_abs_difference(to_physical(sector_project(wave, family, 0, dyadic)), wave) < 1e-12);
  CHECK(lebesgue_norm(sector_project(wave, family, 1, dyadic), 2.0) < 1e-12);
  CHECK(lebesgue_norm(sector_project(wave, family, family.size() - 1, dyadic), 2.0) < 1e-12);
}

TEST_CASE("property: sectors reconstruct the dyadic piece") {
  for (int k = 3; k <= 4; ++k) {
    const GridSpec g = sweep_grid(k);
    const DyadicFamily dyadic(g, k);
    const SectorFamily family(g, k);
    for (int trial = 0; trial < 3; ++trial) {
      Gen gen(300 + 10 * k + trial);
      const Field f = gen.band_limited(g, std::ldexp(1.0, k + 1));
      Field sum = Field::zeros(g, Representation::spectral);
      for (int j = 0; j < family.size(); ++j) sum = sum + sector_project(f, family, j, dyadic);
      const Field piece = apply_real_table(f, dyadic.table(k));
      CHECK(testing::relative_error(sum, piece) < 1e-12);
    }
  }
}

TEST_CASE("plan coverage and leakage") {
  const GridSpec g = sweep_grid(3);
  const DecompositionPlan plan(g, 2, 3);
  Gen gen(40);
  const Field inside = gen.annulus(g, 3);
  CHECK(plan.uncovered_fraction(inside) <= 1e-20);
  CHECK_NOTHROW(plan.validate_coverage(inside));
  const Field wide = gen.band_limited(g, 30.0);
  CHECK(plan.uncovered_fraction(wide) > 1e-3);
  CHECK_THROWS_AS(plan.validate_coverage(wide), ValidationError);
  CHECK(leakage_fraction(wide, plan.dyadic()) > 1e-3);
  CHECK(leakage_fraction(inside, plan.dyadic()) == 0.0);
  CHECK(plan.entries(3, 0).index.size() == plan.entries(3, 0).weight.size());
  CHECK_THROWS(plan.sectors(5));
}

TEST_CASE("wave packet symbols: support and reproduction") {
  const GridSpec g = sweep_grid(4);
  const WavePacketSymbols symbols(g, 4);
  CHECK(symbols.phi(1.0 / 16.0, 0.0) == 0.0);
  for (double r : {1.0, 4.0, 12.0}) {
    const double reach = WavePacketSymbols::angular_reach(r);
    CHECK(reach == doctest::Approx(2.0 * std::asin(0.5 * std::sqrt(2.0 / r))));
    CHECK(symbols.phi(r, 1.01 * reach) == 0.0);
    CHECK(symbols.phi(r, 0.0) > 0.0);
    CHECK(symbols.reproducing(r) > 0.0);
  }
  Gen gen(50);
  const ReproductionCheck check = symbols.reproduction(gen.annulus(g, 3));
  CHECK(check.relative_error < 1e-3);
  CHECK_FALSE(check.warned);
}

TEST_CASE("sector kernels stay bounded in L1 across scales") {
  auto kernel_l1 = [](int k) {
    const GridSpec g = create_grid(1024, 12.0);
    const DyadicFamily dyadic(g, k + 1);
    const SectorFamily family(g, k);
    const Field delta = Field::from_spectrum(g, [](double, double) { return Complex(1.0); });
    return lebesgue_norm(sector_project(delta, family, 0, dyadic), 1.0) / (g.spacing() * g.length);
  };
  const double a = kernel_l1(3);
  const double b = kernel_l1(5);
  CHECK(a > 0.0);
  CHECK(std::max(a / b, b / a) < 2.0);
}

TEST_CASE("rotating the lattice permutes sectors") {
  const GridSpec g = sweep_grid(5);
  const SectorFamily family(g, 5);
  REQUIRE(family.size() == 36);
  Gen gen(60);
  for (int trial = 0; trial < 100; ++trial) {
    const double kx = gen.uniform(-40.0, 40.0), ky = gen.uniform(-40.0, 40.0);
    const int j = gen.integer(0, 35);
    CHECK(family.cutoff((j + 9) % 36, -ky, kx) == doctest::Approx(family.cutoff(j, kx, ky)).epsilon(1e-12));
  }
}
