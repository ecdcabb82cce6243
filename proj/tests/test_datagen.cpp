#include <doctest.h>

#include <cmath>
#include <set>

#include "generators.hpp"
#include "halfwave/datagen.hpp"
#include "halfwave/decomposition.hpp"
#include "halfwave/errors.hpp"
#include "halfwave/experiments.hpp"
#include "halfwave/norms.hpp"
#include "halfwave/propagator.hpp"
#include "halfwave/rng.hpp"

using namespace halfwave;

namespace {

double spectral_mass_where(const Field& f, bool (*keep)(double radius, double angle)) {
  const Field spectral = to_spectral(f);
  const auto lat = lattice(f.spec());
  double inside = 0.0, total = 0.0;
  for (std::size_t i = 0; i < f.spec().size(); ++i) {
    const double m = std::norm(spectral.values()[i]);
    total += m;
    if (keep(lat->radius[i], lat->angle[i])) inside += m;
  }
  return inside / total;
}

}  // namespace

TEST_CASE("ensemble kind names roundtrip") {
  for (auto kind : {EnsembleKind::radial_knapp, EnsembleKind::sector_bump, EnsembleKind::random_annulus,
                    EnsembleKind::gaussian}) {
    CHECK(ensemble_kind_from(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(ensemble_kind_from("brownian"), ConfigError);
}

TEST_CASE("Knapp datum: spectral support and radial symmetry") {
  const GridSpec g = create_grid(256, 64.0);
  const Field f = knapp_radial(g);
  CHECK(f.representation() == Representation::spectral);
  CHECK(spectral_mass_where(f, [](double r, double) { return r >= 0.5 && r <= 1.0; }) == 1.0);
  REQUIRE(f.support_radius().has_value());
  CHECK(mass_outside(f, *f.support_radius()) <= 0.01);

  // Symmetric under x -> -x, x <-> y.
  const Field p = to_physical(f);
  const int n = g.n;
  auto at = [&](int ix, int iy) { return p.values()[static_cast<std::size_t>(wrap_index(iy, n)) * n + wrap_index(ix, n)]; };
  double worst = 0.0;
  for (int ix = -20; ix <= 20; ++ix) {
    for (int iy = -20; iy <= 20; ++iy) {
      worst = std::max(worst, std::abs(at(ix, iy) - at(-ix, iy)));
      worst = std::max(worst, std::abs(at(ix, iy) - at(iy, ix)));
    }
  }
  CHECK(worst < 1e-12 * std::abs(at(0, 0)));
  CHECK(knapp_profile(0.75) == doctest::Approx(1.0));
  CHECK(knapp_profile(0.4) == 0.0);
}

TEST_CASE("evolved Knapp datum concentrates near the light cone") {
  const GridSpec g = create_grid(512, 128.0);
  const Field f = knapp_radial(g);
  for (double t : {16.0, 32.0}) CHECK(shell_fraction(to_physical(evolve(f, t)), t, 6.0) >= 0.3);
}

TEST_CASE("sector bumps: support, normalization, few sectors") {
  const GridSpec g = sweep_grid(4);
  const SectorFamily family(g, 4);
  for (int j : {0, 7, 25}) {
    const Field f = sector_bump(g, 4, j);
    CHECK(lebesgue_norm(f, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    const Field spectral = to_spectral(f);
    const auto lat = lattice(g);
    int loaded = 0;
    for (int m = 0; m < family.size(); ++m) {
      double mass = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double v = std::norm(spectral.values()[i]);
        if (v == 0.0) continue;
        CHECK(lat->radius[i] >= 8.0);
        CHECK(lat->radius[i] <= 16.0);
        mass += v * family.cutoff(m, lat->angle[i]);
      }
      loaded += mass > 0.0;
    }
    CHECK(loaded <= 5);
  }
  CHECK_THROWS_AS(sector_bump(create_grid(64, 2.0), 4, 0), ConfigError);
  CHECK_THROWS_AS(sector_bump(g, 4, family.size()), UsageError);
}

TEST_CASE("random ensembles: determinism, normalization, band limitation") {
  const GridSpec g = sweep_grid(3);
  EnsembleSpec es;
  es.k = 3;
  es.count = 4;
  es.seed = 77;
  const auto a = random_ensemble(g, es);
  const auto b = random_ensemble(g, es);
  REQUIRE(a.size() == 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(testing::max_abs_difference(a[i], b[i]) == 0.0);
    CHECK(lebesgue_norm(a[i], 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(spectral_mass_where(a[i], [](double r, double) { return r >= 4.0 && r <= 8.0; }) == 1.0);
  }
  // Sample i does not depend on the samples before it.
  CHECK(testing::max_abs_difference(ensemble_sample(g, es, 2), a[2]) == 0.0);
  CHECK(testing::max_abs_difference(a[0], a[1]) > 1e-3);

  es.seed = 78;
  CHECK(testing::max_abs_difference(random_ensemble(g, es)[0], a[0]) > 1e-3);

  es.envelope_width = 1.5;
  const Field enveloped = ensemble_sample(g, es, 0);
  CHECK(enveloped.support_radius().has_value());
  CHECK(spectral_mass_where(enveloped, [](double r, double) { return r >= 4.0 && r <= 8.0; }) == 1.0);
  es.envelope_width = -1.0;
  CHECK_THROWS_AS(ensemble_sample(g, es, 0), ConfigError);

  es.count = 0;
  CHECK_THROWS_AS(random_ensemble(g, es), ConfigError);
}

TEST_CASE("Gaussian data") {
  const GridSpec g = create_grid(128, 32.0);
  const Field f = gaussian(g, {1.0, -2.0}, 0.8);
  CHECK(std::abs(to_physical(f).values()[0]) == doctest::Approx(std::exp(-5.0 / (2.0 * 0.64))));
  REQUIRE(f.support_radius().has_value());
  CHECK(mass_outside(f, *f.support_radius()) < 1e-8);
  CHECK_THROWS_AS(gaussian(g, {0.0, 0.0}, 0.0), ConfigError);

  EnsembleSpec es;
  es.kind = EnsembleKind::gaussian;
  es.width = 2.0;
  CHECK(lebesgue_norm(ensemble_sample(g, es, 0), 2.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ensemble metadata") {
  EnsembleSpec es;
  es.kind = EnsembleKind::sector_bump;
  es.k = 5;
  es.seed = 9;
  es.direction = 3;
  const Json j = es.metadata();
  CHECK(j["kind"] == "sector_bump");
  CHECK(j["direction"] == 3);
  CHECK(j["generator"] == CounterRng::identity());
}

TEST_CASE("counter RNG") {
  CounterRng a(5, 0), b(5, 0), c(5, 1), d(6, 0);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    seen.insert(x);
  }
  CHECK(seen.size() == 100);
  CHECK(c.next_u64() != CounterRng(5, 0).next_u64());
  CHECK(d.next_u64() != CounterRng(5, 0).next_u64());

  CounterRng rng(123, 4);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK_FALSE((u < 0.0 || u >= 1.0));
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
  sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum2 += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sum2 / n - 1.0) < 0.02);
  double c2 = 0.0;
  for (int i = 0; i < n; ++i) c2 += std::norm(rng.complex_normal());
  CHECK(std::abs(c2 / n - 1.0) < 0.02);
}
