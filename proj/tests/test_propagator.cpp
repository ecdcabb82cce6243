#include <doctest.h>

#include <cmath>
#include <vector>

#include "generators.hpp"
#include "halfwave/datagen.hpp"
#include "halfwave/errors.hpp"
#include "halfwave/norms.hpp"
#include "halfwave/propagator.hpp"

using namespace halfwave;
using halfwave::testing::Gen;

namespace {

// |xi| = 5 with xi = (3, 4) on L = 2 pi.
const GridSpec kGrid = create_grid(64, kTwoPi);

}  // namespace

TEST_CASE("evolution at t = 0 is the identity") {
  Gen gen(1);
  const Field f = gen.noise(kGrid);
  CHECK(testing::max_abs_difference(evolve(f, 0.0), f) < 1e-13);
}

TEST_CASE("plane waves are eigenfunctions") {
  const Field wave = testing::plane_wave(kGrid, 3, 4);
  for (double t : {0.3, -1.7, 12.0}) {
    CHECK(testing::max_abs_difference(evolve(wave, t), std::polar(1.0, 5.0 * t) * wave) < 1e-12);
  }
}

TEST_CASE("property: group law and unitarity") {
  for (int trial = 0; trial < 20; ++trial) {
    Gen gen(10 + trial);
    const Field f = gen.noise(kGrid);
    const double s = gen.uniform(-20.0, 20.0);
    const double t = gen.uniform(-20.0, 20.0);
    const Field lhs = evolve(evolve(f, s), t);
    const Field rhs = evolve(f, s + t);
    CHECK(testing::relative_error(lhs, rhs) < 1e-12);
    CHECK(lebesgue_norm(rhs, 2.0) == doctest::Approx(lebesgue_norm(f, 2.0)).epsilon(1e-12));
    CHECK(testing::relative_error(evolve(evolve(f, t), -t), f) < 1e-12);
  }
}

TEST_CASE("evolution keeps the representation") {
  Gen gen(2);
  const Field f = to_spectral(gen.noise(kGrid));
  CHECK(evolve(f, 1.0).representation() == Representation::spectral);
  CHECK(evolve(to_physical(f), 1.0).representation() == Representation::physical);
}

TEST_CASE("custom homogeneous phases") {
  const PhaseSpec taxicab = PhaseSpec::custom([](double kx, double ky) { return std::abs(kx) + std::abs(ky); }, 0.0,
                                              "taxicab");
  CHECK_FALSE(taxicab.is_halfwave());
  CHECK(homogeneity_defect(taxicab, kGrid) < 1e-12);
  CHECK_NOTHROW(verify_homogeneity(taxicab, kGrid));
  const Field wave = testing::plane_wave(kGrid, 3, -4);
  CHECK(testing::max_abs_difference(evolve(wave, 0.5, taxicab), std::polar(1.0, 3.5) * wave) < 1e-12);

  const PhaseSpec quadratic = PhaseSpec::custom([](double kx, double ky) { return kx * kx + ky * ky; }, 0.0, "schroedinger");
  CHECK(homogeneity_defect(quadratic, kGrid) > 0.5);
  CHECK_THROWS_AS(verify_homogeneity(quadratic, kGrid), ConfigError);
  CHECK(homogeneity_defect(PhaseSpec::halfwave(), kGrid) < 1e-14);
}

TEST_CASE("wave pair on single modes") {
  const Field wave = testing::plane_wave(kGrid, 3, 4);
  const Field zero = Field::zeros(kGrid, Representation::physical);
  const double t = 0.9;
  CHECK(testing::max_abs_difference(wave_pair(wave, zero, t), Complex(std::cos(5.0 * t)) * wave) < 1e-12);
  CHECK(testing::max_abs_difference(wave_pair(zero, wave, t), Complex(std::sin(5.0 * t) / 5.0) * wave) < 1e-12);
  const Field constant = Field::sample(kGrid, [](double, double) { return Complex(2.0, -1.0); });
  CHECK(testing::max_abs_difference(wave_pair(zero, constant, t), Complex(t) * constant) < 1e-12);
  CHECK(testing::max_abs_difference(wave_pair_velocity(wave, zero, t), Complex(-5.0 * std::sin(5.0 * t)) * wave) <
        1e-12);
}

TEST_CASE("velocity matches a centred difference") {
  Gen gen(3);
  const Field f = gen.band_limited(kGrid, 8.0);
  const Field g = gen.band_limited(kGrid, 8.0);
  const double t = 1.3, h = 1e-4;
  const Field difference = Complex(0.5 / h) * (wave_pair(f, g, t + h) - wave_pair(f, g, t - h));
  CHECK(testing::relative_error(difference, wave_pair_velocity(f, g, t)) < 1e-6);
}

TEST_CASE("Duhamel integral against closed forms") {
  const Field wave = testing::plane_wave(kGrid, 3, 4);
  const double r = 5.0, t = 1.1;
  for (int n : {65, 66}) {
    std::vector<Field> constant(n, wave);
    std::vector<Field> linear;
    for (int j = 0; j < n; ++j) linear.push_back(Complex(t * j / (n - 1)) * wave);

    const DuhamelResult c = duhamel(constant, t);
    const Complex expected_c = (1.0 - std::cos(t * r)) / (r * r);
    CHECK(testing::max_abs_difference(c.value, expected_c * wave) < 5e-8);

    const DuhamelResult l = duhamel(linear, t);
    const Complex expected_l = (t - std::sin(t * r) / r) / (r * r);
    CHECK(testing::max_abs_difference(l.value, expected_l * wave) < 5e-8);
    CHECK(l.halving_difference < 1e-4);
  }
  std::vector<Field> linear;
  for (int j = 0; j < 65; ++j) linear.push_back(Complex(t * j / 64.0) * wave);
  const DuhamelResult trap = duhamel(linear, t, DuhamelRule::trapezoid);
  CHECK(testing::max_abs_difference(trap.value, Complex((t - std::sin(t * r) / r) / (r * r)) * wave) < 1e-4);

  std::vector<Field> constant(9, Field::sample(kGrid, [](double, double) { return Complex(1.0); }));
  // sin((t - s)|xi|)/|xi| -> t - s at xi = 0.
  CHECK(std::abs(to_physical(duhamel(constant, t).value).values()[0] - 0.5 * t * t) < 1e-12);
  CHECK_THROWS(duhamel(std::vector<Field>{}, t));
}

TEST_CASE("wraparound is refused for localized data") {
  const GridSpec g = create_grid(128, 32.0);
  const Field f = gaussian(g, {0.0, 0.0}, 1.0);
  REQUIRE(f.support_radius().has_value());
  CHECK_NOTHROW(evolve(f, 4.0));
  CHECK_THROWS_AS(evolve(f, 16.0), ValidationError);
  CHECK_THROWS_AS(evolve(f, -16.0), ValidationError);
}

TEST_CASE("finite speed: annulus data stays inside the light cone") {
  const GridSpec g = create_grid(256, 64.0);
  EnsembleSpec es;
  es.k = 3;
  es.seed = 5;
  es.envelope_width = 1.0;
  const Field f = ensemble_sample(g, es, 0);
  REQUIRE(f.support_radius().has_value());
  const double radius = *f.support_radius();
  for (double t : {2.0, 8.0}) CHECK(mass_outside(evolve(f, t), radius + t) < 1e-6);
}
