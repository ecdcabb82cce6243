#include <doctest.h>

#include <cmath>
#include <sstream>

#include "generators.hpp"
#include "halfwave/datagen.hpp"
#include "halfwave/decomposition.hpp"
#include "halfwave/errors.hpp"
#include "halfwave/field_io.hpp"
#include "halfwave/norms.hpp"
#include "halfwave/numerics.hpp"

using namespace halfwave;
using halfwave::testing::Gen;

TEST_CASE("grid geometry") {
  const GridSpec g = create_grid(256, kTwoPi);
  CHECK(g.spacing() == doctest::Approx(kTwoPi / 256));
  CHECK(g.frequency_step() == doctest::Approx(1.0));
  const auto lat = lattice(g);
  CHECK(lat->axis.front() == 0.0);
  CHECK(lat->axis[127] == doctest::Approx(127.0));
  CHECK(lat->axis[128] == doctest::Approx(-128.0));

  CHECK_THROWS_AS(create_grid(100, 1.0), ConfigError);
  CHECK_THROWS_AS(create_grid(16, 1.0), ConfigError);
  CHECK_THROWS_AS(create_grid(64, 0.0), ConfigError);
}

TEST_CASE("Nyquist bound limits the dyadic family") {
  const GridSpec g = create_grid(512, 128.0);
  CHECK(g.nyquist() == doctest::Approx(kPi * 4.0));
  CHECK_NOTHROW(DyadicFamily(g, 2));
  CHECK_THROWS_AS(DyadicFamily(g, 4), ConfigError);
}

TEST_CASE("plane wave has a single spectral coefficient") {
  const GridSpec g = create_grid(64, 10.0);
  const Field f = to_spectral(testing::plane_wave(g, 3, -5));
  const std::size_t target = static_cast<std::size_t>(wrap_index(-5, 64)) * 64 + 3;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i == target) {
      CHECK(std::abs(f.values()[i]) == doctest::Approx(64.0));
    } else {
      CHECK(std::abs(f.values()[i]) < 1e-10);
    }
  }
}

TEST_CASE("Gaussian: closed-form L2 norm and Plancherel") {
  const GridSpec g = create_grid(256, 64.0);
  const Field f = gaussian(g, {0.0, 0.0}, 1.0);
  CHECK(lebesgue_norm(f, 2.0) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-8));

  const Field fhat = to_spectral(f);
  CompensatedSum physical, spectral;
  for (std::size_t i = 0; i < g.size(); ++i) {
    physical.add(std::norm(f.values()[i]));
    spectral.add(std::norm(fhat.values()[i]));
  }
  CHECK(std::abs(physical.value() - spectral.value()) / physical.value() < 1e-10);
  CHECK(lebesgue_norm(fhat, 2.0) == doctest::Approx(lebesgue_norm(f, 2.0)).epsilon(1e-12));
}

TEST_CASE("Lebesgue norms of elementary fields") {
  const GridSpec g = create_grid(64, kTwoPi);
  const Complex c(0.6, -0.8);
  const Field constant = Field::sample(g, [&](double, double) { return 2.0 * c; });
  CHECK(lebesgue_norm(constant, 2.0) == doctest::Approx(2.0 * kTwoPi));
  CHECK(lebesgue_norm(constant, 1.0) == doctest::Approx(2.0 * kTwoPi * kTwoPi));
  CHECK(lebesgue_norm(testing::plane_wave(g, 2, 7), kInfinity) == doctest::Approx(1.0));
  CHECK(lebesgue_norm(Field::zeros(g, Representation::spectral), 4.0) == 0.0);
}

TEST_CASE("multipliers on eigenfunctions") {
  const GridSpec g = create_grid(64, 8.0);
  const Field wave = testing::plane_wave(g, 4, 3);
  const double r = g.frequency_step() * 5.0;
  const double t = 1.7;

  CHECK(testing::max_abs_difference(apply_multiplier(wave, [](double, double) { return Complex(1.0); }), wave) < 1e-12);
  const Field moved = apply_multiplier(wave, [t](double kx, double ky) { return std::polar(1.0, t * std::hypot(kx, ky)); });
  CHECK(testing::max_abs_difference(moved, std::polar(1.0, t * r) * wave) < 1e-12);

  Gen gen(1);
  const Field f = gen.noise(g);
  auto bracket = [](double kx, double ky) { return Complex(std::sqrt(1.0 + kx * kx + ky * ky)); };
  const Field twice = apply_multiplier(apply_multiplier(f, bracket), bracket);
  const Field once = apply_multiplier(f, [](double kx, double ky) { return Complex(1.0 + kx * kx + ky * ky); });
  CHECK(testing::max_abs_difference(twice, once) / lebesgue_norm(once, kInfinity) < 1e-12);
}

TEST_CASE("property: transform roundtrip over 100 seeds") {
  const GridSpec g = create_grid(128, 20.0);
  double worst = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    Gen gen(static_cast<std::uint64_t>(seed));
    const Field f = gen.noise(g);
    const Field back = transform(transform(f, Direction::forward), Direction::inverse);
    worst = std::max(worst, testing::max_abs_difference(back, f));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("property: multipliers are linear and commute") {
  const GridSpec g = create_grid(64, 12.0);
  for (int trial = 0; trial < 20; ++trial) {
    Gen gen(100 + trial);
    const Field f = gen.noise(g);
    const Field h = gen.noise(g);
    const Complex a = gen.complex(), b = gen.complex();
    const double t = gen.uniform(-5.0, 5.0);
    const double s = gen.uniform(-2.0, 2.0);
    auto m1 = [t](double kx, double ky) { return std::polar(1.0, t * std::hypot(kx, ky)); };
    auto m2 = [s](double kx, double ky) { return Complex(std::pow(1.0 + kx * kx + ky * ky, 0.5 * s), kx); };

    const Field lhs = apply_multiplier(a * f + b * h, m1);
    const Field rhs = a * apply_multiplier(f, m1) + b * apply_multiplier(h, m1);
    CHECK(testing::max_abs_difference(lhs, rhs) / lebesgue_norm(rhs, kInfinity) < 1e-12);

    const Field ab = apply_multiplier(apply_multiplier(f, m1), m2);
    const Field ba = apply_multiplier(apply_multiplier(f, m2), m1);
    CHECK(testing::max_abs_difference(ab, ba) / lebesgue_norm(ab, kInfinity) < 1e-12);
  }
}

TEST_CASE("property: Plancherel on random fields") {
  const GridSpec g = create_grid(64, 9.0);
  for (int trial = 0; trial < 20; ++trial) {
    Gen gen(200 + trial);
    const Field f = gen.noise(g);
    const double direct = lebesgue_norm(f, 2.0);
    const Field fhat = to_spectral(f);
    CompensatedSum acc;
    for (const Complex& z : fhat.values()) acc.add(std::norm(z));
    CHECK(std::abs(direct * direct - g.cell_area() * acc.value()) / (direct * direct) < 1e-10);
  }
}

TEST_CASE("inner product and representation independence") {
  const GridSpec g = create_grid(64, 9.0);
  Gen gen(7);
  const Field a = gen.noise(g);
  const Field b = gen.noise(g);
  const Complex direct = inner_product(a, b);
  const Complex spectral = inner_product(to_spectral(a), to_spectral(b));
  CHECK(std::abs(direct - spectral) / std::abs(direct) < 1e-10);
  CHECK(inner_product(a, a).real() == doctest::Approx(std::pow(lebesgue_norm(a, 2.0), 2)).epsilon(1e-12));
}

TEST_CASE("wraparound validation uses the support radius") {
  const GridSpec g = create_grid(64, 40.0);
  const Field f = gaussian(g, {0.0, 0.0}, 1.0).with_support_radius(6.0);
  CHECK_NOTHROW(validate_wraparound(f, 14.0));
  CHECK_THROWS_AS(validate_wraparound(f, 14.5), ValidationError);
  CHECK_NOTHROW(validate_wraparound(f.with_support_radius(std::nullopt), 1e3));
}

TEST_CASE("mass radius and mass outside agree") {
  const GridSpec g = create_grid(128, 32.0);
  const Field f = gaussian(g, {0.0, 0.0}, 1.5);
  const double r = mass_radius(f, 1e-6);
  CHECK(mass_outside(f, r) <= 1e-6);
  CHECK(mass_outside(f, 0.9 * r) > 1e-6);
}

TEST_CASE("binary field container roundtrip") {
  const GridSpec g = create_grid(32, 5.0);
  Gen gen(9);
  const Field f = to_spectral(gen.noise(g));
  std::stringstream buffer;
  write_field_binary(buffer, f);
  CHECK(buffer.str().substr(0, 4) == "HWF1");
  const Field back = read_field_binary(buffer);
  CHECK(back.spec() == f.spec());
  CHECK(back.representation() == Representation::spectral);
  CHECK(testing::max_abs_difference(back, f) / lebesgue_norm(f, kInfinity) < 1e-6);

  std::stringstream bad("HWF0garbage");
  CHECK_THROWS(read_field_binary(bad));
}
