#include <doctest.h>

#include <cmath>
#include <vector>

#include "generators.hpp"
#include "halfwave/datagen.hpp"
#include "halfwave/errors.hpp"
#include "halfwave/nlw.hpp"
#include "halfwave/norms.hpp"
#include "halfwave/propagator.hpp"

using namespace halfwave;

namespace {

const GridSpec kGrid = create_grid(64, 16.0);

Field bump(double amplitude) { return Complex(amplitude) * gaussian(kGrid, {0.0, 0.0}, 1.0).with_support_radius(std::nullopt); }

Field zeros() { return Field::zeros(kGrid, Representation::physical); }

SolverConfig config(double dt, double final_time, int sign = -1) {
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.final_time = final_time;
  cfg.sign = sign;
  return cfg;
}

// Every grid time, for Picard comparisons.
TimeSeries solution_series(const Field& f, const Field& g, SolverConfig cfg) {
  cfg.sample_times.clear();
  for (int j = 0; j <= cfg.steps(); ++j) cfg.sample_times.push_back(j * cfg.dt);
  const Trajectory traj = solve(f, g, cfg);
  TimeSeries series;
  for (const auto& s : traj.states) {
    series.times.push_back(s.t);
    series.values.push_back(s.u);
  }
  return series;
}

double endpoint_error(const Field& f, const Field& g, double dt, const Field& reference, int sign) {
  const Trajectory traj = solve(f, g, config(dt, 1.0, sign));
  return testing::relative_error(traj.states.back().u, reference);
}

}  // namespace

TEST_CASE("solver configuration validation") {
  CHECK_NOTHROW(config(1.0 / 64, 1.0).validate());
  CHECK(config(1.0 / 64, 1.0).steps() == 64);
  CHECK_THROWS_AS(config(0.0, 1.0).validate(), ConfigError);
  CHECK_THROWS_AS(config(0.3, 1.0).validate(), ConfigError);
  CHECK_THROWS_AS(config(1.0 / 64, 1.0, 2).validate(), ConfigError);
  SolverConfig cfg = config(1.0 / 64, 1.0);
  cfg.alpha = 4;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.alpha = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.alpha = 5;
  CHECK_NOTHROW(cfg.validate());
  cfg.sample_times = {0.5, 0.25};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.sample_times = {0.3};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.sample_times = {0.25, 0.5};
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.to_json()["alpha"] == 5);
}

TEST_CASE("dealiasing cutoffs") {
  CHECK(dealias_cutoff(64, 3) == 21);
  CHECK(dealias_cutoff(64, 5) == 16);
  CHECK(dealias_cutoff(256, 7) == 64);
  CHECK(dealias_excess(bump(1.0), 3) < 1e-20);
  CHECK(dealias_excess(testing::exact_mode(kGrid, 30, 0), 3) == doctest::Approx(1.0));
  CHECK(dealias_excess(testing::exact_mode(kGrid, 18, 18), 5) == doctest::Approx(1.0));
  CHECK(dealias_excess(testing::exact_mode(kGrid, 18, 18), 3) == 0.0);
}

TEST_CASE("conserved quantities: closed forms") {
  const double area = kGrid.length * kGrid.length;
  const Field constant = Field::sample(kGrid, [](double, double) { return Complex(0.0, 2.0); });
  const ConservedQuantities c = conserved_quantities({constant, zeros(), 0.0}, 3, -1);
  CHECK(c.mass == doctest::Approx(4.0 * area));
  CHECK(c.energy == doctest::Approx(16.0 / 4.0 * area));
  CHECK(conserved_quantities({constant, zeros(), 0.0}, 5, 1).energy == doctest::Approx(-64.0 / 6.0 * area));

  // u = A e^{i xi x}, u_t = i r u with r = |xi|.
  const double a = 0.7;
  const double r = std::hypot(3.0, 4.0) * kGrid.frequency_step();
  const Field u = testing::plane_wave(kGrid, 3, 4, a);
  const Field ut = Complex(0.0, r) * u;
  const ConservedQuantities q = conserved_quantities({u, ut, 0.0}, 3, -1);
  CHECK(q.mass == doctest::Approx(a * a * area));
  CHECK(q.charge == doctest::Approx(r * a * a * area));
  CHECK(q.energy == doctest::Approx((r * r * a * a + std::pow(a, 4) / 4.0) * area));
}

TEST_CASE("zero data stays zero and Q is identically one") {
  const Trajectory traj = solve(zeros(), zeros(), config(1.0 / 32, 1.0));
  REQUIRE(traj.records.size() == 33);
  for (const auto& rec : traj.records) {
    CHECK(rec.q == 1.0);
    CHECK(rec.difference_norm == 0.0);
  }
  CHECK(lebesgue_norm(traj.states.back().u, kInfinity) == 0.0);
  const GronwallReport report = gronwall_monitor(traj.records);
  CHECK(report.certified);
  CHECK(report.c_hat == 0.0);
  CHECK_FALSE(report.divergence_time.has_value());
}

TEST_CASE("without the nonlinearity the solver is the exact linear flow") {
  const Field f = bump(1.0);
  const Field g = Complex(0.3) * bump(1.0);
  const Trajectory traj = solve(f, g, config(1.0 / 16, 1.0, 0));
  CHECK(testing::relative_error(traj.states.back().u, wave_pair(f, g, 1.0)) < 1e-12);
  CHECK(testing::relative_error(traj.states.back().ut, wave_pair_velocity(f, g, 1.0)) < 1e-12);
  CHECK(testing::relative_error(free_wave(f, g, 1.0).u, wave_pair(f, g, 1.0)) < 1e-13);
}

TEST_CASE("small data follow the linear flow to third order") {
  const double eps = 1e-3;
  const Field f = bump(eps);
  const Trajectory traj = solve(f, zeros(), config(1.0 / 32, 1.0));
  const double deviation = testing::relative_error(traj.states.back().u, wave_pair(f, zeros(), 1.0));
  CHECK(deviation > 0.0);
  CHECK(deviation < 10.0 * eps * eps);
}

TEST_CASE("fourth-order convergence in time") {
  const Field f = bump(1.0);
  const Field g = Complex(0.5) * bump(1.0);
  for (int sign : {-1, 1}) {
    const Field reference = solve(f, g, config(1.0 / 256, 1.0, sign)).states.back().u;
    const double coarse = endpoint_error(f, g, 1.0 / 8, reference, sign);
    const double fine = endpoint_error(f, g, 1.0 / 16, reference, sign);
    const double order = std::log2(coarse / fine);
    CHECK(order > 3.5);
    CHECK(order < 4.5);
  }
}

TEST_CASE("energy is conserved and the sign matters") {
  const Field f = bump(1.5);
  const Trajectory defocusing = solve(f, zeros(), config(1.0 / 64, 1.0, -1));
  const Trajectory focusing = solve(f, zeros(), config(1.0 / 64, 1.0, 1));
  CHECK(defocusing.energy_drift() < 1e-8);
  CHECK(focusing.energy_drift() < 1e-8);
  CHECK(testing::relative_error(defocusing.states.back().u, focusing.states.back().u) > 1e-2);
  CHECK(defocusing.strichartz_4_6 > 0.0);
  CHECK(defocusing.strichartz_24_7_4 > 0.0);
  const Json summary = defocusing.summary();
  CHECK(summary.contains("energy_drift"));
  CHECK(defocusing.records_csv().find('\n') != std::string::npos);
}

TEST_CASE("time reversal") {
  const Field f = bump(1.0);
  const Field g = Complex(0.4) * bump(1.0);
  const SolverConfig cfg = config(1.0 / 128, 1.0);
  const WaveState end = solve(f, g, cfg).states.back();
  const WaveState back = solve(end.u, Complex(-1.0) * end.ut, cfg).states.back();
  CHECK(testing::relative_error(back.u, f) < 1e-8);
  CHECK(testing::relative_error(Complex(-1.0) * back.ut, g) < 1e-8);
}

TEST_CASE("data above the dealiasing cutoff are projected away") {
  const Field high = testing::exact_mode(kGrid, 30, 0);
  const Trajectory traj = solve(high, zeros(), config(1.0 / 32, 0.5));
  CHECK_FALSE(traj.warnings.empty());
  CHECK(traj.records.front().quantities.mass == 0.0);
  CHECK(lebesgue_norm(traj.states.back().u, 2.0) == 0.0);
}

TEST_CASE("stored sample times") {
  SolverConfig cfg = config(1.0 / 32, 1.0);
  cfg.sample_times = {0.0, 0.5, 1.0};
  const Trajectory traj = solve(bump(1.0), zeros(), cfg);
  REQUIRE(traj.states.size() == 3);
  CHECK(traj.states[1].t == doctest::Approx(0.5));
}

TEST_CASE("Picard iterates: parity, homogeneity, convergence") {
  const SolverConfig cfg = config(1.0 / 64, 1.0);
  const Field f = bump(0.5);
  const Field g = zeros();
  const auto iterates = picard_iterates(f, g, cfg, 7);
  REQUIRE(iterates.size() == 7);
  for (int m : {2, 4, 6}) {
    for (const auto& value : iterates[m - 1].values) CHECK(lebesgue_norm(value, 2.0) == 0.0);
  }

  const auto halved = picard_iterates(Complex(0.5) * f, g, cfg, 5);
  for (int m : {1, 3, 5}) {
    const Field& full = iterates[m - 1].values.back();
    const Field& half = halved[m - 1].values.back();
    CHECK(testing::relative_error(half, Complex(std::pow(0.5, m)) * full) < 1e-12);
  }

  const TimeSeries u = solution_series(f, g, cfg);
  double previous = picard_residual(u, iterates, 1);
  for (int order : {3, 5, 7}) {
    const double residual = picard_residual(u, iterates, order);
    CHECK(residual < 0.5 * previous);
    previous = residual;
  }
  CHECK_THROWS_AS(picard_residual(u, iterates, 8), UsageError);
  CHECK_THROWS_AS(picard_iterates(f, g, cfg, 10), ConfigError);

  SolverConfig quintic = cfg;
  quintic.alpha = 5;
  CHECK_THROWS_AS(picard_iterates(f, g, quintic, 3), ConfigError);
  SolverConfig tight = cfg;
  tight.memory_budget = 1024;
  CHECK_THROWS_AS(picard_iterates(f, g, tight, 3), ConfigError);
}

TEST_CASE("remainder series") {
  const SolverConfig cfg = config(1.0 / 64, 1.0);
  const Field f = bump(0.5);
  const Field g = Complex(0.2) * bump(1.0);

  const RemainderSeries one = remainder_series(f, g, cfg, 1);
  const TimeSeries u = solution_series(f, g, cfg);
  REQUIRE(one.v.values.size() == u.values.size());
  for (std::size_t j = 0; j < u.values.size(); j += 16) {
    const Field expected = u.values[j] - free_wave(f, g, u.times[j]).u;
    CHECK(testing::max_abs_difference(to_physical(one.v.values[j]), to_physical(expected)) <
          1e-12 * std::max(1.0, lebesgue_norm(expected, kInfinity)));
  }

  const RemainderSeries three = remainder_series(f, g, cfg, 3);
  const auto iterates = picard_iterates(f, g, cfg, 3);
  CHECK(testing::relative_error(three.terms[1].values.back(), iterates[2].values.back()) < 1e-10);

  const RemainderSeries two = remainder_series(f, g, cfg, 2);
  CHECK(two.v_linf_l2 < one.v_linf_l2);
  CHECK(three.v_linf_l2 < two.v_linf_l2);
  CHECK(three.v_l4_linf > 0.0);
}

TEST_CASE("Gronwall monitor certifies a defocusing run") {
  const Trajectory traj = solve(bump(1.0), zeros(), config(1.0 / 64, 2.0));
  const GronwallReport report = gronwall_monitor(traj.records);
  CHECK(report.certified);
  CHECK(report.c_hat >= 0.0);
  CHECK(report.times.size() == traj.records.size());
  CHECK(report.to_json()["certified"] == true);
}

TEST_CASE("focusing blow-up is detected") {
  const Trajectory traj = solve(bump(6.0), zeros(), config(1.0 / 256, 2.0, 1));
  CHECK(traj.blew_up);
  CHECK(traj.blowup_time > 0.0);
  CHECK(traj.blowup_time < 2.0);
  CHECK_FALSE(traj.message.empty());
  // The bound uses the observed rate, so the run is still certified; the rate itself explodes.
  const GronwallReport report = gronwall_monitor(traj.records);
  const GronwallReport calm = gronwall_monitor(solve(bump(1.0), zeros(), config(1.0 / 256, 1.0, 1)).records);
  CHECK(report.c_hat > 10.0 * calm.c_hat);
  CHECK_THROWS_AS(remainder_series(bump(6.0), zeros(), config(1.0 / 256, 2.0, 1), 1), NumericError);
}
