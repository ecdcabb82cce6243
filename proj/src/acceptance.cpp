#include "halfwave/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "halfwave/datagen.hpp"
#include "halfwave/decomposition.hpp"
#include "halfwave/errors.hpp"
#include "halfwave/experiments.hpp"
#include "halfwave/nlw.hpp"
#include "halfwave/numerics.hpp"
#include "halfwave/propagator.hpp"
#include "halfwave/rng.hpp"

namespace halfwave {

namespace fs = std::filesystem;

namespace {

// Tolerances, one per checked quantity.
constexpr double kRoundtripTol = 1e-12;
constexpr double kPlancherelTol = 1e-10;
constexpr double kUnitarityTol = 1e-11;
constexpr double kContainmentTol = 1e-8;
constexpr double kPartitionTol = 1e-8;
constexpr double kReconstructionTol = 1e-8;
constexpr double kFitResidual = 0.05;  // RMS on the log scale, every fitted slope
constexpr double kKnappSlopeTol = 0.1;
constexpr double kKnappL2Tol = 0.02;
constexpr double kInvarianceMargin = 0.15;
constexpr double kEquivalenceBand = 10.0;
constexpr double kEquivalenceTrend = 0.1;
constexpr double kSmoothingSlope = 0.1;  // times ln 2, per unit k
constexpr double kDecouplingMargin = 0.1;
constexpr double kSingleSectorBand = 3.0;
constexpr double kEmbeddingBand = 10.0;
constexpr double kEnergyDriftTol = 1e-6;
constexpr double kOrderLo = 3.5;
constexpr double kOrderHi = 4.5;
constexpr double kEvenPicardTol = 1e-10;
constexpr double kHomogeneityTol = 1e-8;
constexpr double kPicardRatio = 0.5;

std::string brief(double x) {
  std::ostringstream out;
  out.precision(4);
  out << x;
  return out.str();
}

struct Context {
  fs::path dir;
  std::uint64_t seed = 0;
  int ensemble = 20;
};

class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void note(const std::string& what) { notes_.push_back(what); }
  CriterionResult finish(int id, std::string name) const {
    CriterionResult r;
    r.id = id;
    r.name = std::move(name);
    r.passed = failures_.empty();
    std::ostringstream out;
    const auto& parts = failures_.empty() ? notes_ : failures_;
    for (std::size_t i = 0; i < parts.size(); ++i) out << (i ? "; " : "") << parts[i];
    r.detail = out.str();
    return r;
  }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

Field random_field(const GridSpec& spec, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  ComplexVector values(spec.size());
  for (auto& v : values) v = rng.complex_normal();
  return Field(spec, Representation::physical, std::move(values));
}

double relative_l2(const Field& a, const Field& b) {
  const double denom = lebesgue_norm(b, 2.0);
  return lebesgue_norm(a - b, 2.0) / (denom > 0.0 ? denom : 1.0);
}

// ---- 1: spectral core ----
CriterionResult spectral_core(const Context& ctx) {
  Checks checks;
  const GridSpec spec = create_grid(512, 64.0);
  Json out;

  double roundtrip = 0.0, plancherel = 0.0;
  for (int s = 0; s < 100; ++s) {
    const Field f = random_field(spec, ctx.seed, static_cast<std::uint64_t>(s));
    const Field fhat = to_spectral(f);
    const Field back = to_physical(fhat);
    double err = 0.0, peak = 0.0;
    CompensatedSum mass_x, mass_k;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      err = std::max(err, std::abs(back.values()[i] - f.values()[i]));
      peak = std::max(peak, std::abs(f.values()[i]));
      mass_x.add(std::norm(f.values()[i]));
      mass_k.add(std::norm(fhat.values()[i]));
    }
    roundtrip = std::max(roundtrip, err / peak);
    plancherel = std::max(plancherel, std::abs(mass_x.value() - mass_k.value()) / mass_x.value());
  }
  out["roundtrip_max_relative"] = roundtrip;
  out["plancherel_max_relative"] = plancherel;
  checks.expect(roundtrip < kRoundtripTol, "roundtrip " + brief(roundtrip));
  checks.expect(plancherel < kPlancherelTol, "plancherel " + brief(plancherel));

  const Field f = to_spectral(random_field(spec, ctx.seed, 1000));
  const double norm0 = lebesgue_norm(f, 2.0);
  double unitarity = 0.0, group = 0.0;
  const double times[][2] = {{0.5, 1.25}, {3.0, -7.5}, {17.25, 2.0}};
  for (const auto& st : times) {
    const Field a = evolve(f, st[0]);
    unitarity = std::max(unitarity, std::abs(lebesgue_norm(a, 2.0) / norm0 - 1.0));
    group = std::max(group, relative_l2(evolve(a, st[1]), evolve(f, st[0] + st[1])));
  }
  out["unitarity_max"] = unitarity;
  out["group_law_max"] = group;
  checks.expect(unitarity < kUnitarityTol, "unitarity " + brief(unitarity));
  checks.expect(group < kUnitarityTol, "group law " + brief(group));

  // Annulus data: the half-wave group moves mass at unit speed when the spectrum avoids xi = 0.
  const GridSpec wide = create_grid(512, 128.0);
  EnsembleSpec es;
  es.k = 3;
  es.seed = ctx.seed;
  es.envelope_width = 1.0;
  const Field data = ensemble_sample(wide, es, 0);
  const double radius = *data.support_radius();
  double outside = 0.0;
  Json rows = Json::array();
  for (double t : {4.0, 16.0, 32.0}) {
    const double m = mass_outside(evolve(data, t), radius + t);
    rows.push_back({{"t", t}, {"mass_outside", m}});
    outside = std::max(outside, m);
  }
  out["containment"] = {{"radius", radius}, {"rows", rows}};
  checks.expect(outside < kContainmentTol, "containment " + brief(outside));
  write_json(ctx.dir / "spectral_core.json", out);

  checks.note("roundtrip " + brief(roundtrip) + ", plancherel " + brief(plancherel) + ", unitarity " +
              brief(unitarity) + ", group " + brief(group) + ", outside mass " + brief(outside));
  return checks.finish(1, "spectral_core");
}

// ---- 2: decomposition ----
CriterionResult decomposition(const Context& ctx) {
  Checks checks;
  Json out;

  const GridSpec fine = sweep_grid(6);
  const DyadicFamily dyadic(fine, 6);
  const auto lat = lattice(fine);
  double lattice_residual = 0.0;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    if (lat->radius[i] > 64.0) continue;
    double sum = 0.0;
    for (int k = 0; k <= 6; ++k) sum += dyadic.table(k)[i];
    lattice_residual = std::max(lattice_residual, std::abs(sum - 1.0));
  }
  double radial_residual = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double r = 64.0 * i / 20000.0;
    double sum = 0.0;
    for (int k = 0; k <= 6; ++k) sum += dyadic_cutoff(k, r);
    radial_residual = std::max(radial_residual, std::abs(sum - 1.0));
  }
  out["dyadic_lattice_residual"] = lattice_residual;
  out["dyadic_radial_residual"] = radial_residual;
  checks.expect(lattice_residual < kPartitionTol, "psi lattice residual " + brief(lattice_residual));
  checks.expect(radial_residual < kPartitionTol, "psi radial residual " + brief(radial_residual));

  double sector_residual = 0.0;
  Json sectors = Json::array();
  for (int k = 3; k <= 6; ++k) {
    const SectorFamily family(sweep_grid(k), k);
    double worst = 0.0;
    for (int i = 0; i < 8192; ++i) {
      const double angle = kTwoPi * i / 8192.0;
      double sum = 0.0;
      for (int j = 0; j < family.size(); ++j) sum += family.cutoff(j, angle);
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    sectors.push_back({{"k", k}, {"sectors", family.size()}, {"residual", worst}});
    sector_residual = std::max(sector_residual, worst);
  }
  out["sector_residuals"] = sectors;
  checks.expect(sector_residual < kPartitionTol, "chi residual " + brief(sector_residual));

  double reconstruction = 0.0;
  Json rebuilt = Json::array();
  for (int k = 3; k <= 6; ++k) {
    const ShellEnsemble shell = shell_ensemble(k, 2, 1, ctx.seed);
    const DecompositionPlan plan(shell.spec, k - 1, k);
    for (std::size_t s = 0; s < shell.samples.size(); ++s) {
      const Field& f = shell.samples[s];
      Field sum = Field::zeros(shell.spec, Representation::spectral);
      for (int scale = k - 1; scale <= k; ++scale) {
        const SectorFamily& family = plan.sectors(scale);
        for (int j = 0; j < family.size(); ++j) sum = sum + sector_project(f, family, j, plan.dyadic());
      }
      const double err = relative_l2(sum, to_spectral(f));
      rebuilt.push_back({{"k", k}, {"sample", s}, {"relative_error", err}});
      reconstruction = std::max(reconstruction, err);
    }
  }
  out["reconstruction"] = rebuilt;
  checks.expect(reconstruction < kReconstructionTol, "reconstruction " + brief(reconstruction));
  write_json(ctx.dir / "decomposition.json", out);

  checks.note("psi " + brief(std::max(lattice_residual, radial_residual)) + ", chi " + brief(sector_residual) +
              ", reconstruction " + brief(reconstruction));
  return checks.finish(2, "decomposition");
}

// ---- 3: Knapp growth ----
CriterionResult knapp(const Context& ctx) {
  Checks checks;
  const GridSpec spec = create_grid(1024, 128.0);
  const Field f = knapp_radial(spec);
  const double times[] = {4.0, 8.0, 16.0, 32.0};
  std::ostringstream note;
  Json out = Json::array();
  for (double p : {1.0, kInfinity, 2.0}) {
    const GrowthReport r = knapp_growth(f, p, times);
    const std::string tag = std::isfinite(p) ? "p" + brief(p) : "pinf";
    write_text(ctx.dir / ("knapp_" + tag + ".csv"), r.to_csv());
    out.push_back(r.to_json());
    const double tol = p == 2.0 ? kKnappL2Tol : kKnappSlopeTol;
    checks.expect(std::abs(r.fit.slope - r.target) <= tol,
                  tag + " slope " + brief(r.fit.slope) + " vs " + brief(r.target));
    checks.expect(r.fit.residual < kFitResidual, tag + " residual " + brief(r.fit.residual));
    note << (note.tellp() > 0 ? ", " : "") << tag << " slope " << brief(r.fit.slope);
  }
  write_json(ctx.dir / "knapp.json", out);
  checks.note(note.str());
  return checks.finish(3, "knapp_growth");
}

// ---- 4: invariance ----
CriterionResult invariance(const Context& ctx) {
  Checks checks;
  const GridSpec spec = create_grid(1024, 128.0);
  EnsembleSpec es;
  es.k = 3;
  es.seed = ctx.seed;
  es.count = ctx.ensemble;
  es.envelope_width = 2.0;
  const auto ensemble = random_ensemble(spec, es);
  const DecompositionPlan plan(spec, 2, 3);
  const ExponentTuple tuples[] = {{0.0, 4.0, 2.0, 2.0}, {0.0, 6.0, 2.0, 2.0}};
  const double times[] = {1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
  const auto reports = invariance_report(ensemble, tuples, plan, times);
  std::ostringstream note;
  Json out = Json::array();
  for (const auto& r : reports) {
    const std::string tag = "p" + brief(r.tuple.p);
    write_text(ctx.dir / ("invariance_" + tag + ".csv"), r.to_csv());
    out.push_back(r.to_json());
    const double bound = exponents(2, r.tuple.p).growth + kInvarianceMargin;
    checks.expect(r.fit.slope <= bound, tag + " growth " + brief(r.fit.slope) + " > " + brief(bound));
    checks.expect(r.fit.residual < kFitResidual, tag + " residual " + brief(r.fit.residual));
    note << (note.tellp() > 0 ? ", " : "") << tag << " growth " << brief(r.fit.slope) << " <= " << brief(bound);
  }
  write_json(ctx.dir / "invariance.json", out);
  checks.note(note.str());
  return checks.finish(4, "invariance");
}

std::vector<ShellEnsemble> sweep_shells(const Context& ctx, int annulus, int bumps, std::uint64_t salt) {
  std::vector<ShellEnsemble> shells;
  for (int k = 3; k <= 6; ++k) shells.push_back(shell_ensemble(k, annulus, bumps, ctx.seed + salt));
  return shells;
}

// ---- 5: equivalence ----
CriterionResult equivalence(const Context& ctx) {
  Checks checks;
  const int bumps = ctx.ensemble / 5;
  const auto shells = sweep_shells(ctx, ctx.ensemble - bumps, bumps, 5);
  const ExponentTuple tuples[] = {{0.0, 4.0, 2.0, 2.0}, {0.0, 6.0, 2.0, 2.0}, {0.25, 4.0, 4.0, 4.0}};
  const EquivalenceReport report = equivalence_report(shells, tuples, TimeWindow{});
  write_text(ctx.dir / "equivalence.csv", report.to_csv());
  write_json(ctx.dir / "equivalence.json", report.to_json());
  double widest = 0.0, steepest = 0.0;
  for (const auto& b : report.bands) {
    const std::string tag = b.pair + " (s,p,q)=(" + brief(b.tuple.s) + "," + brief(b.tuple.p) + "," +
                            brief(b.tuple.q) + ")";
    checks.expect(b.overall.width() < kEquivalenceBand, tag + " band " + brief(b.overall.width()));
    checks.expect(std::abs(b.trend.slope) < kEquivalenceTrend, tag + " trend " + brief(b.trend.slope));
    checks.expect(b.trend.residual < kFitResidual, tag + " trend residual " + brief(b.trend.residual));
    widest = std::max(widest, b.overall.width());
    steepest = std::max(steepest, std::abs(b.trend.slope));
  }
  checks.expect(!report.bands.empty(), "no bands");
  checks.note("widest band " + brief(widest) + ", steepest trend " + brief(steepest));
  return checks.finish(5, "norm_equivalence");
}

// ---- 6: local smoothing ----
CriterionResult smoothing(const Context& ctx) {
  Checks checks;
  const auto shells = sweep_shells(ctx, 6, 2, 6);
  std::ostringstream note;
  const double limit = kSmoothingSlope * std::log(2.0);
  for (double p : {4.0, 8.0}) {
    const LocalSmoothingReport r = local_smoothing_report(shells, p, 0.1);
    const std::string tag = "p" + brief(p);
    write_text(ctx.dir / ("smoothing_" + tag + ".csv"), r.to_csv());
    write_json(ctx.dir / ("smoothing_" + tag + ".json"), r.to_json());
    checks.expect(r.fit.slope < limit, tag + " slope " + brief(r.fit.slope) + " >= " + brief(limit));
    checks.expect(r.fit.residual < kFitResidual, tag + " residual " + brief(r.fit.residual));
    note << (note.tellp() > 0 ? ", " : "") << tag << " slope " << brief(r.fit.slope);
  }
  checks.note(note.str() + " (limit " + brief(limit) + ")");
  return checks.finish(6, "local_smoothing");
}

// ---- 7: decoupling ----
CriterionResult decoupling(const Context& ctx) {
  Checks checks;
  const TimeWindow window;
  const auto shells = sweep_shells(ctx, 6, 2, 7);
  const DecouplingReport r = decoupling_report(shells, 6.0, window);
  write_text(ctx.dir / "decoupling_p6.csv", r.to_csv());
  write_json(ctx.dir / "decoupling_p6.json", r.to_json());
  const double limit = decoupling_exponent(2, 6.0) + kDecouplingMargin;
  checks.expect(r.fit.slope <= limit, "slope " + brief(r.fit.slope) + " > " + brief(limit));
  checks.expect(r.fit.residual < kFitResidual, "residual " + brief(r.fit.residual));

  const auto single = sweep_shells(ctx, 0, 2, 8);
  const DecouplingReport s = decoupling_report(single, 6.0, window);
  write_text(ctx.dir / "decoupling_single_sector.csv", s.to_csv());
  std::vector<double> ratios;
  for (const auto& row : s.rows) ratios.push_back(row.ratio());
  const Band band = band_of(ratios);
  write_json(ctx.dir / "decoupling_single_sector.json", {{"report", s.to_json()}, {"band", band.to_json()}});
  checks.expect(band.width() < kSingleSectorBand, "single-sector band " + brief(band.width()));

  checks.note("slope " + brief(r.fit.slope) + " <= " + brief(limit) + ", single-sector band " +
              brief(band.width()));
  return checks.finish(7, "decoupling");
}

// ---- 8: embeddings ----
CriterionResult embeddings(const Context& ctx) {
  Checks checks;
  const auto shells = sweep_shells(ctx, 4, 2, 9);
  const double ps[] = {4.0, 6.0};
  const EmbeddingReport r = embedding_report(shells, ps);
  write_text(ctx.dir / "embeddings.csv", r.to_csv());
  write_json(ctx.dir / "embeddings.json", r.to_json());
  double widest = 0.0;
  for (const auto& s : r.summary) {
    checks.expect(s.band > 0.0 && s.band < kEmbeddingBand, s.name + " p" + brief(s.p) + " band " + brief(s.band));
    widest = std::max(widest, s.band);
  }
  checks.expect(!r.summary.empty(), "no embedding rows");
  checks.note(std::to_string(r.summary.size()) + " instances, widest band " + brief(widest));
  return checks.finish(8, "embeddings");
}

// ---- 9: NLW ----
double max_l2(const TimeSeries& s) {
  double worst = 0.0;
  for (const auto& v : s.values) worst = std::max(worst, lebesgue_norm(v, 2.0));
  return worst;
}

CriterionResult nlw(const Context& ctx) {
  Checks checks;
  Json out;
  std::vector<GronwallReport> monitors;

  // Conservation on the default resolution.
  const GridSpec big = create_grid(256, 32.0);
  const Field f = gaussian(big, {0.0, 0.0}, 1.0);
  const Field g = Field::zeros(big, Representation::physical);
  SolverConfig cfg;
  cfg.dt = 1.0 / 1024.0;
  cfg.final_time = 1.0;
  const Trajectory run = solve(f, g, cfg);
  write_text(ctx.dir / "nlw_records.csv", run.records_csv());
  out["conservation"] = run.summary();
  const double drift = run.energy_drift();
  checks.expect(!run.blew_up && drift < kEnergyDriftTol, "energy drift " + brief(drift));
  monitors.push_back(gronwall_monitor(run.records));

  // Step order against a fine reference.
  const GridSpec small = create_grid(64, 16.0);
  const Field fs = gaussian(small, {0.0, 0.0}, 1.0);
  const Field gs = Field::zeros(small, Representation::physical);
  SolverConfig ref = cfg;
  ref.dt = 1.0 / 512.0;
  const Field reference = solve(fs, gs, ref).states.back().u;
  std::vector<double> x, y;
  Json order_rows = Json::array();
  for (int level = 2; level <= 5; ++level) {
    SolverConfig c = cfg;
    c.dt = std::ldexp(1.0, -level);
    const Trajectory t = solve(fs, gs, c);
    const double err = lebesgue_norm(t.states.back().u - reference, 2.0);
    order_rows.push_back({{"dt", c.dt}, {"error", err}});
    x.push_back(std::log(c.dt));
    y.push_back(std::log(err));
    monitors.push_back(gronwall_monitor(t.records));
  }
  const FitResult order = least_squares(x, y);
  out["order"] = {{"rows", order_rows}, {"fit", order.to_json()}};
  checks.expect(order.slope >= kOrderLo && order.slope <= kOrderHi, "order " + brief(order.slope));

  // Picard iterates on small data.
  const Field fp = Complex(0.5) * fs;
  SolverConfig pc = cfg;
  pc.dt = 1.0 / 64.0;
  const auto iterates = picard_iterates(fp, gs, pc, 7);
  double even = 0.0;
  for (int m = 2; m <= 7; m += 2) even = std::max(even, max_l2(iterates[m - 1]));
  checks.expect(even < kEvenPicardTol, "even iterates " + brief(even));

  const auto halved = picard_iterates(Complex(0.5) * fp, Complex(0.5) * gs, pc, 5);
  double homogeneity = 0.0;
  for (int m = 1; m <= 5; m += 2) {
    const double scale = std::ldexp(1.0, -m);
    for (std::size_t j = 0; j < halved[m - 1].values.size(); ++j) {
      const Field expected = Complex(scale) * iterates[m - 1].values[j];
      const double denom = lebesgue_norm(expected, 2.0);
      if (denom == 0.0) continue;
      homogeneity = std::max(homogeneity, lebesgue_norm(halved[m - 1].values[j] - expected, 2.0) / denom);
    }
  }
  checks.expect(homogeneity < kHomogeneityTol, "homogeneity " + brief(homogeneity));

  SolverConfig dense = pc;
  for (int j = 0; j <= pc.steps(); ++j) dense.sample_times.push_back(j * pc.dt);
  const Trajectory picard_run = solve(fp, gs, dense);
  monitors.push_back(gronwall_monitor(picard_run.records));
  TimeSeries u;
  for (const auto& s : picard_run.states) {
    u.times.push_back(s.t);
    u.values.push_back(s.u);
  }
  Json residual_rows = Json::array();
  std::vector<double> residuals;
  for (int m = 1; m <= 7; m += 2) {
    residuals.push_back(picard_residual(u, iterates, m));
    residual_rows.push_back({{"order", m}, {"residual", residuals.back()}});
  }
  double worst_ratio = 0.0;
  for (std::size_t i = 1; i < residuals.size(); ++i) worst_ratio = std::max(worst_ratio, residuals[i] / residuals[i - 1]);
  out["picard"] = {{"even_max", even}, {"homogeneity", homogeneity}, {"residuals", residual_rows},
                   {"worst_ratio", worst_ratio}};
  checks.expect(worst_ratio < kPicardRatio, "Picard residual ratio " + brief(worst_ratio));

  Json gronwall = Json::array();
  bool certified = true;
  for (const auto& m : monitors) {
    gronwall.push_back(m.to_json());
    certified = certified && m.certified && std::isfinite(m.c_hat);
  }
  out["gronwall"] = gronwall;
  checks.expect(certified, "Gronwall monitor not certified");
  write_json(ctx.dir / "nlw.json", out);

  checks.note("drift " + brief(drift) + ", order " + brief(order.slope) + ", even " + brief(even) +
              ", homogeneity " + brief(homogeneity) + ", Picard ratio " + brief(worst_ratio) + ", " +
              std::to_string(monitors.size()) + " runs certified");
  return checks.finish(9, "nlw_solver");
}

using CriterionFn = CriterionResult (*)(const Context&);

struct Entry {
  int id;
  const char* name;
  CriterionFn fn;
};

constexpr Entry kCriteria[] = {
    {1, "spectral_core", spectral_core}, {2, "decomposition", decomposition}, {3, "knapp_growth", knapp},
    {4, "invariance", invariance},       {5, "norm_equivalence", equivalence}, {6, "local_smoothing", smoothing},
    {7, "decoupling", decoupling},       {8, "embeddings", embeddings},       {9, "nlw_solver", nlw},
};

std::string directory_name(const Entry& e) {
  std::ostringstream out;
  out << 'c' << (e.id < 10 ? "0" : "") << e.id << '_' << e.name;
  return out.str();
}

bool selected(const AcceptanceOptions& options, int id) {
  return options.only.empty() || std::find(options.only.begin(), options.only.end(), id) != options.only.end();
}

CriterionResult run_one(const Entry& e, const Context& ctx) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = e.fn(ctx);
  } catch (const std::exception& ex) {
    r.id = e.id;
    r.name = e.name;
    r.passed = false;
    r.detail = std::string("error: ") + ex.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

Json result_json(const CriterionResult& r) {
  return {{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}};
}

std::vector<CriterionResult> run_pass(const AcceptanceOptions& options, const fs::path& root,
                                      const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> results;
  Json manifest;
  manifest["seed"] = options.seed;
  manifest["ensemble_size"] = options.ensemble_size;
  manifest["rng"] = CounterRng::identity();
  Json timings = Json::array();
  for (const Entry& e : kCriteria) {
    if (!selected(options, e.id)) continue;
    const Context ctx{root / directory_name(e), options.seed, options.ensemble_size};
    fs::create_directories(ctx.dir);
    CriterionResult r = run_one(e, ctx);
    write_json(ctx.dir / "result.json", result_json(r));
    timings.push_back({{"id", r.id}, {"seconds", r.seconds}});
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  manifest["wall_seconds"] = timings;
  write_json(root / "manifest.json", manifest);
  return results;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, fs::path> artifact_files(const fs::path& root) {
  std::map<std::string, fs::path> files;
  if (!fs::exists(root)) return files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file() || entry.path().filename() == "manifest.json") continue;
    files[fs::relative(entry.path(), root).generic_string()] = entry.path();
  }
  return files;
}

}  // namespace

std::string CriterionResult::line() const {
  std::ostringstream out;
  out << (passed ? "[PASS] " : "[FAIL] ") << id << ' ' << name << ": " << detail;
  out.precision(3);
  out << " (" << std::fixed << seconds << " s)";
  return out.str();
}

bool AcceptanceResult::all_passed() const {
  return !criteria.empty() &&
         std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& r) { return r.passed; });
}

Json AcceptanceResult::to_json() const {
  Json j = Json::array();
  for (const auto& r : criteria) {
    Json row = result_json(r);
    row["seconds"] = r.seconds;
    j.push_back(row);
  }
  return {{"all_passed", all_passed()}, {"criteria", j}};
}

bool identical_artifacts(const fs::path& a, const fs::path& b, std::vector<std::string>& mismatches) {
  const auto left = artifact_files(a);
  const auto right = artifact_files(b);
  const std::size_t before = mismatches.size();
  for (const auto& [name, path] : left) {
    const auto it = right.find(name);
    if (it == right.end()) {
      mismatches.push_back("missing in rerun: " + name);
    } else if (slurp(path) != slurp(it->second)) {
      mismatches.push_back("bytes differ: " + name);
    }
  }
  for (const auto& [name, path] : right) {
    if (!left.count(name)) mismatches.push_back("only in rerun: " + name);
  }
  if (left.empty()) mismatches.push_back("no artifacts under " + a.string());
  return mismatches.size() == before;
}

AcceptanceResult run_acceptance(const AcceptanceOptions& options,
                                const std::function<void(const CriterionResult&)>& on_result) {
  if (options.output_dir.empty()) throw ConfigError("acceptance needs an output directory");
  if (options.ensemble_size < 5) throw ConfigError("acceptance ensembles need at least 5 samples");
  const fs::path first = options.output_dir / "run1";
  const fs::path second = options.output_dir / "run2";
  fs::remove_all(first);
  fs::remove_all(second);

  AcceptanceResult result;
  result.criteria = run_pass(options, first, on_result);

  if (options.check_determinism && selected(options, 10)) {
    const auto start = std::chrono::steady_clock::now();
    run_pass(options, second, {});
    std::vector<std::string> mismatches;
    CriterionResult r;
    r.id = 10;
    r.name = "determinism";
    r.passed = identical_artifacts(first, second, mismatches);
    const std::size_t files = artifact_files(first).size();
    if (r.passed) {
      r.detail = std::to_string(files) + " artifacts byte-identical across reruns";
    } else {
      std::ostringstream out;
      out << mismatches.size() << " mismatches";
      for (std::size_t i = 0; i < std::min<std::size_t>(3, mismatches.size()); ++i) out << "; " << mismatches[i];
      r.detail = out.str();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_result) on_result(r);
    result.criteria.push_back(std::move(r));
  }
  write_json(options.output_dir / "acceptance.json", result.to_json());
  return result;
}

}  // namespace halfwave
