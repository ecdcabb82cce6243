#include "halfwave/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "halfwave/errors.hpp"
#include "halfwave/numerics.hpp"
#include "halfwave/propagator.hpp"

namespace halfwave {

namespace {

constexpr double kSweepLength = 12.0;

Json exponent_json(double x) { return std::isfinite(x) ? Json(x) : Json("inf"); }

double dual_exponent(double p) {
  if (!std::isfinite(p)) return 1.0;
  if (p == 1.0) return kInfinity;
  return p / (p - 1.0);
}

double median_of(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

// Largest |xi| carrying a nonzero spectral coefficient.
double spectral_radius(const Field& f) {
  const Field spectral = to_spectral(f);
  const auto lat = lattice(f.spec());
  double r = 0.0;
  const auto values = spectral.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != Complex(0.0)) r = std::max(r, lat->radius[i]);
  }
  return r;
}

FitResult fit_if_possible(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 3) return {};
  return least_squares(x, y);
}

}  // namespace

GridSpec sweep_grid(int k) {
  if (k < 0) throw ConfigError("shell index must be non-negative");
  int n = 128;
  while (!(kPi * n / kSweepLength > std::ldexp(1.0, k + 1))) n *= 2;
  return create_grid(n, kSweepLength);
}

ShellEnsemble shell_ensemble(int k, int annulus, int bumps, std::uint64_t seed) {
  ShellEnsemble shell{k, sweep_grid(k), {}};
  EnsembleSpec es;
  es.k = k;
  es.seed = seed;
  es.kind = EnsembleKind::random_annulus;
  for (int i = 0; i < annulus; ++i) shell.samples.push_back(ensemble_sample(shell.spec, es, i));
  es.kind = EnsembleKind::sector_bump;
  for (int i = 0; i < bumps; ++i) shell.samples.push_back(ensemble_sample(shell.spec, es, annulus + i));
  return shell;
}

Json Band::to_json() const {
  Json j;
  j["min"] = min;
  j["max"] = max;
  j["median"] = median;
  j["width"] = width();
  j["count"] = count;
  return j;
}

Band band_of(std::span<const double> ratios) {
  std::vector<double> kept;
  for (double r : ratios) {
    if (std::isfinite(r) && r > 0.0) kept.push_back(r);
  }
  Band band;
  band.count = static_cast<int>(kept.size());
  if (kept.empty()) return band;
  band.min = *std::min_element(kept.begin(), kept.end());
  band.max = *std::max_element(kept.begin(), kept.end());
  band.median = median_of(kept);
  return band;
}

FitResult growth_fit(const Field& f, double p, std::span<const double> times) {
  if (times.size() < 3) throw UsageError("degenerate fit: growth_fit needs at least 3 times");
  std::vector<double> x, y;
  for (double t : times) {
    x.push_back(std::log1p(t));
    y.push_back(std::log(lebesgue_norm(evolve(f, t), p)));
  }
  return least_squares(x, y);
}

Field holder_witness(const Field& u, double p) {
  if (!(p > 1.0)) throw ConfigError("Hoelder witness needs p > 1");
  const double exponent = dual_exponent(p) - 1.0;
  const Field physical = to_physical(u);
  ComplexVector values(physical.spec().size());
  const auto src = physical.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double a = std::abs(src[i]);
    if (a == 0.0) continue;
    values[i] = (exponent == 0.0 ? 1.0 : std::pow(a, exponent)) * std::conj(src[i]) / a;
  }
  return Field(physical.spec(), Representation::physical, std::move(values));
}

double shell_fraction(const Field& u, double t, double half_width) {
  const Field physical = to_physical(u);
  const GridSpec& spec = physical.spec();
  CompensatedSum inside, total;
  const auto values = physical.values();
  for (int iy = 0; iy < spec.n; ++iy) {
    const double y = coordinate(spec, iy);
    for (int ix = 0; ix < spec.n; ++ix) {
      const double a = std::abs(values[static_cast<std::size_t>(iy) * spec.n + ix]);
      total.add(a);
      if (std::abs(std::hypot(coordinate(spec, ix), y) - t) <= half_width) inside.add(a);
    }
  }
  return total.value() > 0.0 ? inside.value() / total.value() : 0.0;
}

GrowthReport knapp_growth(const Field& knapp, double p, std::span<const double> times) {
  if (times.size() < 3) throw UsageError("degenerate fit: Knapp growth needs at least 3 times");
  GrowthReport report;
  report.p = p;
  report.target = exponents(2, p).growth;
  report.method = std::isfinite(p) ? "forward" : "dual";
  std::vector<double> x, y;
  for (double t : times) {
    const Field u = evolve(knapp, t);
    double value;
    if (std::isfinite(p)) {
      value = lebesgue_norm(u, p);
    } else {
      const Field g = holder_witness(u, p);
      const Field filtered =
          apply_multiplier(g, [](double kx, double ky) { return Complex(knapp_profile(std::hypot(kx, ky)), 0.0); });
      value = lebesgue_norm(evolve(filtered, t), p) / lebesgue_norm(g, p);
    }
    report.times.push_back(t);
    report.values.push_back(value);
    x.push_back(std::log1p(t));
    y.push_back(std::log(value));
  }
  report.fit = least_squares(x, y);
  return report;
}

Json GrowthReport::to_json() const {
  Json j;
  j["p"] = exponent_json(p);
  j["method"] = method;
  j["target_slope"] = target;
  j["times"] = times;
  j["values"] = values;
  j["fit"] = fit.to_json();
  return j;
}

std::string GrowthReport::to_csv() const {
  CsvTable table({"p", "method", "t", "norm", "slope", "residual"});
  for (std::size_t i = 0; i < times.size(); ++i) {
    table.add_row({csv_cell(p), csv_cell(method), csv_cell(times[i]), csv_cell(values[i]), csv_cell(fit.slope),
                   csv_cell(fit.residual)});
  }
  return table.str();
}

std::vector<InvarianceReport> invariance_report(std::span<const Field> ensemble,
                                                std::span<const ExponentTuple> tuples,
                                                const DecompositionPlan& plan, std::span<const double> times) {
  if (ensemble.empty()) throw UsageError("invariance report needs samples");
  std::vector<double> ps;
  for (const auto& t : tuples) {
    t.validate();
    if (std::find(ps.begin(), ps.end(), t.p) == ps.end()) ps.push_back(t.p);
  }
  auto slot = [&](double p) { return static_cast<std::size_t>(std::find(ps.begin(), ps.end(), p) - ps.begin()); };

  std::vector<InvarianceReport> out(tuples.size());
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    out[i].tuple = tuples[i];
    out[i].times.assign(times.begin(), times.end());
    out[i].worst_ratio.assign(times.size(), 0.0);
    out[i].bound = exponents(tuples[i].d, tuples[i].p).growth + 0.15;
  }
  for (const Field& f : ensemble) {
    const auto base = sector_terms(f, plan, ps);
    std::vector<double> base_norm(tuples.size());
    for (std::size_t i = 0; i < tuples.size(); ++i) {
      base_norm[i] = assemble_adapted(base[slot(tuples[i].p)], tuples[i], "adapted_discrete").total;
    }
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      const auto moved = sector_terms(evolve(f, times[ti]), plan, ps);
      for (std::size_t i = 0; i < tuples.size(); ++i) {
        if (base_norm[i] == 0.0) continue;
        const double value = assemble_adapted(moved[slot(tuples[i].p)], tuples[i], "adapted_discrete").total;
        out[i].worst_ratio[ti] = std::max(out[i].worst_ratio[ti], value / base_norm[i]);
      }
    }
  }
  for (auto& report : out) {
    std::vector<double> x, y;
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      x.push_back(std::log1p(times[ti]));
      y.push_back(std::log(report.worst_ratio[ti]));
    }
    report.fit = fit_if_possible(x, y);
  }
  return out;
}

Json InvarianceReport::to_json() const {
  Json j;
  j["exponents"] = tuple.to_json();
  j["times"] = times;
  j["worst_ratio"] = worst_ratio;
  j["fit"] = fit.to_json();
  j["slope_bound"] = bound;
  return j;
}

std::string InvarianceReport::to_csv() const {
  CsvTable table({"p", "q", "t", "worst_ratio"});
  for (std::size_t i = 0; i < times.size(); ++i) {
    table.add_row({csv_cell(tuple.p), csv_cell(tuple.q), csv_cell(times[i]), csv_cell(worst_ratio[i])});
  }
  return table.str();
}

SmoothingRow local_smoothing_ratio(const Field& f, double p, double epsilon, const DecompositionPlan& plan) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  const ExponentTuple tuple{exponents(2, p).s_bar + epsilon, p, 2.0, 2.0};
  const IntervalNorm lhs = interval_spacetime_norm(f, p, 0.0, 1.0);
  SmoothingRow row;
  row.lhs = lhs.value;
  row.quadrature_change = lhs.halved_difference;
  row.rhs = adapted_norm_discrete(f, tuple, plan).total;
  return row;
}

LocalSmoothingReport local_smoothing_report(std::span<const ShellEnsemble> shells, double p, double epsilon) {
  LocalSmoothingReport report;
  report.p = p;
  report.epsilon = epsilon;
  report.s = exponents(2, p).s_bar + epsilon;
  std::vector<double> x, y;
  for (const auto& shell : shells) {
    const DecompositionPlan plan(shell.spec, std::max(0, shell.k - 1), shell.k);
    double worst = 0.0;
    for (std::size_t i = 0; i < shell.samples.size(); ++i) {
      SmoothingRow row = local_smoothing_ratio(shell.samples[i], p, epsilon, plan);
      row.k = shell.k;
      row.sample = static_cast<int>(i);
      if (row.rhs > 0.0) worst = std::max(worst, row.ratio());
      report.rows.push_back(row);
    }
    report.shells.push_back(shell.k);
    report.worst.push_back(worst);
    x.push_back(shell.k);
    y.push_back(std::log(worst));
  }
  report.fit = fit_if_possible(x, y);
  return report;
}

Json LocalSmoothingReport::to_json() const {
  Json j;
  j["p"] = p;
  j["epsilon"] = epsilon;
  j["s"] = s;
  j["shells"] = shells;
  j["worst_ratio"] = worst;
  j["fit"] = fit.to_json();
  j["slope_bound"] = 0.1 * std::log(2.0);
  return j;
}

std::string LocalSmoothingReport::to_csv() const {
  CsvTable table({"k", "sample", "lhs", "rhs", "ratio", "quadrature_change"});
  for (const auto& r : rows) {
    table.add_row({csv_cell(static_cast<long long>(r.k)), csv_cell(static_cast<long long>(r.sample)),
                   csv_cell(r.lhs), csv_cell(r.rhs), csv_cell(r.ratio()), csv_cell(r.quadrature_change)});
  }
  return table.str();
}

DecouplingRow decoupling_row(const Field& f, int k, double p, const TimeWindow& window) {
  const SectorFamily family(f.spec(), k);
  const Field spectral = to_spectral(f);
  const auto lat = lattice(f.spec());
  const auto values = spectral.values();
  const double exps[1] = {p};

  // Angular cutoffs only: each lattice point belongs to at most two sectors.
  std::vector<ComplexVector> pieces(family.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == Complex(0.0)) continue;
    if (lat->radius[i] == 0.0) {
      for (auto& piece : pieces) {
        if (piece.empty()) piece.resize(values.size());
        piece[i] = values[i] / static_cast<double>(family.size());
      }
      continue;
    }
    const auto [lower, share] = family.split(lat->angle[i]);
    const int upper = (lower + 1) % family.size();
    for (auto [j, w] : {std::pair{lower, share}, std::pair{upper, 1.0 - share}}) {
      if (w == 0.0) continue;
      if (pieces[j].empty()) pieces[j].resize(values.size());
      pieces[j][i] = w * values[i];
    }
  }

  DecouplingRow row;
  row.k = k;
  row.lhs = interval_spacetime_norm(f, p, 0.0, 1.0).value;
  CompensatedSum squares;
  for (auto& piece : pieces) {
    double norm = 0.0;
    if (!piece.empty()) {
      const Field projected(f.spec(), Representation::spectral, std::move(piece), f.support_radius());
      norm = spacetime_norms(projected, window, exps).values[0];
    }
    row.per_sector.push_back(norm);
    squares.add(norm * norm);
  }
  row.rhs = std::sqrt(squares.value());
  return row;
}

DecouplingReport decoupling_report(std::span<const ShellEnsemble> shells, double p, const TimeWindow& window) {
  DecouplingReport report;
  report.p = p;
  std::vector<double> x, y;
  for (const auto& shell : shells) {
    double worst = 0.0;
    for (std::size_t i = 0; i < shell.samples.size(); ++i) {
      DecouplingRow row = decoupling_row(shell.samples[i], shell.k, p, window);
      row.sample = static_cast<int>(i);
      if (row.rhs > 0.0) worst = std::max(worst, row.ratio());
      report.rows.push_back(std::move(row));
    }
    report.shells.push_back(shell.k);
    report.worst.push_back(worst);
    x.push_back(shell.k);
    y.push_back(std::log2(worst));
  }
  report.fit = fit_if_possible(x, y);
  return report;
}

Json DecouplingReport::to_json() const {
  Json j;
  j["p"] = p;
  j["shells"] = shells;
  j["worst_ratio"] = worst;
  j["fit_log2"] = fit.to_json();
  j["slope_bound"] = exponents(2, p).s_bar + 0.1;
  return j;
}

std::string DecouplingReport::to_csv() const {
  CsvTable table({"k", "sample", "nu_index", "term", "lhs", "rhs", "ratio"});
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.per_sector.size(); ++j) {
      table.add_row({csv_cell(static_cast<long long>(r.k)), csv_cell(static_cast<long long>(r.sample)),
                     csv_cell(static_cast<long long>(j)), csv_cell(r.per_sector[j]), csv_cell(r.lhs),
                     csv_cell(r.rhs), csv_cell(r.ratio())});
    }
  }
  return table.str();
}

namespace {

constexpr std::array<const char*, 3> kPairNames = {"integral/discrete", "wavepacket/discrete",
                                                   "wavepacket/integral"};
constexpr std::array<std::pair<int, int>, 3> kPairs = {{{1, 0}, {2, 0}, {2, 1}}};

}  // namespace

EquivalenceReport equivalence_report(std::span<const ShellEnsemble> shells, std::span<const ExponentTuple> tuples,
                                     const TimeWindow& window, const PhiOmegaQuadrature& quadrature) {
  EquivalenceReport report;
  report.tuples.assign(tuples.begin(), tuples.end());
  std::vector<double> ps;
  for (const auto& t : tuples) {
    t.validate();
    if (std::find(ps.begin(), ps.end(), t.p) == ps.end()) ps.push_back(t.p);
  }
  auto slot = [&](double p) { return static_cast<std::size_t>(std::find(ps.begin(), ps.end(), p) - ps.begin()); };

  // ratios[tuple][pair][shell]
  std::vector<std::vector<std::vector<std::vector<double>>>> ratios(
      tuples.size(), std::vector<std::vector<std::vector<double>>>(3, std::vector<std::vector<double>>(shells.size())));

  for (std::size_t si = 0; si < shells.size(); ++si) {
    const auto& shell = shells[si];
    const DecompositionPlan plan(shell.spec, std::max(0, shell.k - 1), shell.k);
    const WavePacketSymbols symbols(shell.spec, shell.k, quadrature);
    for (std::size_t n = 0; n < shell.samples.size(); ++n) {
      const Field& f = shell.samples[n];
      if (n == 0) {
        const auto check = symbols.reproduction(f);
        if (check.warned) report.warnings.push_back("k=" + std::to_string(shell.k) + ": " + check.warning);
      }
      const auto discrete = sector_terms(f, plan, ps);
      const auto directions = direction_terms(f, symbols, plan.dyadic(), ps);
      const auto packets = spacetime_sector_terms(f, plan, window, ps);
      EquivalenceSample sample{shell.k, static_cast<int>(n), {}, {}};
      for (std::size_t ti = 0; ti < tuples.size(); ++ti) {
        ExponentTuple tuple = tuples[ti];
        tuple.r = tuple.q;
        const std::size_t s = slot(tuple.p);
        const double d = assemble_adapted(discrete[s], tuple, "adapted_discrete").total;
        const IntegralNorm in = assemble_integral(directions[s], tuple);
        const double w = assemble_adapted(packets[s], tuple, "wavepacket_spacetime").total;
        for (const auto& warning : in.warnings) {
          report.warnings.push_back("k=" + std::to_string(shell.k) + " sample " + std::to_string(n) + ": " + warning);
        }
        sample.norms.push_back({d, in.value, w});
        sample.integral_error.push_back(in.error_estimate);
        if (d == 0.0 && in.value == 0.0 && w == 0.0) continue;
        const std::array<double, 3> v{d, in.value, w};
        for (std::size_t pi = 0; pi < kPairs.size(); ++pi) {
          ratios[ti][pi][si].push_back(v[kPairs[pi].first] / v[kPairs[pi].second]);
        }
      }
      report.samples.push_back(std::move(sample));
    }
  }

  for (std::size_t ti = 0; ti < tuples.size(); ++ti) {
    for (std::size_t pi = 0; pi < kPairs.size(); ++pi) {
      PairBand band;
      band.pair = kPairNames[pi];
      band.tuple = tuples[ti];
      std::vector<double> all, x, y;
      for (std::size_t si = 0; si < shells.size(); ++si) {
        const auto& r = ratios[ti][pi][si];
        band.shells.push_back(shells[si].k);
        band.per_shell.push_back(band_of(r));
        all.insert(all.end(), r.begin(), r.end());
        if (band.per_shell.back().count > 0) {
          x.push_back(shells[si].k);
          y.push_back(std::log2(band.per_shell.back().median));
        }
      }
      band.overall = band_of(all);
      band.trend = fit_if_possible(x, y);
      report.bands.push_back(std::move(band));
    }
  }
  return report;
}

Json EquivalenceReport::to_json() const {
  Json j;
  Json ts = Json::array();
  for (const auto& t : tuples) ts.push_back(t.to_json());
  j["tuples"] = std::move(ts);
  Json bs = Json::array();
  for (const auto& b : bands) {
    Json e;
    e["pair"] = b.pair;
    e["exponents"] = b.tuple.to_json();
    e["overall"] = b.overall.to_json();
    Json per = Json::array();
    for (std::size_t i = 0; i < b.shells.size(); ++i) {
      Json s = b.per_shell[i].to_json();
      s["k"] = b.shells[i];
      per.push_back(std::move(s));
    }
    e["per_shell"] = std::move(per);
    e["trend_log2"] = b.trend.to_json();
    bs.push_back(std::move(e));
  }
  j["bands"] = std::move(bs);
  j["warnings"] = warnings;
  return j;
}

std::string EquivalenceReport::to_csv() const {
  CsvTable table({"k", "sample", "s", "p", "q", "discrete", "integral", "wavepacket", "integral_error"});
  for (const auto& sample : samples) {
    for (std::size_t ti = 0; ti < sample.norms.size(); ++ti) {
      const auto& t = tuples[ti];
      table.add_row({csv_cell(static_cast<long long>(sample.k)), csv_cell(static_cast<long long>(sample.sample)),
                     csv_cell(t.s), csv_cell(t.p), csv_cell(t.q), csv_cell(sample.norms[ti][0]),
                     csv_cell(sample.norms[ti][1]), csv_cell(sample.norms[ti][2]),
                     csv_cell(sample.integral_error[ti])});
    }
  }
  return table.str();
}

std::vector<EmbeddingRow> embedding_rows(const Field& f, int sample, double p, const DecompositionPlan& plan,
                                         const WavePacketSymbols& symbols, double epsilon) {
  if (!(p >= 2.0) || !std::isfinite(p)) throw ConfigError("embedding table needs 2 <= p < inf");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  const double pd = dual_exponent(p);
  const double sp = fixed_time_loss(2, p);
  const DyadicFamily& dyadic = plan.dyadic();
  const int k = plan.k_hi();

  // Non-even exponents force full-grid evaluation, so they get their own tables.
  const double even_exps[2] = {p, 2.0};
  const double dual_exps[1] = {pd};
  const auto sectors = sector_terms(f, plan, even_exps);
  const auto dual_sectors = sector_terms(f, plan, dual_exps);
  const auto shells = shell_terms(f, dyadic, even_exps);
  const auto dual_shells = shell_terms(f, dyadic, dual_exps);
  const auto directions = direction_terms(f, symbols, dyadic, std::span<const double>(even_exps, 1));

  auto adapted = [&](double s, double pp, double q) {
    const SectorTable& table = pp == p ? sectors[0] : (pp == 2.0 ? sectors[1] : dual_sectors[0]);
    return assemble_adapted(table, ExponentTuple{s, pp, q, q}, "adapted_discrete").total;
  };
  auto besov = [&](double s, double pp, double r) {
    const ShellTerms& terms = pp == p ? shells[0] : dual_shells[0];
    return assemble_besov(terms, s, r).total;
  };
  auto integral = [&](double s, double q, double r) {
    return assemble_integral(directions[0], ExponentTuple{s, p, q, r}).value;
  };
  const double fio = fio_hardy_norm(f, 0.0, p, symbols, dyadic).value;

  const double shift_q = 0.5 * (0.5 - 0.25);
  const double shift_p = 1.5 * (0.5 - 1.0 / p);
  std::vector<EmbeddingRow> rows = {
      {"besov_into_adapted", p, k, sample, adapted(0.0, p, p), besov(sp, p, p)},
      {"adapted_into_besov", p, k, sample, besov(-sp, p, p), adapted(0.0, p, p)},
      {"dual_besov_into_adapted", p, k, sample, adapted(0.0, pd, p), besov(fixed_time_loss(2, pd), pd, p)},
      {"adapted_into_dual_besov", p, k, sample, besov(-sp, p, pd), adapted(0.0, p, pd)},
      {"angular_holder", p, k, sample, integral(0.0, 2.0, 2.0), integral(0.0, 4.0, 2.0)},
      {"angular_sequence", p, k, sample, adapted(0.0, p, 4.0), adapted(shift_q, p, 2.0)},
      {"integrability_shift", p, k, sample, adapted(0.0, p, 2.0), adapted(shift_p, 2.0, 2.0)},
      {"integrability_identity", p, k, sample, adapted(0.0, p, 2.0), adapted(0.0, p, 2.0)},
      {"dyadic_epsilon", p, k, sample, integral(0.0, 2.0, kInfinity), integral(epsilon, 2.0, 2.0)},
      {"adapted_into_fio", p, k, sample, fio, integral(epsilon, p, 2.0)},
      {"fio_into_adapted", p, k, sample, integral(-epsilon, p, 2.0), fio},
  };
  return rows;
}

EmbeddingReport embedding_report(std::span<const ShellEnsemble> shells, std::span<const double> ps, double epsilon) {
  EmbeddingReport report;
  // worst[(name, p)][shell]
  std::map<std::pair<std::string, double>, std::vector<double>> worst;
  std::vector<std::pair<std::string, double>> order;
  for (std::size_t si = 0; si < shells.size(); ++si) {
    const auto& shell = shells[si];
    const DecompositionPlan plan(shell.spec, std::max(0, shell.k - 1), shell.k);
    const WavePacketSymbols symbols(shell.spec, shell.k);
    for (double p : ps) {
      for (std::size_t n = 0; n < shell.samples.size(); ++n) {
        for (auto& row : embedding_rows(shell.samples[n], static_cast<int>(n), p, plan, symbols, epsilon)) {
          const auto key = std::make_pair(row.name, row.p);
          auto [it, fresh] = worst.try_emplace(key, std::vector<double>(shells.size(), 0.0));
          if (fresh) order.push_back(key);
          it->second[si] = std::max(it->second[si], row.constant());
          report.rows.push_back(std::move(row));
        }
      }
    }
  }
  for (const auto& key : order) {
    EmbeddingSummary summary;
    summary.name = key.first;
    summary.p = key.second;
    for (const auto& shell : shells) summary.shells.push_back(shell.k);
    summary.worst = worst[key];
    summary.band = band_of(summary.worst).width();
    report.summary.push_back(std::move(summary));
  }
  return report;
}

Json EmbeddingReport::to_json() const {
  Json j = Json::array();
  for (const auto& s : summary) {
    Json e;
    e["inequality"] = s.name;
    e["p"] = s.p;
    e["shells"] = s.shells;
    e["worst_constant"] = s.worst;
    e["band"] = s.band;
    j.push_back(std::move(e));
  }
  Json out;
  out["summary"] = std::move(j);
  return out;
}

std::string EmbeddingReport::to_csv() const {
  CsvTable table({"inequality", "p", "k", "sample", "lhs", "rhs", "constant"});
  for (const auto& r : rows) {
    table.add_row({csv_cell(r.name), csv_cell(r.p), csv_cell(static_cast<long long>(r.k)),
                   csv_cell(static_cast<long long>(r.sample)), csv_cell(r.lhs), csv_cell(r.rhs),
                   csv_cell(r.constant())});
  }
  return table.str();
}

Field product(std::span<const Field> factors) {
  if (factors.empty()) throw UsageError("product needs at least one factor");
  const GridSpec& spec = factors[0].spec();
  double reach = 0.0;
  for (const auto& f : factors) {
    if (!(f.spec() == spec)) throw UsageError("product factors live on different grids");
    reach += spectral_radius(f);
  }
  if (!(reach < spec.nyquist())) {
    std::ostringstream msg;
    msg << "product aliases: spectral reach " << reach << " is not below the Nyquist frequency " << spec.nyquist();
    throw ValidationError(msg.str());
  }
  ComplexVector values(spec.size(), Complex(1.0));
  for (const auto& f : factors) {
    const Field physical = to_physical(f);
    const auto v = physical.values();
    for (std::size_t i = 0; i < values.size(); ++i) values[i] *= v[i];
  }
  // The exact product lives in |xi| <= reach; anything beyond is roundoff.
  const Field spectral = to_spectral(Field(spec, Representation::physical, std::move(values)));
  ComplexVector banded = spectral.storage();
  const auto lat = lattice(spec);
  for (std::size_t i = 0; i < banded.size(); ++i) {
    if (lat->radius[i] > reach * (1.0 + 1e-12)) banded[i] = 0.0;
  }
  return Field(spec, Representation::spectral, std::move(banded));
}

namespace {

double product_exponent(std::span<const double> ps) {
  double inverse = 0.0;
  for (double p : ps) {
    if (!(p >= 1.0)) throw ConfigError("product exponents must lie in [1, inf]");
    if (std::isfinite(p)) inverse += 1.0 / p;
  }
  if (inverse > 1.0) throw ConfigError("product exponents need sum 1/p_i <= 1");
  return inverse == 0.0 ? kInfinity : 1.0 / inverse;
}

double adapted_one_one(const Field& f, double s, double p, const DecompositionPlan& plan) {
  return adapted_norm_discrete(f, ExponentTuple{s, p, 1.0, 1.0}, plan).total;
}

}  // namespace

ProductRow bilinear_check(const Field& f, const Field& g, double s, double p1, double p2,
                          const DecompositionPlan& plan) {
  if (!(s > 0.75)) throw ConfigError("bilinear estimate needs s > 3(d-1)/4 = 3/4");
  const double ps[2] = {p1, p2};
  const double p = product_exponent(ps);
  const Field factors[2] = {f, g};
  ProductRow row;
  row.name = "bilinear";
  row.lhs = adapted_one_one(product(factors), s, p, plan);
  row.rhs = adapted_one_one(f, s, p1, plan) * adapted_one_one(g, s, p2, plan);
  return row;
}

ProductRow trilinear_check(std::span<const Field> factors, double s, std::array<double, 3> ps,
                           const DecompositionPlan& plan) {
  if (factors.size() != 3) throw UsageError("trilinear check needs three factors");
  if (!(s > -0.25) || !(s >= 0.25)) throw ConfigError("trilinear estimate needs s > 3(d-1)/4 - 1 and s >= (d-1)/4");
  const double p = product_exponent(ps);
  ProductRow row;
  row.name = "trilinear";
  row.lhs = adapted_one_one(product(factors), s - 1.0, p, plan);
  row.rhs = 1.0;
  for (std::size_t i = 0; i < 3; ++i) row.rhs *= adapted_one_one(factors[i], s, ps[i], plan);
  return row;
}

ProductReport product_estimate_check(std::span<const std::array<Field, 3>> triples, double s,
                                     const DecompositionPlan& plan) {
  ProductReport report;
  report.s = s;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const auto& t = triples[i];
    ProductRow bi = bilinear_check(t[0], t[1], s, 4.0, 4.0, plan);
    bi.sample = static_cast<int>(i);
    report.worst_bilinear = std::max(report.worst_bilinear, bi.constant());
    report.rows.push_back(bi);
    ProductRow tri = trilinear_check(t, s, {6.0, 6.0, 6.0}, plan);
    tri.sample = static_cast<int>(i);
    report.worst_trilinear = std::max(report.worst_trilinear, tri.constant());
    report.rows.push_back(tri);
  }
  return report;
}

Json ProductReport::to_json() const {
  Json j;
  j["s"] = s;
  j["worst_bilinear"] = worst_bilinear;
  j["worst_trilinear"] = worst_trilinear;
  j["samples"] = rows.size() / 2;
  return j;
}

std::string ProductReport::to_csv() const {
  CsvTable table({"estimate", "sample", "lhs", "rhs", "constant"});
  for (const auto& r : rows) {
    table.add_row({csv_cell(r.name), csv_cell(static_cast<long long>(r.sample)), csv_cell(r.lhs), csv_cell(r.rhs),
                   csv_cell(r.constant())});
  }
  return table.str();
}

}  // namespace halfwave
