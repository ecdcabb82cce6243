#include "halfwave/cli.hpp"

#include <fftw3.h>
#include <sodium.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "halfwave/acceptance.hpp"
#include "halfwave/decomposition.hpp"
#include "halfwave/errors.hpp"
#include "halfwave/experiments.hpp"
#include "halfwave/field_io.hpp"
#include "halfwave/fit.hpp"
#include "halfwave/nlw.hpp"
#include "halfwave/norms.hpp"
#include "halfwave/propagator.hpp"
#include "halfwave/rng.hpp"
#include "halfwave/wave_packets.hpp"

namespace halfwave {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

const std::vector<std::string> kCommands = {"norms",    "evolve", "knapp", "smoothing", "decouple", "equiv",
                                            "embed",    "products", "nlw", "picard",    "suite"};

const std::vector<std::string> kKeys = {
    "N",     "L",     "k",     "k_lo",   "k_hi",   "s",        "p",     "q",        "r",
    "eps",   "times", "kind",  "count",  "seed",   "width",    "amplitude", "input", "alpha",
    "envelope", "sign",  "dt",    "T",     "dealias", "order", "out",      "format", "ensemble", "determinism"};

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "inf" || v == "infinity") return kInfinity;
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": '" + value + "' is not a number");
  }
}

long long parse_integer(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": '" + value + "' is not an integer");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ConfigError(key + ": '" + value + "' is not a boolean");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!trim(item).empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

int parse_sign(const std::string& value) {
  const std::string v = trim(value);
  if (v == "defocusing" || v == "-1") return -1;
  if (v == "focusing" || v == "+1" || v == "1") return 1;
  if (v == "linear" || v == "0") return 0;
  throw ConfigError("sign: '" + value + "' is not focusing, defocusing or linear");
}

Json exponent_json(double x) { return std::isfinite(x) ? Json(x) : Json("inf"); }

std::string exponent_tag(double p) {
  if (!std::isfinite(p)) return "pinf";
  std::ostringstream out;
  out << 'p' << p;
  return out.str();
}

// ---- command bodies ----

class Artifacts {
 public:
  Artifacts(const RunConfig& config, fs::path dir) : config_(config), dir_(std::move(dir)) {
    fs::create_directories(dir_);
  }
  const fs::path& dir() const { return dir_; }
  void csv(const std::string& name, const std::string& text) {
    if (!config_.wants_csv()) return;
    write_text(dir_ / name, text);
    files_.push_back(name);
  }
  void json(const std::string& name, const Json& value) {
    if (!config_.wants_json()) return;
    write_json(dir_ / name, value);
    files_.push_back(name);
  }
  void field(const std::string& name, const Field& f) {
    save_field(dir_ / name, f);
    files_.push_back(name);
  }
  const std::vector<std::string>& files() const { return files_; }

 private:
  const RunConfig& config_;
  fs::path dir_;
  std::vector<std::string> files_;
};

Field input_field(const RunConfig& c, int index) {
  if (c.input) return load_field(*c.input);
  const GridSpec spec = create_grid(c.n, c.length);
  EnsembleSpec es;
  es.kind = c.kind;
  es.k = c.k;
  es.seed = c.seed;
  es.width = c.width;
  es.envelope_width = c.envelope;
  Field f = ensemble_sample(spec, es, index);
  if (c.amplitude != 1.0) f = Complex(c.amplitude) * f;
  return f;
}

std::vector<ShellEnsemble> sweep(const RunConfig& c) {
  std::vector<ShellEnsemble> shells;
  const int bumps = c.count / 4;
  for (int k = c.k_lo; k <= c.k_hi; ++k) shells.push_back(shell_ensemble(k, c.count - bumps, bumps, c.seed));
  return shells;
}

ExponentTuple tuple_of(const RunConfig& c) { return {c.s, c.p, c.q, c.r}; }

Json run_norms(const RunConfig& c, Artifacts& a, std::ostream& out) {
  const Field f = input_field(c, 0);
  const GridSpec& spec = f.spec();
  const ExponentTuple tuple = tuple_of(c);
  const DecompositionPlan plan(spec, c.k_lo, c.k_hi);
  const WavePacketSymbols symbols(spec, c.k_hi);
  const TimeWindow window;

  struct Row {
    std::string name;
    double value;
  };
  std::vector<Row> rows;
  rows.push_back({"lebesgue", lebesgue_norm(f, c.p)});
  if (std::isfinite(c.p)) rows.push_back({"sobolev", sobolev_norm(f, c.s, c.p)});
  const NormReport besov = besov_norm(f, c.s, c.p, c.r, plan.dyadic());
  rows.push_back({"besov", besov.total});
  const NormReport discrete = adapted_norm_discrete(f, tuple, plan);
  rows.push_back({"adapted_discrete", discrete.total});
  const IntegralNorm integral = adapted_norm_integral(f, tuple, symbols, plan.dyadic());
  rows.push_back({"adapted_integral", integral.value});
  const NormReport packets = wavepacket_spacetime_norm(f, tuple, window, plan);
  rows.push_back({"adapted_wavepacket", packets.total});

  CsvTable table({"norm", "s", "p", "q", "r", "value"});
  Json j;
  j["exponents"] = tuple.to_json();
  for (const auto& row : rows) {
    table.add_row({row.name, csv_cell(c.s), csv_cell(c.p), csv_cell(c.q), csv_cell(c.r), csv_cell(row.value)});
    j["norms"][row.name] = row.value;
    out << row.name << " = " << format_double(row.value) << '\n';
  }
  j["besov"] = besov.to_json();
  j["adapted_discrete"] = discrete.to_json();
  j["adapted_integral"] = integral.to_json();
  j["adapted_wavepacket"] = packets.to_json();
  a.csv("norms.csv", table.str());
  a.csv("adapted_discrete_sectors.csv", discrete.to_csv());
  a.json("norms.json", j);
  return j["norms"];
}

Json run_evolve(const RunConfig& c, Artifacts& a, std::ostream& out) {
  const Field f = input_field(c, 0);
  const FitResult fit = growth_fit(f, c.p, c.times);
  CsvTable table({"t", "log1p_t", "norm"});
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    table.add_row({csv_cell(c.times[i]), csv_cell(fit.samples[i].first), csv_cell(std::exp(fit.samples[i].second))});
    a.field("field_t" + std::to_string(i) + ".hwf", evolve(f, c.times[i]));
  }
  const Json j = {{"p", exponent_json(c.p)}, {"times", c.times}, {"fit", fit.to_json()},
                  {"target", exponents(2, c.p).growth}};
  a.csv("evolve.csv", table.str());
  a.json("evolve.json", j);
  out << "growth slope " << format_double(fit.slope) << " residual " << format_double(fit.residual) << '\n';
  return {{"slope", fit.slope}, {"residual", fit.residual}};
}

Json run_knapp(const RunConfig& c, Artifacts& a, std::ostream& out) {
  const GridSpec spec = create_grid(c.n, c.length);
  const GrowthReport r = knapp_growth(knapp_radial(spec), c.p, c.times);
  a.csv("knapp_" + exponent_tag(c.p) + ".csv", r.to_csv());
  a.json("knapp_" + exponent_tag(c.p) + ".json", r.to_json());
  out << "knapp " << r.method << " p=" << c.p << " slope " << format_double(r.fit.slope) << " residual "
      << format_double(r.fit.residual) << " target " << format_double(r.target) << '\n';
  return {{"slope", r.fit.slope}, {"residual", r.fit.residual}, {"target", r.target}};
}

Json run_smoothing(const RunConfig& c, Artifacts& a, std::ostream& out) {
  const LocalSmoothingReport r = local_smoothing_report(sweep(c), c.p, c.epsilon);
  a.csv("smoothing.csv", r.to_csv());
  a.json("smoothing.json", r.to_json());
  out << "local smoothing p=" << c.p << " slope " << format_double(r.fit.slope) << '\n';
  return {{"slope", r.fit.slope}, {"worst", r.worst}};
}

Json run_decouple(const RunConfig& c, Artifacts& a, std::ostream& out) {
  const DecouplingReport r = decoupling_report(sweep(c), c.p, TimeWindow{});
  a.csv("decoupling.csv", r.to_csv());
  a.json("decoupling.json", r.to_json());
  out << "decoupling p=" << c.p << " slope " << format_double(r.fit.slope) << '\n';
  return {{"slope", r.fit.slope}, {"worst", r.worst}};
}

Json run_equiv(const RunConfig& c, Artifacts& a, std::ostream& out) {
  const ExponentTuple tuples[] = {tuple_of(c)};
  const EquivalenceReport r = equivalence_report(sweep(c), tuples, TimeWindow{});
  a.csv("equivalence.csv", r.to_csv());
  a.json("equivalence.json", r.to_json());
  Json j = Json::array();
  for (const auto& b : r.bands) {
    out << b.pair << " band " << format_double(b.overall.width()) << " trend " << format_double(b.trend.slope) << '\n';
    j.push_back({{"pair", b.pair}, {"band", b.overall.width()}, {"trend", b.trend.slope}});
  }
  return j;
}

Json run_embed(const RunConfig& c, Artifacts& a, std::ostream& out) {
  const double ps[] = {c.p};
  const EmbeddingReport r = embedding_report(sweep(c), ps, c.epsilon);
  a.csv("embeddings.csv", r.to_csv());
  a.json("embeddings.json", r.to_json());
  Json j = Json::object();
  for (const auto& s : r.summary) {
    out << s.name << " band " << format_double(s.band) << '\n';
    j[s.name] = s.band;
  }
  return j;
}

Json run_products(const RunConfig& c, Artifacts& a, std::ostream& out) {
  const GridSpec spec = create_grid(c.n, c.length);
  const DecompositionPlan plan(spec, c.k_lo, c.k_hi);
  std::vector<std::array<Field, 3>> triples;
  for (int i = 0; i < c.count; ++i) {
    EnsembleSpec es;
    es.k = c.k;
    es.seed = c.seed;
    triples.push_back({ensemble_sample(spec, es, 3 * i), ensemble_sample(spec, es, 3 * i + 1),
                       ensemble_sample(spec, es, 3 * i + 2)});
  }
  const ProductReport r = product_estimate_check(triples, c.s, plan);
  a.csv("products.csv", r.to_csv());
  a.json("products.json", r.to_json());
  out << "bilinear worst " << format_double(r.worst_bilinear) << ", trilinear worst "
      << format_double(r.worst_trilinear) << '\n';
  return {{"worst_bilinear", r.worst_bilinear}, {"worst_trilinear", r.worst_trilinear}};
}

SolverConfig solver_of(const RunConfig& c) {
  SolverConfig cfg;
  cfg.alpha = c.alpha;
  cfg.sign = c.sign;
  cfg.dt = c.dt;
  cfg.final_time = c.final_time;
  cfg.dealias = c.dealias;
  cfg.sample_times = c.times;
  return cfg;
}

Json run_nlw(const RunConfig& c, Artifacts& a, std::ostream& out) {
  const Field f = input_field(c, 0);
  const Field g = Field::zeros(f.spec(), Representation::physical);
  const SolverConfig cfg = solver_of(c);
  const Trajectory traj = solve(f, g, cfg);
  const GronwallReport monitor = gronwall_monitor(traj.records);
  a.csv("records.csv", traj.records_csv());
  Json summary = traj.summary();
  summary["solver"] = cfg.to_json();
  summary["gronwall"] = monitor.to_json();
  a.json("summary.json", summary);
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    a.field("state_" + std::to_string(i) + "_u.hwf", traj.states[i].u);
    a.field("state_" + std::to_string(i) + "_ut.hwf", traj.states[i].ut);
  }
  out << "energy drift " << format_double(traj.energy_drift()) << '\n';
  out << "strichartz L^{24/7}L^4 " << format_double(traj.strichartz_24_7_4) << ", L^4L^6 "
      << format_double(traj.strichartz_4_6) << '\n';
  out << "gronwall c_hat " << format_double(monitor.c_hat) << (monitor.certified ? " certified" : " NOT certified")
      << '\n';
  for (const auto& w : traj.warnings) out << "warning: " << w << '\n';
  if (traj.blew_up) throw NumericError(traj.message);
  return {{"energy_drift", traj.energy_drift()}, {"certified", monitor.certified}};
}

Json run_picard(const RunConfig& c, Artifacts& a, std::ostream& out) {
  const Field f = input_field(c, 0);
  const Field g = Field::zeros(f.spec(), Representation::physical);
  SolverConfig cfg = solver_of(c);
  cfg.sample_times.clear();
  for (int j = 0; j <= cfg.steps(); ++j) cfg.sample_times.push_back(j * cfg.dt);
  const auto iterates = picard_iterates(f, g, cfg, c.order);
  const Trajectory traj = solve(f, g, cfg);
  if (traj.blew_up) throw NumericError(traj.message);
  TimeSeries u;
  for (const auto& s : traj.states) {
    u.times.push_back(s.t);
    u.values.push_back(s.u);
  }
  CsvTable table({"order", "residual_linf_l2"});
  Json residuals = Json::array();
  for (int m = 1; m <= c.order; ++m) {
    const double res = picard_residual(u, iterates, m);
    table.add_row({csv_cell(static_cast<long long>(m)), csv_cell(res)});
    residuals.push_back(res);
    out << "order " << m << " residual " << format_double(res) << '\n';
  }
  CsvTable rem({"n", "v_linf_l2", "v_l4_linf"});
  Json remainders = Json::array();
  for (int n = 1; n <= std::min(c.order, 4); ++n) {
    const RemainderSeries r = remainder_series(f, g, cfg, n);
    rem.add_row({csv_cell(static_cast<long long>(n)), csv_cell(r.v_linf_l2), csv_cell(r.v_l4_linf)});
    remainders.push_back({{"n", n}, {"v_linf_l2", r.v_linf_l2}, {"v_l4_linf", r.v_l4_linf}});
  }
  a.csv("picard_residuals.csv", table.str());
  a.csv("remainder.csv", rem.str());
  a.json("picard.json", {{"solver", cfg.to_json()}, {"residuals", residuals}, {"remainder", remainders}});
  return {{"residuals", residuals}};
}

using CommandFn = Json (*)(const RunConfig&, Artifacts&, std::ostream&);

CommandFn command_fn(const std::string& name) {
  if (name == "norms") return run_norms;
  if (name == "evolve") return run_evolve;
  if (name == "knapp") return run_knapp;
  if (name == "smoothing") return run_smoothing;
  if (name == "decouple") return run_decouple;
  if (name == "equiv") return run_equiv;
  if (name == "embed") return run_embed;
  if (name == "products") return run_products;
  if (name == "nlw") return run_nlw;
  if (name == "picard") return run_picard;
  return nullptr;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

Json versions() {
  Json j;
  j["halfwave"] = kVersion;
  j["schema"] = RunConfig::kSchemaVersion;
  j["fftw"] = std::string(fftw_version);
  j["libsodium"] = std::string(sodium_version_string());
  j["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                       "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  j["rng"] = CounterRng::identity();
  return j;
}

std::string usage_text() {
  std::ostringstream out;
  out << "usage: halfwave <command> [--config FILE] [--key value ...]\n"
      << "commands:";
  for (const auto& c : kCommands) out << ' ' << c;
  out << "\nkeys (config file or --key):";
  for (const auto& k : kKeys) out << ' ' << k;
  out << "\noutput root: --out, else $HALFWAVE_OUTPUT_DIR, else ./halfwave_out\n";
  return out.str();
}

}  // namespace

RunConfig RunConfig::defaults_for(const std::string& command) {
  RunConfig c;
  c.command = command;
  c.output_dir = default_output_dir();
  if (command == "evolve") {
    c.n = 512;
    c.length = 128.0;
    c.p = 4.0;
    c.times = {1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
    c.envelope = 2.0;
  } else if (command == "knapp") {
    c.n = 1024;
    c.length = 128.0;
    c.p = 1.0;
    c.times = {4.0, 8.0, 16.0, 32.0};
  } else if (command == "smoothing" || command == "decouple" || command == "equiv" || command == "embed") {
    c.k_lo = 3;
    c.k_hi = 6;
    c.p = command == "decouple" ? 6.0 : 4.0;
  } else if (command == "products") {
    c.n = 512;
    c.length = 32.0;
    c.k = 2;
    c.k_lo = 0;
    c.k_hi = 4;
    c.s = 1.0;
  } else if (command == "nlw") {
    c.n = 256;
    c.length = 32.0;
    c.kind = EnsembleKind::gaussian;
  } else if (command == "picard") {
    c.n = 64;
    c.length = 16.0;
    c.kind = EnsembleKind::gaussian;
    c.amplitude = 0.5;
    c.dt = 1.0 / 64.0;
  } else if (command == "suite") {
    c.seed = AcceptanceOptions{}.seed;
  }
  return c;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "N") n = static_cast<int>(parse_integer(key, value));
  else if (key == "L") length = parse_double(key, value);
  else if (key == "k") k = static_cast<int>(parse_integer(key, value));
  else if (key == "k_lo") k_lo = static_cast<int>(parse_integer(key, value));
  else if (key == "k_hi") k_hi = static_cast<int>(parse_integer(key, value));
  else if (key == "s") s = parse_double(key, value);
  else if (key == "p") p = parse_double(key, value);
  else if (key == "q") q = parse_double(key, value);
  else if (key == "r") r = parse_double(key, value);
  else if (key == "eps") epsilon = parse_double(key, value);
  else if (key == "times") times = parse_list(key, value);
  else if (key == "kind") kind = ensemble_kind_from(trim(value));
  else if (key == "count") count = static_cast<int>(parse_integer(key, value));
  else if (key == "seed") {
    const long long v = parse_integer(key, value);
    if (v < 0) throw ConfigError("seed must be non-negative");
    seed = static_cast<std::uint64_t>(v);
  } else if (key == "width") width = parse_double(key, value);
  else if (key == "envelope") envelope = parse_double(key, value);
  else if (key == "amplitude") amplitude = parse_double(key, value);
  else if (key == "input") input = fs::path(trim(value));
  else if (key == "alpha") alpha = static_cast<int>(parse_integer(key, value));
  else if (key == "sign") sign = parse_sign(value);
  else if (key == "dt") dt = parse_double(key, value);
  else if (key == "T") final_time = parse_double(key, value);
  else if (key == "dealias") dealias = parse_bool(key, value);
  else if (key == "order") order = static_cast<int>(parse_integer(key, value));
  else if (key == "out") output_dir = fs::path(trim(value));
  else if (key == "format") format = trim(value);
  else if (key == "ensemble") ensemble_size = static_cast<int>(parse_integer(key, value));
  else if (key == "determinism") determinism = parse_bool(key, value);
  else throw ConfigError("unknown configuration key '" + key + "'");
}

void RunConfig::validate() const {
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
    throw ConfigError("unknown command '" + command + "'");
  }
  if (format != "csv" && format != "json" && format != "both") throw ConfigError("format must be csv, json or both");
  if (output_dir.empty()) throw ConfigError("no output directory");
  if (command == "suite") {
    if (ensemble_size < 5) throw ConfigError("suite ensemble must have at least 5 samples");
    return;
  }
  if (!input) create_grid(n, length);
  if (count < 1) throw ConfigError("count must be at least 1");
  if (k < 0 || k_lo < 0 || k_hi < k_lo) throw ConfigError("shell range needs 0 <= k_lo <= k_hi and k >= 0");
  if (!(epsilon > 0.0)) throw ConfigError("eps must be positive");
  if (!(width > 0.0) || !std::isfinite(amplitude)) throw ConfigError("width must be positive, amplitude finite");
  ExponentTuple{s, p, q, r}.validate();
  for (double t : times) {
    if (!std::isfinite(t)) throw ConfigError("times must be finite");
  }
  if ((command == "evolve" || command == "knapp") && times.size() < 3) {
    throw ConfigError(command + " needs at least three times for the growth fit");
  }
  if (command == "smoothing" || command == "decouple" || command == "equiv" || command == "embed") {
    if (k_lo < 1) throw ConfigError("shell sweeps start at k_lo >= 1");
    if (command == "decouple" && k_hi - k_lo < 2) throw ConfigError("decouple needs at least three shells");
  }
  if (command == "nlw" || command == "picard") {
    solver_of(*this).validate();
    if (command == "picard" && (order < 1 || order > 9)) throw ConfigError("order must lie in 1..9");
    if (command == "picard" && alpha != 3) throw ConfigError("picard needs alpha = 3");
  }
}

Json RunConfig::to_json() const {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["grid"] = {{"N", n}, {"L", length}};
  j["shells"] = {{"k", k}, {"k_lo", k_lo}, {"k_hi", k_hi}};
  j["exponents"] = {{"s", s}, {"p", exponent_json(p)}, {"q", q}, {"r", exponent_json(r)}, {"eps", epsilon}};
  j["times"] = times;
  j["ensemble"] = {{"kind", to_string(kind)}, {"count", count}, {"seed", seed}, {"width", width}, {"envelope", envelope ? Json(*envelope) : Json()},
                   {"amplitude", amplitude}, {"input", input ? input->string() : ""}};
  j["solver"] = {{"alpha", alpha}, {"sign", sign}, {"dt", dt}, {"T", final_time}, {"dealias", dealias},
                 {"order", order}};
  j["output"] = {{"dir", output_dir.string()}, {"format", format}};
  if (command == "suite") j["suite"] = {{"ensemble", ensemble_size}, {"determinism", determinism}};
  return j;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

fs::path default_output_dir() {
  if (const char* env = std::getenv("HALFWAVE_OUTPUT_DIR"); env && *env) return env;
  return "halfwave_out";
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = config.output_dir / config.command;
  Json manifest;
  manifest["config"] = config.to_json();
  manifest["versions"] = versions();
  manifest["seeds"] = {config.seed};
  manifest["started_utc"] = utc_timestamp();

  int status = 0;
  auto finish = [&](const std::string& state, const Json& result, const std::vector<std::string>& files) {
    manifest["status"] = state;
    manifest["result"] = result;
    manifest["artifacts"] = files;
    manifest["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_json(dir / "manifest.json", manifest);
  };

  if (config.command == "suite") {
    AcceptanceOptions options;
    options.output_dir = dir;
    options.seed = config.seed;
    options.ensemble_size = config.ensemble_size;
    options.check_determinism = config.determinism;
    fs::create_directories(dir);
    const AcceptanceResult result =
        run_acceptance(options, [&](const CriterionResult& r) { out << r.line() << std::endl; });
    status = result.all_passed() ? 0 : 1;
    out << (status == 0 ? "suite: all criteria passed" : "suite: FAILED") << '\n';
    finish(status == 0 ? "passed" : "failed", result.to_json(), {"acceptance.json"});
    return status;
  }

  Artifacts artifacts(config, dir);
  try {
    const Json result = command_fn(config.command)(config, artifacts, out);
    finish("ok", result, artifacts.files());
  } catch (const NumericError& ex) {
    err << "numerical failure: " << ex.what() << '\n';
    finish("failed", {{"error", ex.what()}, {"partial", true}}, artifacts.files());
    status = 3;
  } catch (const ValidationError& ex) {
    err << "validation failure: " << ex.what() << '\n';
    finish("failed", {{"error", ex.what()}, {"partial", true}}, artifacts.files());
    status = 3;
  }
  return status;
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"halfwave: half-wave group and adapted Besov space experiments"};
  app.set_help_flag();
  std::string command;
  std::string config_path;
  bool help = false;
  app.add_option("command", command);
  app.add_option("--config", config_path);
  app.add_flag("-h,--help", help);
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::Option*> options;
  for (const auto& key : kKeys) options[key] = app.add_option("--" + key, flags[key]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << '\n' << usage_text();
    return 2;
  }
  if (help || command.empty()) {
    (help ? out : err) << usage_text();
    return help ? 0 : 2;
  }
  try {
    RunConfig config = RunConfig::defaults_for(command);
    if (!config_path.empty()) {
      for (const auto& [key, value] : read_config_file(config_path)) config.set(key, value);
    }
    for (const auto& [key, option] : options) {
      if (option->count() > 0) config.set(key, flags[key]);
    }
    config.validate();
    return run(config, out, err);
  } catch (const ConfigError& ex) {
    err << "configuration error: " << ex.what() << '\n';
    return 2;
  } catch (const UsageError& ex) {
    err << "usage error: " << ex.what() << '\n';
    return 2;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return 3;
  }
}

}  // namespace halfwave
