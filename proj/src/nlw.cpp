#include "halfwave/nlw.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <sstream>

#include "fft.hpp"
#include "halfwave/errors.hpp"
#include "halfwave/norms.hpp"
#include "halfwave/numerics.hpp"

namespace halfwave {

namespace {

constexpr double kBlowupNorm = 1e8;

struct Pair {
  ComplexVector u;
  ComplexVector v;
};

// Per-mode linear flow over a time tau: [cos, sin/r; -r sin, cos].
struct LinearFlow {
  std::vector<double> c, s_over_r, r_s;

  LinearFlow(const GridSpec& spec, double tau) {
    const auto lat = lattice(spec);
    const std::size_t size = spec.size();
    c.resize(size);
    s_over_r.resize(size);
    r_s.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
      const double r = lat->radius[i];
      const double sn = std::sin(tau * r);
      c[i] = std::cos(tau * r);
      s_over_r[i] = r == 0.0 ? tau : sn / r;
      r_s[i] = r * sn;
    }
  }

  Pair apply(const Pair& x) const {
    Pair out{ComplexVector(x.u.size()), ComplexVector(x.u.size())};
    for (std::size_t i = 0; i < x.u.size(); ++i) {
      out.u[i] = c[i] * x.u[i] + s_over_r[i] * x.v[i];
      out.v[i] = -r_s[i] * x.u[i] + c[i] * x.v[i];
    }
    return out;
  }

  // Flow applied to (0, v).
  Pair apply_velocity(const ComplexVector& v) const {
    Pair out{ComplexVector(v.size()), ComplexVector(v.size())};
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.u[i] = s_over_r[i] * v[i];
      out.v[i] = c[i] * v[i];
    }
    return out;
  }
};

std::vector<double> dealias_mask(const GridSpec& spec, int alpha, bool enabled) {
  std::vector<double> mask(spec.size(), 1.0);
  if (!enabled) return mask;
  const int cut = dealias_cutoff(spec.n, alpha);
  for (int iy = 0; iy < spec.n; ++iy) {
    const int my = std::abs(signed_index(iy, spec.n));
    for (int ix = 0; ix < spec.n; ++ix) {
      const int mx = std::abs(signed_index(ix, spec.n));
      if (std::max(mx, my) > cut) mask[static_cast<std::size_t>(iy) * spec.n + ix] = 0.0;
    }
  }
  return mask;
}

ComplexVector physical_of(const ComplexVector& spectral, int n) {
  ComplexVector out = spectral;
  detail::fft_inverse(out.data(), n);
  return out;
}

double power_of(double a, int exponent) {
  double out = 1.0;
  for (int i = 0; i < exponent; ++i) out *= a;
  return out;
}

// sign P(|u|^{alpha-1} u), spectral in and out.
class Nonlinearity {
 public:
  Nonlinearity(const GridSpec& spec, const SolverConfig& cfg)
      : n_(spec.n), alpha_(cfg.alpha), sign_(cfg.sign), mask_(dealias_mask(spec, cfg.alpha, cfg.dealias)) {}

  ComplexVector operator()(const ComplexVector& u_hat) const {
    if (sign_ == 0) return ComplexVector(u_hat.size());
    ComplexVector w = physical_of(u_hat, n_);
    const int half = (alpha_ - 1) / 2;
    for (auto& z : w) z *= sign_ * power_of(std::norm(z), half);
    detail::fft_forward(w.data(), n_);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] *= mask_[i];
    return w;
  }

  const std::vector<double>& mask() const { return mask_; }

 private:
  int n_;
  int alpha_;
  int sign_;
  std::vector<double> mask_;
};

class Stepper {
 public:
  Stepper(const GridSpec& spec, const SolverConfig& cfg)
      : h_(cfg.dt), half_(spec, 0.5 * cfg.dt), nonlinear_(spec, cfg) {}

  Pair advance(const Pair& x) const {
    const double h = h_;
    const std::size_t size = x.u.size();
    const ComplexVector f1 = nonlinear_(x.u);
    const Pair xa = half_.apply(x);
    const Pair k1a = half_.apply_velocity(f1);

    ComplexVector y(size);
    for (std::size_t i = 0; i < size; ++i) y[i] = xa.u[i] + 0.5 * h * k1a.u[i];
    const ComplexVector f2 = nonlinear_(y);
    // The third stage only shifts the velocity, so its displacement is xa.u.
    const ComplexVector f3 = nonlinear_(xa.u);

    Pair z{xa.u, ComplexVector(size)};
    for (std::size_t i = 0; i < size; ++i) z.v[i] = xa.v[i] + h * f3[i];
    const ComplexVector f4 = nonlinear_(half_.apply(z).u);

    Pair acc{ComplexVector(size), ComplexVector(size)};
    for (std::size_t i = 0; i < size; ++i) {
      acc.u[i] = xa.u[i] + h / 6.0 * k1a.u[i];
      acc.v[i] = xa.v[i] + h / 6.0 * k1a.v[i] + h / 3.0 * (f2[i] + f3[i]);
    }
    Pair out = half_.apply(acc);
    for (std::size_t i = 0; i < size; ++i) out.v[i] += h / 6.0 * f4[i];
    return out;
  }

 private:
  double h_;
  LinearFlow half_;
  Nonlinearity nonlinear_;
};

Pair spectral_pair(const WaveState& state) {
  return {to_spectral(state.u).storage(), to_spectral(state.ut).storage()};
}

struct Quantities {
  ConservedQuantities conserved;
  std::vector<double> lebesgue;  // ||u||_4, ||u||_6
};

Quantities measure(const GridSpec& spec, const Pair& x, int alpha, int sign) {
  const auto lat = lattice(spec);
  const double area = spec.cell_area();
  CompensatedSum mass, kinetic, gradient, charge;
  for (std::size_t i = 0; i < x.u.size(); ++i) {
    const double r = lat->radius[i];
    mass.add(std::norm(x.u[i]));
    kinetic.add(std::norm(x.v[i]));
    gradient.add(r * r * std::norm(x.u[i]));
    charge.add((std::conj(x.u[i]) * x.v[i]).imag());
  }
  const ComplexVector u = physical_of(x.u, spec.n);
  CompensatedSum potential;
  const int half = (alpha + 1) / 2;
  for (const auto& z : u) potential.add(power_of(std::norm(z), half));
  const double exps[2] = {4.0, 6.0};

  Quantities q;
  q.conserved.mass = area * mass.value();
  q.conserved.charge = area * charge.value();
  q.conserved.energy = area * (0.5 * kinetic.value() + 0.5 * gradient.value() -
                               sign / static_cast<double>(alpha + 1) * potential.value());
  q.lebesgue = lebesgue_norms(u, area, exps);
  return q;
}

Pair free_pair(const Pair& data, const GridSpec& spec, double t) {
  if (t == 0.0) return data;
  return LinearFlow(spec, t).apply(data);
}

double h1_l2_norm(const GridSpec& spec, const Pair& x) {
  const auto lat = lattice(spec);
  CompensatedSum acc;
  for (std::size_t i = 0; i < x.u.size(); ++i) {
    const double r = lat->radius[i];
    acc.add((1.0 + r * r) * std::norm(x.u[i]) + std::norm(x.v[i]));
  }
  return std::sqrt(spec.cell_area() * acc.value());
}

Pair difference(const Pair& a, const Pair& b) {
  Pair out{ComplexVector(a.u.size()), ComplexVector(a.u.size())};
  for (std::size_t i = 0; i < a.u.size(); ++i) {
    out.u[i] = a.u[i] - b.u[i];
    out.v[i] = a.v[i] - b.v[i];
  }
  return out;
}

bool finite(const Pair& x) {
  for (std::size_t i = 0; i < x.u.size(); ++i) {
    if (!std::isfinite(x.u[i].real()) || !std::isfinite(x.u[i].imag()) || !std::isfinite(x.v[i].real()) ||
        !std::isfinite(x.v[i].imag())) {
      return false;
    }
  }
  return true;
}

WaveState to_state(const GridSpec& spec, const Pair& x, double t) {
  return {Field(spec, Representation::spectral, x.u), Field(spec, Representation::spectral, x.v), t};
}

}  // namespace

int SolverConfig::steps() const { return static_cast<int>(std::llround(final_time / dt)); }

void SolverConfig::validate() const {
  std::ostringstream msg;
  if (!(dt > 0.0) || !std::isfinite(dt)) msg << "time step dt=" << dt << " must be positive";
  else if (alpha < 3 || alpha % 2 == 0) msg << "alpha=" << alpha << " must be an odd integer >= 3";
  else if (sign < -1 || sign > 1) msg << "sign=" << sign << " must be +1 (focusing), -1 (defocusing) or 0";
  else if (!(final_time >= 0.0) || std::abs(final_time - steps() * dt) > 1e-9 * std::max(1.0, final_time))
    msg << "final time " << final_time << " is not a multiple of dt=" << dt;
  else {
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
      const double t = sample_times[i];
      const double j = std::round(t / dt);
      if (t < 0.0 || t > final_time + 1e-12 || std::abs(t - j * dt) > 1e-9 * std::max(1.0, t)) {
        msg << "sample time " << t << " is not on the step grid of [0, " << final_time << "]";
        break;
      }
      if (i > 0 && !(t > sample_times[i - 1])) {
        msg << "sample times must be strictly increasing";
        break;
      }
    }
    if (msg.str().empty()) return;
  }
  throw ConfigError(msg.str());
}

Json SolverConfig::to_json() const {
  Json j;
  j["alpha"] = alpha;
  j["sign"] = sign;
  j["dt"] = dt;
  j["final_time"] = final_time;
  j["dealias"] = dealias;
  j["sample_times"] = sample_times;
  return j;
}

int dealias_cutoff(int n, int alpha) { return alpha <= 3 ? n / 3 : n / 4; }

double dealias_excess(const Field& f, int alpha) {
  const Field spectral = to_spectral(f);
  const std::vector<double> mask = dealias_mask(f.spec(), alpha, true);
  CompensatedSum outside, total;
  const auto values = spectral.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double m = std::norm(values[i]);
    total.add(m);
    if (mask[i] == 0.0) outside.add(m);
  }
  return total.value() > 0.0 ? outside.value() / total.value() : 0.0;
}

ConservedQuantities conserved_quantities(const WaveState& state, int alpha, int sign) {
  if (!(state.u.spec() == state.ut.spec())) throw UsageError("state fields live on different grids");
  return measure(state.u.spec(), spectral_pair(state), alpha, sign).conserved;
}

WaveState step(const WaveState& state, const SolverConfig& cfg) {
  cfg.validate();
  if (!(state.u.spec() == state.ut.spec())) throw UsageError("state fields live on different grids");
  const GridSpec& spec = state.u.spec();
  const Pair next = Stepper(spec, cfg).advance(spectral_pair(state));
  if (!finite(next)) {
    std::ostringstream msg;
    msg << "blow-up: non-finite state after the step from t=" << state.t;
    throw NumericError(msg.str());
  }
  WaveState out = to_state(spec, next, state.t + cfg.dt);
  if (state.u.representation() == Representation::physical) {
    out.u = to_physical(out.u);
    out.ut = to_physical(out.ut);
  }
  return out;
}

WaveState free_wave(const Field& f, const Field& g, double t) {
  if (!(f.spec() == g.spec())) throw UsageError("data live on different grids");
  const Pair data{to_spectral(f).storage(), to_spectral(g).storage()};
  return to_state(f.spec(), free_pair(data, f.spec(), t), t);
}

double Trajectory::energy_drift() const {
  if (records.empty()) return 0.0;
  const double e0 = records.front().quantities.energy;
  double worst = 0.0;
  for (const auto& r : records) worst = std::max(worst, std::abs(r.quantities.energy - e0));
  return e0 != 0.0 ? worst / std::abs(e0) : worst;
}

Json Trajectory::summary() const {
  Json j;
  j["steps"] = records.empty() ? 0 : static_cast<long long>(records.size() - 1);
  j["final_time"] = records.empty() ? 0.0 : records.back().t;
  if (!records.empty()) {
    j["initial_energy"] = records.front().quantities.energy;
    j["initial_mass"] = records.front().quantities.mass;
    j["initial_charge"] = records.front().quantities.charge;
    j["final_mass"] = records.back().quantities.mass;
    j["final_charge"] = records.back().quantities.charge;
  }
  j["energy_drift"] = energy_drift();
  j["strichartz_L24_7_L4"] = strichartz_24_7_4;
  j["strichartz_L4_L6"] = strichartz_4_6;
  j["blew_up"] = blew_up;
  if (blew_up) j["blowup_time"] = blowup_time;
  j["message"] = message;
  j["warnings"] = warnings;
  return j;
}

std::string Trajectory::records_csv() const {
  CsvTable table({"t", "mass", "energy", "charge", "difference_h1_l2", "q"});
  for (const auto& r : records) {
    table.add_row({csv_cell(r.t), csv_cell(r.quantities.mass), csv_cell(r.quantities.energy),
                   csv_cell(r.quantities.charge), csv_cell(r.difference_norm), csv_cell(r.q)});
  }
  return table.str();
}

Trajectory solve(const Field& f, const Field& g, const SolverConfig& cfg) {
  cfg.validate();
  if (!(f.spec() == g.spec())) throw UsageError("data live on different grids");
  const GridSpec& spec = f.spec();
  Trajectory traj;

  Pair data{to_spectral(f).storage(), to_spectral(g).storage()};
  if (cfg.dealias) {
    const double excess = std::max(dealias_excess(f, cfg.alpha), dealias_excess(g, cfg.alpha));
    if (excess > 0.0) {
      const auto mask = dealias_mask(spec, cfg.alpha, true);
      for (std::size_t i = 0; i < mask.size(); ++i) {
        data.u[i] *= mask[i];
        data.v[i] *= mask[i];
      }
      std::ostringstream msg;
      msg.precision(3);
      msg << "initial data projected onto the dealiased band (removed mass fraction " << excess << ")";
      traj.warnings.push_back(msg.str());
    }
  }

  const int steps = cfg.steps();
  std::vector<int> store;
  if (cfg.sample_times.empty()) {
    store = {0, steps};
  } else {
    for (double t : cfg.sample_times) store.push_back(static_cast<int>(std::llround(t / cfg.dt)));
  }
  auto stored = [&](int j) { return std::find(store.begin(), store.end(), j) != store.end(); };

  const Stepper stepper(spec, cfg);
  CompensatedSum norm_a, norm_b;
  double prev_a = 0.0, prev_b = 0.0;
  Pair x = data;
  for (int j = 0; j <= steps; ++j) {
    const double t = j * cfg.dt;
    if (j > 0) {
      Pair next = stepper.advance(x);
      if (!finite(next)) {
        traj.blew_up = true;
        traj.blowup_time = t;
        traj.message = "blow-up: non-finite state";
        break;
      }
      x = std::move(next);
    }
    const Pair w = free_pair(data, spec, t);
    const Pair v = difference(x, w);
    const double vnorm = h1_l2_norm(spec, v);
    if (!std::isfinite(vnorm) || vnorm > kBlowupNorm) {
      traj.blew_up = true;
      traj.blowup_time = t;
      std::ostringstream msg;
      msg << "blow-up: H^1 x L^2 norm of u - w reached " << vnorm << " at t=" << t;
      traj.message = msg.str();
      break;
    }
    const Quantities q = measure(spec, x, cfg.alpha, cfg.sign);
    const ConservedQuantities qv = measure(spec, v, cfg.alpha, cfg.sign).conserved;
    traj.records.push_back({t, q.conserved, vnorm, qv.mass + qv.energy + 1.0});

    const double a = std::pow(q.lebesgue[0], 24.0 / 7.0);
    const double b = power_of_magnitude(q.lebesgue[1], 4.0);
    if (j > 0) {
      norm_a.add(0.5 * cfg.dt * (prev_a + a));
      norm_b.add(0.5 * cfg.dt * (prev_b + b));
    }
    prev_a = a;
    prev_b = b;
    if (stored(j)) traj.states.push_back(to_state(spec, x, t));
  }
  traj.strichartz_24_7_4 = std::pow(norm_a.value(), 7.0 / 24.0);
  traj.strichartz_4_6 = std::pow(norm_b.value(), 0.25);
  if (traj.message.empty()) traj.message = "completed";
  return traj;
}

namespace {

std::size_t picard_bytes(const GridSpec& spec, int samples, int series) {
  return static_cast<std::size_t>(series) * static_cast<std::size_t>(samples) * spec.size() * sizeof(Complex);
}

// Cumulative int_0^{t_j} g(s) ds on a uniform grid: composite Simpson, a closing
// 3/8 panel for odd interval counts, and h/12 (5 g0 + 8 g1 - g2) on the first interval.
class CumulativeIntegral {
 public:
  CumulativeIntegral(std::size_t size, double h) : h_(h), even_(size), previous_even_(size), out_(size) {}

  // Feed g_j for j = 0, 1, ...; `window` holds g_{j-3..j} (missing entries unused).
  const ComplexVector& next(int j, const std::array<const ComplexVector*, 4>& window, const ComplexVector* ahead) {
    const std::size_t size = out_.size();
    if (j == 0) {
      std::fill(out_.begin(), out_.end(), Complex(0.0));
      return out_;
    }
    if (j % 2 == 0) {
      previous_even_ = even_;
      const auto& a = *window[1];
      const auto& b = *window[2];
      const auto& c = *window[3];
      for (std::size_t i = 0; i < size; ++i) even_[i] += h_ / 3.0 * (a[i] + 4.0 * b[i] + c[i]);
      out_ = even_;
      return out_;
    }
    if (j == 1) {
      const auto& a = *window[2];
      const auto& b = *window[3];
      const auto& c = *ahead;
      for (std::size_t i = 0; i < size; ++i) out_[i] = h_ / 12.0 * (5.0 * a[i] + 8.0 * b[i] - c[i]);
      return out_;
    }
    // j odd >= 3: Simpson up to j - 3 (the even index before the latest), then 3/8.
    const auto& a = *window[0];
    const auto& b = *window[1];
    const auto& c = *window[2];
    const auto& d = *window[3];
    for (std::size_t i = 0; i < size; ++i) {
      out_[i] = previous_even_[i] + 3.0 * h_ / 8.0 * (a[i] + 3.0 * b[i] + 3.0 * c[i] + d[i]);
    }
    return out_;
  }

 private:
  double h_;
  ComplexVector even_, previous_even_, out_;
};

// int_0^{t_j} sin((t_j - s) D)/D F(s) ds for all j, F given spectrally on t_j = j h.
std::vector<ComplexVector> cumulative_duhamel(const GridSpec& spec, const std::vector<ComplexVector>& forcing,
                                              double h) {
  const auto lat = lattice(spec);
  const std::size_t size = spec.size();
  const int samples = static_cast<int>(forcing.size());
  // Moments cos(s r) F, sin(s r) F; at r = 0 they become F and s F.
  std::vector<ComplexVector> gc(samples, ComplexVector(size)), gs(samples, ComplexVector(size));
  for (int j = 0; j < samples; ++j) {
    const double s = j * h;
    for (std::size_t i = 0; i < size; ++i) {
      const double r = lat->radius[i];
      if (r == 0.0) {
        gc[j][i] = forcing[j][i];
        gs[j][i] = s * forcing[j][i];
      } else {
        gc[j][i] = std::cos(s * r) * forcing[j][i];
        gs[j][i] = std::sin(s * r) * forcing[j][i];
      }
    }
  }
  CumulativeIntegral ic(size, h), is(size, h);
  std::vector<ComplexVector> out(samples, ComplexVector(size));
  for (int j = 0; j < samples; ++j) {
    auto window_of = [&](const std::vector<ComplexVector>& g) {
      std::array<const ComplexVector*, 4> w{};
      for (int d = 0; d < 4; ++d) {
        const int idx = j - 3 + d;
        w[d] = idx >= 0 ? &g[idx] : nullptr;
      }
      return w;
    };
    const ComplexVector* ahead_c = j + 1 < samples ? &gc[j + 1] : nullptr;
    const ComplexVector* ahead_s = j + 1 < samples ? &gs[j + 1] : nullptr;
    const ComplexVector& c = ic.next(j, window_of(gc), ahead_c);
    const ComplexVector& sn = is.next(j, window_of(gs), ahead_s);
    const double t = j * h;
    for (std::size_t i = 0; i < size; ++i) {
      const double r = lat->radius[i];
      out[j][i] = r == 0.0 ? t * c[i] - sn[i] : (std::sin(t * r) * c[i] - std::cos(t * r) * sn[i]) / r;
    }
  }
  return out;
}

struct Series {
  std::vector<ComplexVector> spectral;
  std::vector<ComplexVector> physical;
};

// sign P(u1 conj(u2) u3) summed over the given slot triples, spectral, for each time.
std::vector<ComplexVector> trilinear_forcing(const GridSpec& spec, const SolverConfig& cfg,
                                             const std::vector<std::array<const Series*, 3>>& terms, int samples) {
  const auto mask = dealias_mask(spec, cfg.alpha, cfg.dealias);
  std::vector<ComplexVector> out(samples, ComplexVector(spec.size()));
  for (int j = 0; j < samples; ++j) {
    ComplexVector acc(spec.size());
    for (const auto& term : terms) {
      const auto& a = term[0]->physical[j];
      const auto& b = term[1]->physical[j];
      const auto& c = term[2]->physical[j];
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += a[i] * std::conj(b[i]) * c[i];
    }
    detail::fft_forward(acc.data(), spec.n);
    for (std::size_t i = 0; i < acc.size(); ++i) out[j][i] = static_cast<double>(cfg.sign) * mask[i] * acc[i];
  }
  return out;
}

Series series_from_spectral(std::vector<ComplexVector> spectral, int n) {
  Series s;
  s.physical.reserve(spectral.size());
  for (const auto& v : spectral) s.physical.push_back(physical_of(v, n));
  s.spectral = std::move(spectral);
  return s;
}

TimeSeries to_time_series(const GridSpec& spec, const Series& s, double h) {
  TimeSeries out;
  for (std::size_t j = 0; j < s.spectral.size(); ++j) {
    out.times.push_back(static_cast<double>(j) * h);
    out.values.emplace_back(spec, Representation::spectral, s.spectral[j]);
  }
  return out;
}

void check_picard_config(const SolverConfig& cfg, const GridSpec& spec, int series) {
  cfg.validate();
  if (cfg.alpha != 3) throw ConfigError("Picard recursion is implemented for alpha = 3");
  if (cfg.steps() < 2) throw ConfigError("Picard time grid needs at least 2 steps");
  // Spectral and physical copies, plus the moment arrays of one Duhamel integral.
  const std::size_t bytes = picard_bytes(spec, cfg.steps() + 1, 2 * series + 3);
  if (bytes > cfg.memory_budget) {
    std::ostringstream msg;
    msg << "Picard storage needs " << bytes << " bytes, above the budget of " << cfg.memory_budget;
    throw ConfigError(msg.str());
  }
}

std::vector<ComplexVector> free_series(const Field& f, const Field& g, const SolverConfig& cfg) {
  const GridSpec& spec = f.spec();
  Pair data{to_spectral(f).storage(), to_spectral(g).storage()};
  if (cfg.dealias) {
    const auto mask = dealias_mask(spec, cfg.alpha, true);
    for (std::size_t i = 0; i < mask.size(); ++i) {
      data.u[i] *= mask[i];
      data.v[i] *= mask[i];
    }
  }
  std::vector<ComplexVector> out;
  for (int j = 0; j <= cfg.steps(); ++j) out.push_back(free_pair(data, spec, j * cfg.dt).u);
  return out;
}

}  // namespace

std::vector<TimeSeries> picard_iterates(const Field& f, const Field& g, const SolverConfig& cfg, int max_order) {
  if (!(f.spec() == g.spec())) throw UsageError("data live on different grids");
  if (max_order < 1 || max_order > 9) throw ConfigError("Picard order must lie in 1..9");
  const GridSpec& spec = f.spec();
  check_picard_config(cfg, spec, max_order);
  const int samples = cfg.steps() + 1;

  std::vector<Series> a;
  a.reserve(max_order);
  a.push_back(series_from_spectral(free_series(f, g, cfg), spec.n));
  for (int m = 2; m <= max_order; ++m) {
    std::vector<std::array<const Series*, 3>> terms;
    for (int m1 = 1; m1 <= m - 2; ++m1) {
      for (int m2 = 1; m1 + m2 <= m - 1; ++m2) {
        const int m3 = m - m1 - m2;
        terms.push_back({&a[m1 - 1], &a[m2 - 1], &a[m3 - 1]});
      }
    }
    std::vector<ComplexVector> value;
    if (terms.empty()) {
      value.assign(samples, ComplexVector(spec.size()));
    } else {
      value = cumulative_duhamel(spec, trilinear_forcing(spec, cfg, terms, samples), cfg.dt);
    }
    a.push_back(series_from_spectral(std::move(value), spec.n));
  }
  std::vector<TimeSeries> out;
  for (const auto& s : a) out.push_back(to_time_series(spec, s, cfg.dt));
  return out;
}

double picard_residual(const TimeSeries& u, std::span<const TimeSeries> iterates, int order) {
  if (order < 1 || order > static_cast<int>(iterates.size())) throw UsageError("Picard order out of range");
  double worst = 0.0;
  for (std::size_t j = 0; j < u.values.size(); ++j) {
    const Field& uj = u.values[j];
    const Field spectral = to_spectral(uj);
    ComplexVector diff = spectral.storage();
    for (int m = 0; m < order; ++m) {
      const Field am = to_spectral(iterates[m].values.at(j));
      const auto v = am.values();
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= v[i];
    }
    CompensatedSum acc;
    for (const auto& z : diff) acc.add(std::norm(z));
    worst = std::max(worst, std::sqrt(uj.spec().cell_area() * acc.value()));
  }
  return worst;
}

RemainderSeries remainder_series(const Field& f, const Field& g, const SolverConfig& cfg, int n) {
  if (!(f.spec() == g.spec())) throw UsageError("data live on different grids");
  if (n < 1 || n > 9) throw ConfigError("remainder order must lie in 1..9");
  const GridSpec& spec = f.spec();
  check_picard_config(cfg, spec, n + 2);
  const int samples = cfg.steps() + 1;

  SolverConfig full = cfg;
  full.sample_times.clear();
  for (int j = 0; j < samples; ++j) full.sample_times.push_back(j * cfg.dt);
  const Trajectory traj = solve(f, g, full);
  if (traj.blew_up) throw NumericError("remainder series: " + traj.message);

  RemainderSeries out;
  std::vector<Series> terms;
  terms.push_back(series_from_spectral(free_series(f, g, cfg), spec.n));
  Series partial = terms.back();
  for (int j = 1; j < n; ++j) {
    const std::vector<std::array<const Series*, 3>> slot = {{&partial, &partial, &partial}};
    std::vector<ComplexVector> value = cumulative_duhamel(spec, trilinear_forcing(spec, cfg, slot, samples), cfg.dt);
    for (int k = 1; k < j; ++k) {
      for (int t = 0; t < samples; ++t) {
        for (std::size_t i = 0; i < value[t].size(); ++i) value[t][i] -= terms[k].spectral[t][i];
      }
    }
    terms.push_back(series_from_spectral(std::move(value), spec.n));
    for (int t = 0; t < samples; ++t) {
      for (std::size_t i = 0; i < spec.size(); ++i) partial.spectral[t][i] += terms.back().spectral[t][i];
      partial.physical[t] = physical_of(partial.spectral[t], spec.n);
    }
  }
  for (const auto& s : terms) out.terms.push_back(to_time_series(spec, s, cfg.dt));

  CompensatedSum l4;
  double prev = 0.0;
  for (int t = 0; t < samples; ++t) {
    const Field v = to_spectral(traj.states[t].u) - Field(spec, Representation::spectral, partial.spectral[t]);
    out.v.times.push_back(t * cfg.dt);
    const double exps[2] = {2.0, kInfinity};
    const auto norms = lebesgue_norms(to_physical(v), exps);
    out.v_linf_l2 = std::max(out.v_linf_l2, norms[0]);
    const double cur = power_of_magnitude(norms[1], 4.0);
    if (t > 0) l4.add(0.5 * cfg.dt * (prev + cur));
    prev = cur;
    out.v.values.push_back(v);
  }
  out.v_l4_linf = std::pow(l4.value(), 0.25);
  return out;
}

Json GronwallReport::to_json() const {
  Json j;
  j["c_hat"] = c_hat;
  j["certified"] = certified;
  j["q_initial"] = q.empty() ? 0.0 : q.front();
  j["q_final"] = q.empty() ? 0.0 : q.back();
  j["q_max"] = q.empty() ? 0.0 : *std::max_element(q.begin(), q.end());
  if (divergence_time) j["divergence_time"] = *divergence_time;
  return j;
}

GronwallReport gronwall_monitor(std::span<const StepRecord> records) {
  GronwallReport report;
  for (const auto& r : records) {
    if (!std::isfinite(r.q) || r.q > kBlowupNorm * kBlowupNorm) {
      report.divergence_time = r.t;
      break;
    }
    report.times.push_back(r.t);
    report.q.push_back(r.q);
  }
  if (report.q.size() < 2) {
    report.certified = !report.divergence_time && !report.q.empty();
    return report;
  }
  double c = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < report.q.size(); ++j) {
    const double dt = report.times[j + 1] - report.times[j];
    c = std::max(c, (std::log(report.q[j + 1]) - std::log(report.q[j])) / dt);
  }
  report.c_hat = c;
  bool ok = !report.divergence_time && std::isfinite(c);
  for (std::size_t j = 0; ok && j < report.q.size(); ++j) {
    const double bound = report.q.front() * std::exp(c * (report.times[j] - report.times.front()));
    if (report.q[j] > bound * (1.0 + 1e-12)) ok = false;
  }
  report.certified = ok;
  return report;
}

}  // namespace halfwave
