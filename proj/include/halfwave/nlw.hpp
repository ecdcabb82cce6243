#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "halfwave/report.hpp"
#include "halfwave/spectral_grid.hpp"

namespace halfwave {

// d_t^2 u - Delta u = sign |u|^{alpha-1} u on the periodic grid.
// sign = +1 focusing, -1 defocusing, 0 switches the nonlinearity off.
struct SolverConfig {
  int alpha = 3;
  int sign = -1;
  double dt = 1.0 / 1024.0;
  double final_time = 1.0;
  bool dealias = true;
  // States are stored at these times (each must be a multiple of dt); empty stores only the endpoints.
  std::vector<double> sample_times;
  // Picard/remainder storage cap.
  std::size_t memory_budget = std::size_t{2} << 30;

  int steps() const;
  // ConfigError on dt <= 0, even or small alpha, bad sign, off-grid sample times.
  void validate() const;
  Json to_json() const;
};

struct WaveState {
  Field u;
  Field ut;
  double t = 0.0;
};

// Square dealiasing mask: modes with max(|m_x|, |m_y|) > N/3 (alpha = 3) or N/4 (alpha >= 5) are zeroed.
int dealias_cutoff(int n, int alpha);
// Spectral mass fraction above the cutoff.
double dealias_excess(const Field& f, int alpha);

struct ConservedQuantities {
  double mass = 0.0;    // int |u|^2
  double energy = 0.0;  // int 1/2 |u_t|^2 + 1/2 |grad u|^2 - sign/(alpha+1) |u|^{alpha+1}
  double charge = 0.0;  // Im int conj(u) u_t
};
ConservedQuantities conserved_quantities(const WaveState& state, int alpha = 3, int sign = -1);

// One Lawson RK4 step of size cfg.dt: exact linear flow, RK4 on the interaction-picture nonlinearity.
// NumericError on non-finite output.
WaveState step(const WaveState& state, const SolverConfig& cfg);

struct StepRecord {
  double t = 0.0;
  ConservedQuantities quantities;
  double difference_norm = 0.0;  // H^1 x L^2 norm of v = u - w, w the free wave
  double q = 1.0;                // M(v) + E(v) + 1
};

struct Trajectory {
  std::vector<WaveState> states;
  std::vector<StepRecord> records;  // every step, starting at t = 0
  double strichartz_24_7_4 = 0.0;  // ||u||_{L^{24/7}_t L^4_x}
  double strichartz_4_6 = 0.0;     // ||u||_{L^4_t L^6_x}
  bool blew_up = false;
  double blowup_time = 0.0;
  std::string message;
  std::vector<std::string> warnings;

  double energy_drift() const;
  Json summary() const;
  std::string records_csv() const;
};

// The free wave (cos(tD) f + sin(tD)/D g, its time derivative).
WaveState free_wave(const Field& f, const Field& g, double t);

// Blow-up (H^1 x L^2 norm of v above 1e8 or not finite) ends the run early with
// blew_up set; the last stored state is the last valid one.
Trajectory solve(const Field& f, const Field& g, const SolverConfig& cfg);

// Fields sampled on t_j = j dt, j = 0..steps.
struct TimeSeries {
  std::vector<double> times;
  std::vector<Field> values;
};

// A_1..A_M for alpha = 3 on the solver's time grid. Duhamel integrals use cumulative
// Simpson moments; the nonlinearity is dealiased like the solver's when cfg.dealias is on.
std::vector<TimeSeries> picard_iterates(const Field& f, const Field& g, const SolverConfig& cfg, int max_order);

struct RemainderSeries {
  std::vector<TimeSeries> terms;  // u^0..u^{n-1}
  TimeSeries v;                   // u - sum_j u^j, u from solve()
  double v_linf_l2 = 0.0;         // ||v||_{L^inf_t L^2_x}
  double v_l4_linf = 0.0;         // ||v||_{L^4_t L^inf_x}
};
// u from solve() with the same configuration, so n = 1 reproduces the solver's v = u - w.
RemainderSeries remainder_series(const Field& f, const Field& g, const SolverConfig& cfg, int n);

// sup_t || u(t) - sum_{m <= M} A_m(t) ||_2 over the Picard time grid.
double picard_residual(const TimeSeries& u, std::span<const TimeSeries> iterates, int order);

struct GronwallReport {
  std::vector<double> times;
  std::vector<double> q;
  double c_hat = 0.0;  // sup of the forward-difference log derivative of Q
  bool certified = false;
  std::optional<double> divergence_time;

  Json to_json() const;
};
GronwallReport gronwall_monitor(std::span<const StepRecord> records);

}  // namespace halfwave
