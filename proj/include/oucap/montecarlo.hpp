#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "oucap/abel_ode.hpp"
#include "oucap/channel_model.hpp"

namespace oucap {

/// Grid t_k = k T / n, k = 0..n, and the Monte Carlo sample size.
struct SimConfig {
  double horizon = 10.0;
  std::size_t steps = 10000;
  std::size_t trials = 10000;
  std::uint64_t master_seed = 0;

  double delta() const noexcept { return horizon / static_cast<double>(steps); }
  /// Throws InvalidParams unless horizon > 0, steps >= 100, trials >= 1.
  void validate() const;
};

/// Independent, reproducible stream for one trial: mt19937_64 keyed by
/// seed_seq over the 32-bit halves of (master_seed, trial).
std::mt19937_64 trial_engine(std::uint64_t master_seed, std::uint64_t trial);

/// Worker count: OUCAP_THREADS if set to a positive integer, otherwise the
/// hardware concurrency, never more than `work_items`.
unsigned resolve_threads(std::size_t work_items);

struct NoisePath {
  std::vector<double> brownian_increments;  // dB_k, k < n
  std::vector<double> ou_state;             // Z0(t_k), k <= n
  double tail = 0.0;                        // zeta0
  std::vector<double> z_increments;         // dZ_k, k < n
};

/// One noise path of trial `trial`: exact OU transition for Z0 with the
/// correlated Brownian increment, Euler drift for Z.
NoisePath simulate_noise(const ChannelParams& params, const SimConfig& cfg, std::uint64_t trial);

struct ArmaNoise {
  std::vector<double> z;  // stationarized samples, k < n
  std::vector<double> b;  // driving N(0, delta) increments
  /// max_k |z_{k+1} - u z_k - b_{k+1} - (lambda/kappa - (lambda/kappa+1) u) b_k|, u = e^{-kappa delta}
  double recursion_residual = 0.0;
};

/// sqrt(2 kappa x / (1 - e^{-2 kappa x})).
double stationarity_scale(double kappa, double x);

/// Stationarized discrete noise of trial `trial`.
ArmaNoise stationary_arma_noise(const ChannelParams& params, const SimConfig& cfg,
                                std::uint64_t trial);

struct MmsePoint {
  double time = 0.0;
  double empirical = 0.0;
  double analytic = 0.0;
  double half_width = 0.0;
  double filter = 0.0;  // Kalman conditional variance, identical across trials
};

struct PowerPoint {
  double time = 0.0;
  double empirical = 0.0;
  double half_width = 0.0;
};

struct SimReport {
  std::vector<MmsePoint> mmse_curve;
  std::vector<PowerPoint> power_curve;
  double empirical_rate = 0.0;
  std::uint64_t master_seed = 0;
  std::size_t trials = 0;
  /// Per-trial message draw and terminal filter estimate.
  std::vector<double> theta;
  std::vector<double> estimate;
  /// Share of trials whose normalized innovations pass a Ljung-Box test
  /// (20 lags) at the 1% level.
  double whiteness_pass_rate = 0.0;

  /// max over output times of |empirical - analytic| / (half_width / 1.96).
  double max_mmse_z() const;
};

/// Output times: every steps/100 grid points (at least every point), plus T.
std::vector<std::size_t> output_indices(std::size_t steps);

/// Runs the continuous-time SK scheme on the Euler-discretized channel with
/// an exact Kalman filter on the state (theta, Z0, zeta0). The gain A(t) is
/// read from `traj`. Throws InvalidParams if traj is shorter than the
/// horizon, FilterDivergence if the covariance loses positivity.
SimReport run_sk_scheme(const ChannelParams& params, const SimConfig& cfg,
                        const OdeTrajectory& traj);

/// Cell index of theta in M equiprobable standard-normal cells.
std::size_t message_cell(double theta, std::size_t grid_size);

/// Share of trials whose terminal estimate falls outside the cell of the
/// transmitted theta. Throws InvalidParams if grid_size == 0.
double decode_message(const SimReport& report, std::size_t grid_size);

/// CSV with columns time, mmse_emp, mmse_analytic, mmse_hw, power_emp,
/// power_hw. Half-widths of a single-trial run print as "NA".
void write_csv(std::ostream& os, const SimReport& report);

}  // namespace oucap
