#pragma once

#include <span>
#include <vector>

#include "oucap/channel_model.hpp"

namespace oucap {

/// Constant density on [lo, hi].
struct SpectralBand {
  double lo = 0.0;
  double hi = 0.0;
  double density = 0.0;
};

/// Piecewise-constant input spectral density.
class InputSpectrum {
 public:
  InputSpectrum() = default;

  /// Throws InvalidParams on an empty or negative interval, a negative or
  /// non-finite density, or overlap with an existing band.
  void add(SpectralBand band);

  const std::vector<SpectralBand>& bands() const noexcept { return bands_; }
  double total_power() const noexcept;

  /// Density P/n on [-n/2 - k, -k] and [k, n/2 + k]; total power P.
  static InputSpectrum flat_two_sided(double n, double k, double power);

 private:
  std::vector<SpectralBand> bands_;
};

/// (1/4pi) int log(1 + S_x/S_z) over the support of S_x. Adaptive
/// Gauss-Kronrod, with tanh-sinh halves around the log singularity at x = 0
/// when S_z(0) = 0. Throws DegenerateNoise if the quadrature returns a
/// non-finite value.
double pinsker_rate(const InputSpectrum& input, const ChannelParams& params);

/// k -> infinity value (n/4pi) log(1 + 2 pi P / n).
double flat_input_limit(double n, double power);

struct FlatSweepRow {
  double n = 0.0;
  double k = 0.0;
  double rate = 0.0;
  double analytic_limit = 0.0;
};

/// pinsker_rate of flat_two_sided(n, k, P) for each n (outer) and k (inner).
std::vector<FlatSweepRow> flat_input_limit_sweep(const ChannelParams& params,
                                                 std::span<const double> n_values,
                                                 std::span<const double> k_values);

struct WaterFill {
  double level = 0.0;
  double rate = 0.0;
  double power_used = 0.0;
};

/// Water-filling of power P over [-W, W] against the OU noise density.
/// The level is found by bracketed root search on the closed-form power
/// curve; the rate integral is evaluated by adaptive quadrature.
WaterFill waterfill_bandlimited(const ChannelParams& params, double band, double power);

/// Power poured by water level A over [-W, W].
double waterfill_power(const ChannelParams& params, double band, double level);

/// int (1/2pi - S_z) dx over the real line, (kappa^2 - (kappa+lambda)^2) / (2 kappa).
/// Throws InvalidParams outside the ColoredGain regime.
double p_max(const ChannelParams& params);

}  // namespace oucap
